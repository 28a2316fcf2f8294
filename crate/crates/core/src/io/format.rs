//! Plain-text instance files.
//!
//! ```text
//! # comment
//! m n n'
//! x y        (m square corners, ids 0..m in file order)
//! x y        (n points of P)
//! x y        (n' witnesses)
//! ```

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{Instance, Point, Strictness, UnitSquare};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with comments stripped, with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_pair(line: usize, text: &str) -> Result<(f64, f64)> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let [a, b] = fields[..] else {
        return Err(parse_error(line, format!("expected two coordinates, found {}", fields.len())));
    };
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| parse_error(line, format!("invalid coordinate `{s}`")))
    };
    Ok((num(a)?, num(b)?))
}

/// Parses and validates an instance. Validation errors point at the line
/// of the offending square or point.
pub fn parse_instance(text: &str, strictness: Strictness) -> Result<Instance> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (hline, header) = lines.next_content().ok_or_else(|| parse_error(1, "missing header `m n n'`"))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse::<usize>().map_err(|_| parse_error(hline, format!("invalid count `{f}`"))))
        .collect::<Result<_>>()?;
    let [m, n, n_prime] = counts[..] else {
        return Err(parse_error(hline, "header must hold exactly three counts `m n n'`"));
    };

    let mut read = |count: usize, what: &str| -> Result<Vec<(usize, f64, f64)>> {
        (0..count)
            .map(|k| {
                let (line, text) = lines
                    .next_content()
                    .ok_or_else(|| parse_error(lines.last + 1, format!("expected {count} {what}, found {k}")))?;
                let (x, y) = parse_pair(line, text)?;
                Ok((line, x, y))
            })
            .collect()
    };
    let squares_raw = read(m, "squares")?;
    let points_raw = read(n, "points")?;
    let witnesses_raw = read(n_prime, "witnesses")?;
    if let Some((line, _)) = lines.next_content() {
        return Err(parse_error(line, "unexpected trailing data"));
    }

    let squares: Vec<UnitSquare> = squares_raw.iter().enumerate().map(|(id, &(_, x, y))| UnitSquare::new(id, x, y)).collect();
    if strictness.is_strict() {
        for (axis, key) in [("x", 0usize), ("y", 1)] {
            let coord = |s: &UnitSquare| if key == 0 { s.x } else { s.y };
            let mut seen = std::collections::HashMap::new();
            for (s, &(line, _, _)) in squares.iter().zip(&squares_raw) {
                if let Some(first) = seen.insert(coord(s).to_bits(), s.id) {
                    return Err(Error::Validation {
                        line: Some(line),
                        message: format!("square {} shares its {axis}-coordinate with square {first}", s.id),
                    });
                }
            }
        }
    }
    for &(line, x, y) in &points_raw {
        let p = Point::new(x, y);
        if !squares.iter().any(|s| s.contains(p)) {
            return Err(Error::Validation {
                line: Some(line),
                message: format!("point ({x}, {y}) is not covered by any square"),
            });
        }
    }
    Ok(Instance::new(
        points_raw.iter().map(|&(_, x, y)| Point::new(x, y)).collect(),
        witnesses_raw.iter().map(|&(_, x, y)| Point::new(x, y)).collect(),
        squares,
    ))
}

/// Writes `inst` in the file format with nine fractional digits. Squares are
/// written in ascending id order.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut squares: Vec<&UnitSquare> = inst.squares.iter().collect();
    squares.sort_by_key(|s| s.id);
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", squares.len(), inst.points.len(), inst.witnesses.len());
    let _ = writeln!(out, "# squares");
    for s in squares {
        let _ = writeln!(out, "{:.9} {:.9}", s.x, s.y);
    }
    let _ = writeln!(out, "# points");
    for p in &inst.points {
        let _ = writeln!(out, "{:.9} {:.9}", p.x, p.y);
    }
    let _ = writeln!(out, "# witnesses");
    for p in &inst.witnesses {
        let _ = writeln!(out, "{:.9} {:.9}", p.x, p.y);
    }
    out
}
