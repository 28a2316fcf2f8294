//! Points, closed unit squares, and the instance types built from them.
//!
//! All comparisons are exact on `f64`. A square with bottom-left corner
//! `(x, y)` occupies the closed region `[x, x + 1] × [y, y + 1]`.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type SquareId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Axis-parallel unit square identified by its bottom-left corner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSquare {
    pub id: SquareId,
    pub x: f64,
    pub y: f64,
}

impl UnitSquare {
    pub const fn new(id: SquareId, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.x + 1.0
    }

    #[inline]
    pub fn top(&self) -> f64 {
        self.y + 1.0
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        contains(self, p)
    }

    /// Closed intersection test against the horizontal line `y = line_y`.
    #[inline]
    pub fn crosses_line(&self, line_y: f64) -> bool {
        self.y <= line_y && line_y <= self.top()
    }
}

/// Left-to-right order on squares; ties (permissive mode only) by id.
pub fn left_to_right(a: &UnitSquare, b: &UnitSquare) -> Ordering {
    a.x.total_cmp(&b.x).then(a.id.cmp(&b.id))
}

/// How coordinate ties among squares are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strictness {
    /// Duplicate square coordinates are rejected with `DegenerateInstance`.
    #[default]
    Strict,
    /// Duplicates are accepted; ties are broken by ascending square id.
    Permissive,
}

impl Strictness {
    /// Reads `MEMBCOVER_PERMISSIVE`; any value other than empty or `0`
    /// selects permissive mode.
    pub fn from_env() -> Self {
        match std::env::var("MEMBCOVER_PERMISSIVE") {
            Ok(v) if !v.is_empty() && v != "0" => Strictness::Permissive,
            _ => Strictness::Strict,
        }
    }

    pub fn is_strict(self) -> bool {
        self == Strictness::Strict
    }
}

/// Points to cover, membership witnesses, and candidate squares.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub points: Vec<Point>,
    pub witnesses: Vec<Point>,
    pub squares: Vec<UnitSquare>,
}

impl Instance {
    pub fn new(points: Vec<Point>, witnesses: Vec<Point>, squares: Vec<UnitSquare>) -> Self {
        Self {
            points,
            witnesses,
            squares,
        }
    }

    /// Checks finiteness, id uniqueness, coverage of every point, and (in
    /// strict mode) pairwise-distinct square x and y coordinates.
    pub fn validate(&self, strictness: Strictness) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        if !self
            .points
            .iter()
            .chain(&self.witnesses)
            .all(|p| finite(p.x) && finite(p.y))
            || !self.squares.iter().all(|s| finite(s.x) && finite(s.y))
        {
            return Err(Error::InvalidInstance("non-finite coordinate".into()));
        }
        let mut ids = HashSet::with_capacity(self.squares.len());
        for s in &self.squares {
            if !ids.insert(s.id) {
                return Err(Error::InvalidInstance(format!("duplicate square id {}", s.id)));
            }
        }
        if strictness.is_strict() {
            check_distinct_coordinates(&self.squares)?;
        }
        let gaps = coverage_gaps(&self.points, &self.squares);
        if !gaps.is_empty() {
            return Err(Error::InfeasibleInput { uncovered: gaps });
        }
        Ok(())
    }

    pub fn square_by_id(&self, id: SquareId) -> Option<&UnitSquare> {
        self.squares.iter().find(|s| s.id == id)
    }
}

/// Rejects two squares sharing an x or a y coordinate.
pub fn check_distinct_coordinates(squares: &[UnitSquare]) -> Result<()> {
    fn dup(squares: &[UnitSquare], key: impl Fn(&UnitSquare) -> f64) -> Option<(SquareId, SquareId)> {
        let mut sorted: Vec<&UnitSquare> = squares.iter().collect();
        sorted.sort_by(|a, b| key(a).total_cmp(&key(b)));
        sorted
            .windows(2)
            .find(|w| key(w[0]) == key(w[1]))
            .map(|w| (w[0].id.min(w[1].id), w[0].id.max(w[1].id)))
    }
    if let Some((a, b)) = dup(squares, |s| s.x) {
        return Err(Error::DegenerateInstance(format!(
            "squares {a} and {b} share an x-coordinate"
        )));
    }
    if let Some((a, b)) = dup(squares, |s| s.y) {
        return Err(Error::DegenerateInstance(format!(
            "squares {a} and {b} share a y-coordinate"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Below,
    Above,
}

/// An instance whose squares all cross `y = line_y` and whose points lie on
/// one side of that line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineInstance {
    pub base: Instance,
    pub line_y: f64,
    pub side: Side,
}

impl LineInstance {
    pub fn new(base: Instance, line_y: f64, side: Side) -> Result<Self> {
        if let Some(s) = base.squares.iter().find(|s| !s.crosses_line(line_y)) {
            return Err(Error::InvalidInstance(format!(
                "square {} does not intersect the line y = {line_y}",
                s.id
            )));
        }
        let wrong_side = |p: &&Point| match side {
            Side::Below => p.y > line_y,
            Side::Above => p.y < line_y,
        };
        if let Some(p) = base.points.iter().find(wrong_side) {
            return Err(Error::InvalidInstance(format!(
                "point ({}, {}) is not {} the line y = {line_y}",
                p.x,
                p.y,
                if side == Side::Below { "below" } else { "above" }
            )));
        }
        Ok(Self { base, line_y, side })
    }

    /// Finds a horizontal line crossing every square with all points on one
    /// side, preferring `Below`. The line instance algorithm does not depend
    /// on where exactly the line sits, only on the side.
    pub fn infer(base: Instance) -> Result<Self> {
        if base.squares.is_empty() {
            let line_y = base.points.iter().map(|p| p.y).fold(0.0, f64::max);
            return Self::new(base, line_y, Side::Below);
        }
        let lo = base.squares.iter().map(|s| s.y).fold(f64::NEG_INFINITY, f64::max);
        let hi = base.squares.iter().map(|s| s.top()).fold(f64::INFINITY, f64::min);
        if lo > hi {
            return Err(Error::InvalidInstance(
                "no horizontal line intersects every square".into(),
            ));
        }
        let max_py = base.points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let min_py = base.points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        if max_py <= hi {
            let line_y = lo.max(max_py);
            return Self::new(base, line_y, Side::Below);
        }
        if min_py >= lo {
            let line_y = hi.min(min_py);
            return Self::new(base, line_y, Side::Above);
        }
        Err(Error::InvalidInstance(
            "points lie on both sides of every line crossing all squares".into(),
        ))
    }
}

/// Closed containment: boundary points count.
#[inline]
pub fn contains(s: &UnitSquare, p: Point) -> bool {
    s.x <= p.x && p.x <= s.x + 1.0 && s.y <= p.y && p.y <= s.y + 1.0
}

/// Maximum number of squares of `sol` containing a single witness.
pub fn membership(witnesses: &[Point], sol: &[UnitSquare]) -> usize {
    witnesses
        .iter()
        .map(|&w| sol.iter().filter(|s| contains(s, w)).count())
        .max()
        .unwrap_or(0)
}

/// Points of `points` contained in no square of `sol`.
pub fn coverage_gaps(points: &[Point], sol: &[UnitSquare]) -> Vec<Point> {
    if points.is_empty() {
        return Vec::new();
    }
    let index = SquareIndex::new(sol);
    points
        .iter()
        .copied()
        .filter(|&p| index.first_containing(p).is_none())
        .collect()
}

fn reflect_through(line_y: f64, v: f64) -> f64 {
    2.0 * line_y - v
}

/// Maps an `Above` instance to the equivalent `Below` instance by reflecting
/// through the line; `Below` instances are returned unchanged.
pub fn canonicalize_line_instance(inst: &LineInstance) -> LineInstance {
    match inst.side {
        Side::Below => inst.clone(),
        Side::Above => reflect_line_instance(inst, Side::Below),
    }
}

/// Reflection through `y = line_y`, labelling the result with `side`.
/// Applying it twice gives back the original coordinates.
pub fn reflect_line_instance(inst: &LineInstance, side: Side) -> LineInstance {
    let l = inst.line_y;
    let flip = |p: &Point| Point::new(p.x, reflect_through(l, p.y));
    LineInstance {
        base: Instance {
            points: inst.base.points.iter().map(flip).collect(),
            witnesses: inst.base.witnesses.iter().map(flip).collect(),
            squares: inst
                .base
                .squares
                .iter()
                .map(|s| UnitSquare::new(s.id, s.x, reflect_through(l, s.y + 1.0)))
                .collect(),
        },
        line_y: l,
        side,
    }
}

/// Squares sorted by x for window queries: a square can contain `p` only if
/// `p.x - 1 <= x(s) <= p.x`.
#[derive(Clone, Debug)]
pub struct SquareIndex {
    xs: Vec<f64>,
    order: Vec<usize>,
    squares: Vec<UnitSquare>,
}

impl SquareIndex {
    pub fn new(squares: &[UnitSquare]) -> Self {
        let mut order: Vec<usize> = (0..squares.len()).collect();
        order.sort_by(|&a, &b| squares[a].x.total_cmp(&squares[b].x));
        Self {
            xs: order.iter().map(|&i| squares[i].x).collect(),
            order,
            squares: squares.to_vec(),
        }
    }

    /// Positions (into the slice given to `new`) of squares containing `p`,
    /// in ascending position order.
    pub fn containing(&self, p: Point) -> Vec<usize> {
        let mut hits: Vec<usize> = self.window(p).filter(|&i| contains(&self.squares[i], p)).collect();
        hits.sort_unstable();
        hits
    }

    pub fn first_containing(&self, p: Point) -> Option<usize> {
        self.window(p).find(|&i| contains(&self.squares[i], p))
    }

    fn window(&self, p: Point) -> impl Iterator<Item = usize> + '_ {
        // widened by a hair so rounding in `p.x - 1` never drops a candidate
        let slack = 1e-9 * (1.0 + p.x.abs());
        let start = self.xs.partition_point(|&x| x < p.x - 1.0 - slack);
        let end = self.xs.partition_point(|&x| x <= p.x + slack);
        self.order[start..end.max(start)].iter().copied()
    }
}
