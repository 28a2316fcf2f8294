//! SVG drawings of instances and covers.

use std::fmt::Write;

use crate::geometry::{Instance, Point, UnitSquare};

/// Pixels per unit.
pub const SCALE: f64 = 100.0;
const MARGIN: f64 = 0.5;
const DOT_RADIUS: f64 = 0.04;
const CROSS_HALF: f64 = 0.05;

fn bounds(inst: &Instance) -> Option<(f64, f64, f64, f64)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &inst.squares {
        xs.extend([s.x, s.right()]);
        ys.extend([s.y, s.top()]);
    }
    for p in inst.points.iter().chain(&inst.witnesses) {
        xs.push(p.x);
        ys.push(p.y);
    }
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (!xs.is_empty()).then(|| (lo(&xs), hi(&xs), lo(&ys), hi(&ys)))
}

fn rect(out: &mut String, s: &UnitSquare) {
    let _ = writeln!(
        out,
        r#"      <rect data-id="{}" x="{}" y="{}" width="1" height="1"/>"#,
        s.id, s.x, s.y
    );
}

fn cross(out: &mut String, p: Point) {
    let d = CROSS_HALF;
    let _ = writeln!(
        out,
        r#"      <path d="M{} {} L{} {} M{} {} L{} {}"/>"#,
        p.x - d,
        p.y - d,
        p.x + d,
        p.y + d,
        p.x - d,
        p.y + d,
        p.x + d,
        p.y - d
    );
}

/// Standalone SVG with the y axis pointing up at [`SCALE`] pixels per unit.
///
/// Input squares are outlined, cover squares filled translucently, points of
/// `P` drawn as dots, witnesses as crosses, and every integer `y` crossing a
/// square as a dashed slab line.
pub fn render_svg(inst: &Instance, sol: Option<&[UnitSquare]>) -> String {
    let (x0, x1, y0, y1) = bounds(inst)
        .map(|(a, b, c, d)| (a - MARGIN, b + MARGIN, c - MARGIN, d + MARGIN))
        .unwrap_or((0.0, 1.0, 0.0, 1.0));
    let (w, h) = ((x1 - x0) * SCALE, (y1 - y0) * SCALE);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"  <g id="canvas" transform="matrix({SCALE} 0 0 {} {} {})">"#,
        -SCALE,
        -x0 * SCALE,
        y1 * SCALE
    );

    let y_lo = inst.squares.iter().map(|s| s.y).fold(f64::INFINITY, f64::min).ceil();
    let y_hi = inst.squares.iter().map(|s| s.top()).fold(f64::NEG_INFINITY, f64::max).floor();
    if y_lo <= y_hi {
        let _ = writeln!(
            out,
            r##"    <g id="slab-lines" stroke="#888888" stroke-dasharray="6 4" vector-effect="non-scaling-stroke">"##
        );
        let mut k = y_lo;
        while k <= y_hi {
            let _ = writeln!(out, r#"      <line x1="{x0}" y1="{k}" x2="{x1}" y2="{k}" vector-effect="non-scaling-stroke"/>"#);
            k += 1.0;
        }
        let _ = writeln!(out, "    </g>");
    }
    if !inst.squares.is_empty() {
        let _ = writeln!(
            out,
            r##"    <g id="squares" fill="none" stroke="#333333" stroke-width="1" vector-effect="non-scaling-stroke">"##
        );
        for s in &inst.squares {
            rect(&mut out, s);
        }
        let _ = writeln!(out, "    </g>");
    }
    if let Some(sol) = sol.filter(|s| !s.is_empty()) {
        let _ = writeln!(
            out,
            r##"    <g id="solution" fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4">"##
        );
        for s in sol {
            rect(&mut out, s);
        }
        let _ = writeln!(out, "    </g>");
    }
    if !inst.points.is_empty() {
        let _ = writeln!(out, r##"    <g id="points" fill="#d62728">"##);
        for p in &inst.points {
            let _ = writeln!(out, r#"      <circle cx="{}" cy="{}" r="{DOT_RADIUS}"/>"#, p.x, p.y);
        }
        let _ = writeln!(out, "    </g>");
    }
    if !inst.witnesses.is_empty() {
        let _ = writeln!(
            out,
            r##"    <g id="witnesses" fill="none" stroke="#2ca02c" stroke-width="0.02">"##
        );
        for &p in &inst.witnesses {
            cross(&mut out, p);
        }
        let _ = writeln!(out, "    </g>");
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    out
}
