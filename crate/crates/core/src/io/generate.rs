//! Seeded random instances.
//!
//! The generator is PCG64 (the 128-bit-state XSL-RR 64-bit output variant)
//! seeded with `state = seed` and the fixed stream `0xa02bdbf7bb3c0a7ac28fa16a64abf96`.
//! Every coordinate is an integer number of nanounits drawn as
//! `lo + 1 + next_u64() % (hi - lo - 1)`, i.e. strictly inside `(lo, hi)`,
//! so instances survive the nine-digit text format unchanged. Square
//! corners are drawn on the even nanounits (the draw is over `(lo/2, hi/2)`
//! and doubled), which keeps ply-mode witnesses on the grid too.
//!
//! Draw order: all squares (`x` then `y`), then every point of `P` (square
//! index, then `x`, then `y`), then the witnesses the same way. Squares
//! whose `x` or `y` repeats an earlier one are redrawn, as are points with
//! an integral `y`.

use std::collections::HashSet;

use rand_core::RngCore;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Instance, LineInstance, Point, Side, UnitSquare};
use crate::gmmgsc::{derive_ply_points, InstanceKind, Problem};
use crate::slab_solver::SlabInstance;

const NANO: i64 = 1_000_000_000;
const STREAM: u128 = 0xa02bdbf7bb3c0a7ac28fa16a64abf96;
/// Squares of line and slab instances keep their `y` this far from the
/// neighbouring integers so that each part of the slab has room for points.
const EDGE_MARGIN: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum WitnessMode {
    /// That many witnesses, each uniform inside a uniformly chosen square.
    Count(usize),
    /// One witness per face of the square arrangement.
    Ply,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub m: usize,
    pub n: usize,
    pub witnesses: WitnessMode,
    /// Width of the box the square corners are drawn from.
    pub spread: f64,
    pub seed: u64,
    pub kind: InstanceKind,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            m: 10,
            n: 20,
            witnesses: WitnessMode::Count(20),
            spread: 3.0,
            seed: 0,
            kind: InstanceKind::Global,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(Error::InvalidInstance(format!("spread must be positive, got {}", self.spread)));
        }
        if self.m == 0 && (self.n > 0 || matches!(self.witnesses, WitnessMode::Count(k) if k > 0)) {
            return Err(Error::InvalidInstance("points need at least one square".into()));
        }
        let width = (self.spread * NANO as f64) as i64;
        if (self.m as i64) * 4 > width {
            return Err(Error::InvalidInstance(format!("spread {} is too small for {} squares", self.spread, self.m)));
        }
        Ok(())
    }
}

struct Draw(Pcg64);

impl Draw {
    fn new(seed: u64) -> Self {
        Self(Pcg64::new(seed as u128, STREAM))
    }

    fn index(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    /// Integer strictly between `lo` and `hi`.
    fn open(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(hi - lo >= 2);
        lo + 1 + (self.0.next_u64() % (hi - lo - 1) as u64) as i64
    }
}

/// Cell centres of an even-nanounit grid are whole nanounits at least one
/// nanounit from every edge, so rounding only removes float noise.
fn snap(p: Point) -> Point {
    let r = |v: f64| to_f64((v * NANO as f64).round() as i64);
    Point::new(r(p.x), r(p.y))
}

fn to_f64(nano: i64) -> f64 {
    nano as f64 / NANO as f64
}

/// Square corners in nanounits for each kind.
fn square_range(kind: InstanceKind, width: i64) -> ((i64, i64), (i64, i64)) {
    match kind {
        InstanceKind::Global => ((0, width), (0, width)),
        InstanceKind::Slab => ((0, width), (-NANO + EDGE_MARGIN, NANO - EDGE_MARGIN)),
        InstanceKind::Line => ((0, width), (-NANO + EDGE_MARGIN, -EDGE_MARGIN)),
    }
}

/// Vertical range for points of `P` inside a square with bottom edge `y`.
fn point_y_range(kind: InstanceKind, y: i64) -> (i64, i64) {
    match kind {
        InstanceKind::Global => (y, y + NANO),
        InstanceKind::Slab => (y.max(0), (y + NANO).min(NANO)),
        InstanceKind::Line => (y, 0),
    }
}

/// Generates an instance of `params.kind`. Line instances sit on `y = 0`
/// with points below; slab instances occupy `[0, 1)`.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = Draw::new(params.seed);
    let width = (params.spread * NANO as f64) as i64;
    let ((x_lo, x_hi), (y_lo, y_hi)) = square_range(params.kind, width);

    let (mut xs, mut ys) = (HashSet::new(), HashSet::new());
    let mut corners = Vec::with_capacity(params.m);
    while corners.len() < params.m {
        let x = 2 * rng.open(x_lo / 2, x_hi / 2);
        let y = 2 * rng.open(y_lo / 2, y_hi / 2);
        if y % NANO == 0 || xs.contains(&x) || ys.contains(&y) {
            continue;
        }
        xs.insert(x);
        ys.insert(y);
        corners.push((x, y));
    }

    let inside = |rng: &mut Draw, restrict: bool| loop {
        let (x, y) = corners[rng.index(corners.len())];
        let (lo, hi) = if restrict { point_y_range(params.kind, y) } else { (y, y + NANO) };
        let px = rng.open(x, x + NANO);
        let py = rng.open(lo, hi);
        if !restrict || py % NANO != 0 {
            return Point::new(to_f64(px), to_f64(py));
        }
    };
    let points: Vec<Point> = (0..params.n).map(|_| inside(&mut rng, true)).collect();
    let squares: Vec<UnitSquare> = corners
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| UnitSquare::new(id, to_f64(x), to_f64(y)))
        .collect();
    let witnesses = match params.witnesses {
        WitnessMode::Count(k) => (0..k).map(|_| inside(&mut rng, false)).collect(),
        WitnessMode::Ply => derive_ply_points(&squares).into_iter().map(snap).collect(),
    };
    Ok(Instance::new(points, witnesses, squares))
}

/// Like [`generate_instance`], wrapped with the line or slab it was built on.
pub fn generate_problem(params: &GeneratorParams) -> Result<Problem> {
    let inst = generate_instance(params)?;
    Ok(match params.kind {
        InstanceKind::Global => Problem::Global(inst),
        InstanceKind::Slab => Problem::Slab(SlabInstance::new(inst, 0.0)?),
        InstanceKind::Line => Problem::Line(LineInstance::new(inst, 0.0, Side::Below)?),
    })
}
