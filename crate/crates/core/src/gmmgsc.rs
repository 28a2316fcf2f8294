//! Whole-plane pipeline: cut into unit-height slabs at integer y, solve each
//! slab, and take the union. Also derives minimum-ply witnesses from the
//! square arrangement.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Instance, LineInstance, Point, SquareId, UnitSquare};
use crate::line_solver::solve_line;
use crate::par;
use crate::slab_solver::{solve_slab, solve_slab_detailed, SlabInstance, SlabSolution};
use crate::SolveOptions;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    #[default]
    Global,
    Slab,
    Line,
}

impl std::str::FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "global" => Ok(Self::Global),
            "slab" => Ok(Self::Slab),
            "line" => Ok(Self::Line),
            other => Err(format!("unknown instance kind `{other}` (expected global, slab or line)")),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Global => "global",
            Self::Slab => "slab",
            Self::Line => "line",
        })
    }
}

/// An instance tagged with the structure the solver may rely on.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Global(Instance),
    Slab(SlabInstance),
    Line(LineInstance),
}

impl Problem {
    /// Interprets `inst` as `kind`, locating the slab or line if needed.
    pub fn from_instance(inst: Instance, kind: InstanceKind) -> Result<Self> {
        Ok(match kind {
            InstanceKind::Global => Problem::Global(inst),
            InstanceKind::Slab => Problem::Slab(SlabInstance::infer(inst)?),
            InstanceKind::Line => Problem::Line(LineInstance::infer(inst)?),
        })
    }

    pub fn instance(&self) -> &Instance {
        match self {
            Problem::Global(i) => i,
            Problem::Slab(s) => &s.base,
            Problem::Line(l) => &l.base,
        }
    }

    pub fn kind(&self) -> InstanceKind {
        match self {
            Problem::Global(_) => InstanceKind::Global,
            Problem::Slab(_) => InstanceKind::Slab,
            Problem::Line(_) => InstanceKind::Line,
        }
    }

    pub fn solve(&self, opts: &SolveOptions) -> Result<Vec<UnitSquare>> {
        match self {
            Problem::Global(i) => solve(i, opts),
            Problem::Slab(s) => solve_slab(s, opts),
            Problem::Line(l) => solve_line(l, opts.strictness).map(|s| s.squares),
        }
    }

    /// Replaces the witnesses with one point per arrangement face.
    pub fn with_ply_witnesses(mut self) -> Self {
        let inst = match &mut self {
            Problem::Global(i) => i,
            Problem::Slab(s) => &mut s.base,
            Problem::Line(l) => &mut l.base,
        };
        inst.witnesses = derive_ply_points(&inst.squares);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalSolution {
    /// Union of the slab covers, ascending id.
    pub squares: Vec<UnitSquare>,
    /// Per non-empty slab `[k, k + 1)`, ascending `k`.
    pub slabs: Vec<(i64, SlabSolution)>,
}

impl GlobalSolution {
    pub fn ids(&self) -> Vec<SquareId> {
        self.squares.iter().map(|s| s.id).collect()
    }

    pub fn max_swaps_per_line(&self) -> usize {
        self.slabs
            .iter()
            .flat_map(|(_, s)| [s.bottom.trace.len(), s.top.trace.len()])
            .max()
            .unwrap_or(0)
    }
}

fn is_integral(v: f64) -> bool {
    v.fract() == 0.0
}

/// Rejects inputs whose square edges or points sit on the integer slab lines.
pub fn check_slab_alignment(inst: &Instance) -> Result<()> {
    if let Some(s) = inst.squares.iter().find(|s| is_integral(s.y)) {
        return Err(Error::DegenerateInstance(format!(
            "square {} has integral y = {}",
            s.id, s.y
        )));
    }
    if let Some(p) = inst.points.iter().find(|p| is_integral(p.y)) {
        return Err(Error::DegenerateInstance(format!(
            "point ({}, {}) lies on a slab boundary",
            p.x, p.y
        )));
    }
    Ok(())
}

/// The slab instances of `inst`: for every `k` with a point in `[k, k + 1)`,
/// those points plus every square meeting the closed slab.
pub fn slab_instances(inst: &Instance) -> Vec<(i64, SlabInstance)> {
    let mut rows: BTreeMap<i64, Vec<Point>> = BTreeMap::new();
    for &p in &inst.points {
        rows.entry(p.y.floor() as i64).or_default().push(p);
    }
    rows.into_iter()
        .map(|(k, points)| {
            let lo = k as f64;
            let squares = inst
                .squares
                .iter()
                .copied()
                .filter(|s| s.y >= lo - 1.0 && s.y <= lo + 1.0)
                .collect();
            let base = Instance::new(points, inst.witnesses.clone(), squares);
            (k, SlabInstance { base, y_bottom: lo })
        })
        .collect()
}

pub fn solve_detailed(inst: &Instance, opts: &SolveOptions) -> Result<GlobalSolution> {
    inst.validate(opts.strictness)?;
    if opts.strictness.is_strict() {
        check_slab_alignment(inst)?;
    }
    let slabs = slab_instances(inst);
    let solved = par::map(opts.execution, &slabs, |(_, slab)| solve_slab_detailed(slab, opts));
    let mut ids = BTreeSet::new();
    let mut out = Vec::with_capacity(slabs.len());
    for ((k, _), result) in slabs.iter().zip(solved) {
        let sol = result?;
        ids.extend(sol.squares.iter().map(|s| s.id));
        out.push((*k, sol));
    }
    let squares = inst.squares.iter().copied().filter(|s| ids.contains(&s.id)).collect::<Vec<_>>();
    let mut squares = squares;
    squares.sort_by_key(|s| s.id);
    Ok(GlobalSolution { squares, slabs: out })
}

pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<Vec<UnitSquare>> {
    solve_detailed(inst, opts).map(|s| s.squares)
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Witnesses for the faces of the arrangement of `squares`.
///
/// Every face is a union of cells of the grid spanned by all square edges,
/// and all cells of a face share one covering set. Cell centres are scanned
/// bottom row first, left to right; the first centre seen for each distinct
/// non-empty covering set is emitted.
pub fn derive_ply_points(squares: &[UnitSquare]) -> Vec<Point> {
    let xs = sorted_unique(squares.iter().flat_map(|s| [s.x, s.right()]).collect());
    let ys = sorted_unique(squares.iter().flat_map(|s| [s.y, s.top()]).collect());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for yw in ys.windows(2) {
        for xw in xs.windows(2) {
            let c = Point::new((xw[0] + xw[1]) / 2.0, (yw[0] + yw[1]) / 2.0);
            let cover: Vec<usize> = (0..squares.len()).filter(|&i| squares[i].contains(c)).collect();
            if !cover.is_empty() && seen.insert(cover) {
                out.push(c);
            }
        }
    }
    out
}
