//! Slab instances: split by the LP relaxation into two line instances,
//! solve each with the swap algorithm, and merge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Instance, LineInstance, Side, SquareId, UnitSquare};
use crate::line_solver::{remove_redundancy_ordered, solve_line, LineSolution};
use crate::lp::{build_slab_lp, partition_points, solve_decomposed, LpSolution, LpStatus, PointPartition};
use crate::par;
use crate::SolveOptions;

/// Points inside the half-open slab `[y_bottom, y_bottom + 1)`; every
/// square meets the bottom line `L1` or the top line `L2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabInstance {
    pub base: Instance,
    pub y_bottom: f64,
}

impl SlabInstance {
    pub fn new(base: Instance, y_bottom: f64) -> Result<Self> {
        let y_top = y_bottom + 1.0;
        if let Some(p) = base.points.iter().find(|p| !(y_bottom <= p.y && p.y < y_top)) {
            return Err(Error::InvalidInstance(format!(
                "point ({}, {}) lies outside the slab [{y_bottom}, {y_top})",
                p.x, p.y
            )));
        }
        if let Some(s) = base.squares.iter().find(|s| !(s.crosses_line(y_bottom) || s.crosses_line(y_top))) {
            return Err(Error::InvalidInstance(format!(
                "square {} meets neither slab boundary",
                s.id
            )));
        }
        Ok(Self { base, y_bottom })
    }

    pub fn y_top(&self) -> f64 {
        self.y_bottom + 1.0
    }

    /// Places the slab at `floor(min p.y)` if that is consistent with the
    /// squares, falling back to `min p.y`.
    pub fn infer(base: Instance) -> Result<Self> {
        let min_py = base.points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        if !min_py.is_finite() {
            let y_bottom = base.squares.iter().map(|s| s.top()).fold(f64::INFINITY, f64::min);
            return Self::new(base, if y_bottom.is_finite() { y_bottom } else { 0.0 });
        }
        match Self::new(base.clone(), min_py.floor()) {
            Ok(slab) => Ok(slab),
            Err(_) => Self::new(base, min_py),
        }
    }
}

/// `S1` holds the squares meeting `L1` (`y(s) ∈ [y_bottom - 1, y_bottom]`,
/// so a square touching both lines goes here); `S2` holds the rest.
pub fn split_squares(inst: &SlabInstance) -> (Vec<UnitSquare>, Vec<UnitSquare>) {
    inst.base
        .squares
        .iter()
        .partition(|s| s.y >= inst.y_bottom - 1.0 && s.y <= inst.y_bottom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabSolution {
    /// Final cover in ascending id order.
    pub squares: Vec<UnitSquare>,
    pub lp: LpSolution,
    pub partition: PointPartition,
    /// Line instance on `L1` with the points of `P1` above it.
    pub bottom_instance: LineInstance,
    pub bottom: LineSolution,
    /// Line instance on `L2` with the points of `P2` below it.
    pub top_instance: LineInstance,
    pub top: LineSolution,
    /// Squares dropped by the redundancy pass after the union.
    pub merged_away: Vec<SquareId>,
}

/// Solves the relaxation and forms the two line instances.
pub fn decompose(inst: &SlabInstance, opts: &SolveOptions) -> Result<(LpSolution, PointPartition, LineInstance, LineInstance)> {
    let lp = build_slab_lp(&inst.base)?;
    let lp_solution = solve_decomposed(&lp, opts.execution)?;
    if lp_solution.status == LpStatus::Infeasible {
        return Err(Error::InvalidInstance("slab relaxation is infeasible".into()));
    }
    let (s1, s2) = split_squares(inst);
    let partition = partition_points(&inst.base, &s1, &s2, &lp_solution);
    let witnesses = &inst.base.witnesses;
    let bottom = LineInstance::new(
        Instance::new(partition.p1.clone(), witnesses.clone(), s1),
        inst.y_bottom,
        Side::Above,
    )?;
    let top = LineInstance::new(
        Instance::new(partition.p2.clone(), witnesses.clone(), s2),
        inst.y_top(),
        Side::Below,
    )?;
    Ok((lp_solution, partition, bottom, top))
}

pub fn solve_slab_detailed(inst: &SlabInstance, opts: &SolveOptions) -> Result<SlabSolution> {
    inst.base.validate(opts.strictness)?;
    let (lp, partition, bottom_instance, top_instance) = decompose(inst, opts)?;
    let lines = [&bottom_instance, &top_instance];
    let mut solved = par::map(opts.execution, &lines, |li| solve_line(li, opts.strictness)).into_iter();
    let bottom = solved.next().expect("two line results")?;
    let top = solved.next().expect("two line results")?;

    let union: Vec<UnitSquare> = bottom.squares.iter().chain(&top.squares).copied().collect();
    let order: Vec<SquareId> = top.ids().into_iter().chain(bottom.ids()).collect();
    let squares = remove_redundancy_ordered(&inst.base.points, &union, &order)?;
    let merged_away = order
        .iter()
        .copied()
        .filter(|id| !squares.iter().any(|s| s.id == *id))
        .collect();
    Ok(SlabSolution {
        squares,
        lp,
        partition,
        bottom_instance,
        bottom,
        top_instance,
        top,
        merged_away,
    })
}

pub fn solve_slab(inst: &SlabInstance, opts: &SolveOptions) -> Result<Vec<UnitSquare>> {
    solve_slab_detailed(inst, opts).map(|s| s.squares)
}
