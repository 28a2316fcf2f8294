//! Exact solvers and end-to-end verifiers for small instances.
//!
//! Everything here is exponential in the number of squares and meant for
//! cross-checking the approximation pipeline on desk-scale inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clique::leftmost_maximum_clique;
use crate::error::{Error, Result};
use crate::geometry::{
    coverage_gaps, membership, Instance, LineInstance, Point, Side, SquareId, UnitSquare,
};
use crate::gmmgsc::{slab_instances, GlobalSolution, InstanceKind, Problem};
use crate::line_solver::{check_key_lemma, line_clique_types, LineSolution, SwapCandidate};
use crate::slab_solver::{split_squares, SlabInstance};

pub const DEFAULT_MAX_M: usize = 15;

/// Optimal membership value and one cover attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub opt: usize,
    pub witness: Vec<UnitSquare>,
}

/// Bitmask incidence of a small instance.
struct Masks {
    /// Per point of `P`: squares containing it.
    cover: Vec<u64>,
    /// Per witness: squares containing it.
    memb: Vec<u64>,
}

impl Masks {
    fn new(inst: &Instance, max_m: usize) -> Result<Self> {
        let m = inst.squares.len();
        if m > max_m || m > 63 {
            return Err(Error::TooLarge { m, max_m: max_m.min(63) });
        }
        let mask_of = |p: Point| {
            inst.squares
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains(p))
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        };
        let cover: Vec<u64> = inst.points.iter().map(|&p| mask_of(p)).collect();
        let uncovered: Vec<Point> = inst
            .points
            .iter()
            .zip(&cover)
            .filter(|(_, &c)| c == 0)
            .map(|(&p, _)| p)
            .collect();
        if !uncovered.is_empty() {
            return Err(Error::InfeasibleInput { uncovered });
        }
        let memb = inst.witnesses.iter().map(|&p| mask_of(p)).collect();
        Ok(Self { cover, memb })
    }

    fn membership(&self, set: u64) -> usize {
        self.memb.iter().map(|w| (w & set).count_ones() as usize).max().unwrap_or(0)
    }

    fn covers(&self, set: u64) -> bool {
        self.cover.iter().all(|c| c & set != 0)
    }
}

fn squares_of(inst: &Instance, set: u64) -> Vec<UnitSquare> {
    let mut out: Vec<UnitSquare> = inst
        .squares
        .iter()
        .enumerate()
        .filter(|(i, _)| set >> i & 1 == 1)
        .map(|(_, s)| *s)
        .collect();
    out.sort_by_key(|s| s.id);
    out
}

/// Exact minimum membership by iterative deepening on the membership value.
///
/// For `k = 0, 1, ...` a depth-first search looks for a cover whose
/// membership is at most `k`, always branching on the uncovered point with
/// the fewest admissible squares.
pub fn exact_min_membership(inst: &Instance, max_m: usize) -> Result<ExactSolution> {
    let masks = Masks::new(inst, max_m)?;
    let m = inst.squares.len();
    for k in 0..=m {
        let mut counts = vec![0usize; masks.memb.len()];
        if let Some(set) = dfs(&masks, m, k, 0, 0, &mut counts) {
            return Ok(ExactSolution { opt: masks.membership(set), witness: squares_of(inst, set) });
        }
    }
    unreachable!("choosing every square is a cover")
}

fn dfs(masks: &Masks, m: usize, k: usize, chosen: u64, banned: u64, counts: &mut [usize]) -> Option<u64> {
    let admissible = |i: usize| {
        let bit = 1u64 << i;
        (chosen | banned) & bit == 0 && masks.memb.iter().zip(counts.iter()).all(|(w, &c)| w & bit == 0 || c < k)
    };
    let mut best: Option<Vec<usize>> = None;
    for &c in &masks.cover {
        if c & chosen != 0 {
            continue;
        }
        let cand: Vec<usize> = (0..m).filter(|&i| c >> i & 1 == 1 && admissible(i)).collect();
        if cand.is_empty() {
            return None;
        }
        if best.as_ref().is_none_or(|b| cand.len() < b.len()) {
            best = Some(cand);
        }
    }
    let Some(cand) = best else {
        return Some(chosen);
    };
    let mut banned = banned;
    for i in cand {
        let bit = 1u64 << i;
        for (w, c) in masks.memb.iter().zip(counts.iter_mut()) {
            if w & bit != 0 {
                *c += 1;
            }
        }
        let found = dfs(masks, m, k, chosen | bit, banned, counts);
        for (w, c) in masks.memb.iter().zip(counts.iter_mut()) {
            if w & bit != 0 {
                *c -= 1;
            }
        }
        if found.is_some() {
            return found;
        }
        banned |= bit;
    }
    None
}

/// Exact minimum membership by scanning all `2^m` subsets. Among optimal
/// covers the one with the smallest bitmask over input order is returned.
pub fn exact_min_membership_enumerate(inst: &Instance, max_m: usize) -> Result<ExactSolution> {
    let masks = Masks::new(inst, max_m)?;
    let m = inst.squares.len();
    let mut best: Option<(usize, u64)> = None;
    for set in 0..(1u64 << m) {
        if !masks.covers(set) {
            continue;
        }
        let v = masks.membership(set);
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, set));
        }
    }
    let (opt, set) = best.expect("full set covers");
    Ok(ExactSolution { opt, witness: squares_of(inst, set) })
}

/// Largest number of squares of `sol` sharing a common point, by checking
/// every subset. Unit squares share a point iff their x and y spans both
/// stay within one unit.
pub fn geometric_ply(sol: &[UnitSquare]) -> usize {
    assert!(sol.len() < 32, "geometric_ply is exponential in |sol|");
    let mut best = 0;
    for set in 1u32..(1u32 << sol.len()) {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members = sol.iter().enumerate().filter(|(i, _)| set >> i & 1 == 1).map(|(_, s)| s);
        let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for s in members {
            x_lo = x_lo.min(s.x);
            x_hi = x_hi.max(s.x);
            y_lo = y_lo.min(s.y);
            y_hi = y_hi.max(s.y);
        }
        if x_hi - x_lo <= 1.0 && y_hi - y_lo <= 1.0 {
            best = size;
        }
    }
    best
}

/// Looks for a profitable swap on the leftmost maximum clique of `sol` by
/// trying every consecutive run of at least two clique squares against every
/// unused square and testing coverage of `P` directly.
pub fn has_profitable_swap_exhaustive(inst: &LineInstance, sol: &[UnitSquare]) -> Option<SwapCandidate> {
    let q = leftmost_maximum_clique(sol, &inst.base.witnesses)?;
    let k = q.squares.len();
    let mut unused: Vec<&UnitSquare> = inst.base.squares.iter().filter(|t| !sol.iter().any(|s| s.id == t.id)).collect();
    unused.sort_by_key(|t| t.id);
    for len in (2..=k).rev() {
        for i in 0..=k - len {
            let run = &q.squares[i..i + len];
            for &t in &unused {
                let mut next: Vec<UnitSquare> = sol.iter().filter(|s| !run.iter().any(|r| r.id == s.id)).copied().collect();
                next.push(*t);
                if coverage_gaps(&inst.base.points, &next).is_empty() {
                    return Some(SwapCandidate { removed: run.to_vec(), added: *t });
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub feasible: bool,
    pub membership_value: usize,
    pub redundant_squares: Vec<SquareId>,
    pub swap_free: bool,
    pub key_lemma_ok: bool,
    pub clique_types_legal: bool,
    pub opt: Option<usize>,
    pub bound_slack: Option<f64>,
}

/// Guaranteed approximation bound for an instance of `kind` with optimum `opt`.
pub fn approximation_bound(kind: InstanceKind, opt: usize) -> usize {
    match kind {
        InstanceKind::Global => 16 * opt + 36,
        InstanceKind::Slab => 8 * opt + 18,
        InstanceKind::Line => 4 * opt + 9,
    }
}

/// Squares of `sol` that have no exclusive point, ascending id.
pub fn redundant_squares(points: &[Point], sol: &[UnitSquare]) -> Vec<SquareId> {
    let mut exclusive = vec![false; sol.len()];
    for &p in points {
        let mut holders = sol.iter().enumerate().filter(|(_, s)| s.contains(p)).map(|(i, _)| i);
        if let (Some(i), None) = (holders.next(), holders.next()) {
            exclusive[i] = true;
        }
    }
    let mut ids: Vec<SquareId> = sol.iter().zip(&exclusive).filter(|(_, &e)| !e).map(|(s, _)| s.id).collect();
    ids.sort_unstable();
    ids
}

/// Line subproblems a solution of `problem` restricts to: for each slab
/// part, the squares of that part in `sol` together with the points they
/// cover.
pub fn line_subproblems(problem: &Problem, sol: &[UnitSquare]) -> Vec<(LineInstance, Vec<UnitSquare>)> {
    match problem {
        Problem::Line(l) => vec![(l.clone(), sol.to_vec())],
        Problem::Slab(s) => slab_subproblems(s, sol),
        Problem::Global(g) => slab_instances(g)
            .into_iter()
            .flat_map(|(_, slab)| slab_subproblems(&slab, sol))
            .collect(),
    }
}

fn slab_subproblems(slab: &SlabInstance, sol: &[UnitSquare]) -> Vec<(LineInstance, Vec<UnitSquare>)> {
    let (s1, s2) = split_squares(slab);
    [(s1, slab.y_bottom, Side::Above), (s2, slab.y_top(), Side::Below)]
        .into_iter()
        .filter_map(|(part, line_y, side)| {
            let chosen: Vec<UnitSquare> = sol.iter().filter(|s| part.iter().any(|t| t.id == s.id)).copied().collect();
            let points: Vec<Point> = slab.base.points.iter().copied().filter(|&p| chosen.iter().any(|s| s.contains(p))).collect();
            let base = Instance::new(points, slab.base.witnesses.clone(), part);
            LineInstance::new(base, line_y, side).ok().map(|li| (li, chosen))
        })
        .collect()
}

/// Checks a proposed cover of `problem`. Structural checks run on every
/// line subproblem; with `with_oracle` and at most [`DEFAULT_MAX_M`] squares
/// the optimum and the slack to the guaranteed bound are filled in.
///
/// For global problems the cover is cut along slab parts only, so squares
/// a neighbouring slab contributed take part in each slab's checks. Use
/// [`verify_global_solution`] when the per-slab covers are known.
pub fn verify(problem: &Problem, sol: &[UnitSquare], with_oracle: bool) -> VerificationReport {
    verify_parts(problem, sol, line_subproblems(problem, sol), with_oracle)
}

/// Like [`verify`] for the pipeline's own output, running the structural
/// checks on each slab's cover rather than on the union.
pub fn verify_global_solution(inst: &Instance, sol: &GlobalSolution, with_oracle: bool) -> VerificationReport {
    let covers: BTreeMap<i64, &[UnitSquare]> = sol.slabs.iter().map(|(k, s)| (*k, s.squares.as_slice())).collect();
    let parts = slab_instances(inst)
        .into_iter()
        .flat_map(|(k, slab)| slab_subproblems(&slab, covers.get(&k).copied().unwrap_or(&[])))
        .collect();
    verify_parts(&Problem::Global(inst.clone()), &sol.squares, parts, with_oracle)
}

fn verify_parts(
    problem: &Problem,
    sol: &[UnitSquare],
    parts: Vec<(LineInstance, Vec<UnitSquare>)>,
    with_oracle: bool,
) -> VerificationReport {
    let inst = problem.instance();
    let feasible = coverage_gaps(&inst.points, sol).is_empty();
    let membership_value = membership(&inst.witnesses, sol);
    let redundant = redundant_squares(&inst.points, sol);

    let (mut swap_free, mut key_lemma_ok, mut clique_types_legal) = (true, true, true);
    for (line, chosen) in parts {
        swap_free &= has_profitable_swap_exhaustive(&line, &chosen).is_none();
        let as_solution = LineSolution { squares: chosen.clone(), trace: Vec::new() };
        key_lemma_ok &= check_key_lemma(&line, &as_solution);
        clique_types_legal &= line_clique_types(&line, &chosen).iter().all(|t| t.kind.is_legal());
    }

    let opt = if with_oracle {
        exact_min_membership(inst, DEFAULT_MAX_M).ok().map(|e| e.opt)
    } else {
        None
    };
    let bound_slack = opt.map(|o| approximation_bound(problem.kind(), o) as f64 - membership_value as f64);
    VerificationReport {
        feasible,
        membership_value,
        redundant_squares: redundant,
        swap_free,
        key_lemma_ok,
        clique_types_legal,
        opt,
        bound_slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_solver::solve_line;
    use crate::{SolveOptions, Strictness};

    fn sq(id: usize, x: f64, y: f64) -> UnitSquare {
        UnitSquare::new(id, x, y)
    }

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn exact_examples() {
        let one = Instance::new(vec![pt(0.5, 0.5)], vec![pt(0.5, 0.5)], vec![sq(0, 0.0, 0.0)]);
        assert_eq!(exact_min_membership(&one, DEFAULT_MAX_M).unwrap().opt, 1);

        // two points each covered by one square only; both squares hold p'
        let forced = Instance::new(
            vec![pt(0.1, 0.1), pt(1.4, 1.3)],
            vec![pt(0.8, 0.9)],
            vec![sq(0, 0.0, 0.0), sq(1, 0.5, 0.6)],
        );
        let e = exact_min_membership(&forced, DEFAULT_MAX_M).unwrap();
        assert_eq!(e.opt, 2);
        assert_eq!(e.witness.len(), 2);

        let vacuous = Instance::new(vec![pt(0.5, 0.5)], vec![], vec![sq(0, 0.0, 0.0), sq(1, 0.2, 0.1)]);
        let e = exact_min_membership(&vacuous, DEFAULT_MAX_M).unwrap();
        assert_eq!(e.opt, 0);
        assert!(coverage_gaps(&vacuous.points, &e.witness).is_empty());
    }

    #[test]
    fn oracle_errors() {
        let squares: Vec<UnitSquare> = (0..16).map(|i| sq(i, i as f64 * 0.1, i as f64 * 0.01)).collect();
        let big = Instance::new(vec![pt(0.5, 0.5)], vec![], squares);
        assert!(matches!(exact_min_membership(&big, DEFAULT_MAX_M), Err(Error::TooLarge { m: 16, .. })));
        let bad = Instance::new(vec![pt(5.0, 5.0)], vec![], vec![sq(0, 0.0, 0.0)]);
        assert!(matches!(exact_min_membership(&bad, DEFAULT_MAX_M), Err(Error::InfeasibleInput { .. })));
        assert!(matches!(exact_min_membership_enumerate(&bad, DEFAULT_MAX_M), Err(Error::InfeasibleInput { .. })));
    }

    #[test]
    fn ply_oracle() {
        assert_eq!(geometric_ply(&[]), 0);
        assert_eq!(geometric_ply(&[sq(0, 0.0, 0.0), sq(1, 0.5, 0.5), sq(2, 1.2, 0.0)]), 2);
        assert_eq!(geometric_ply(&[sq(0, 0.0, 0.0), sq(1, 1.0, 1.0)]), 2);
    }

    #[test]
    fn verify_examples() {
        let squares = vec![sq(0, 0.0, -0.6), sq(1, 0.5, -0.3), sq(2, 1.2, -0.8)];
        let points = vec![pt(0.2, -0.5), pt(1.3, -0.1), pt(2.1, -0.7)];
        let base = Instance::new(points, vec![pt(1.3, -0.2)], squares.clone());
        let line = LineInstance::new(base, 0.0, Side::Below).unwrap();
        let sol = solve_line(&line, Strictness::Strict).unwrap();
        let problem = Problem::Line(line);
        let r = verify(&problem, &sol.squares, true);
        assert!(r.feasible && r.swap_free && r.key_lemma_ok && r.clique_types_legal);
        assert!(r.redundant_squares.is_empty());
        assert_eq!(r.bound_slack.is_some(), r.opt.is_some());

        let empty = verify(&problem, &[], false);
        assert!(!empty.feasible);
        assert_eq!(empty.opt, None);
        assert_eq!(empty.bound_slack, None);

        let mut padded = sol.squares.clone();
        let extra = squares.iter().find(|s| !padded.contains(s)).copied().unwrap();
        padded.push(extra);
        let r = verify(&problem, &padded, false);
        assert!(r.redundant_squares.contains(&extra.id));
    }

    #[test]
    fn verify_accepts_slab_pipeline_output() {
        let squares = vec![sq(0, 0.0, -0.6), sq(1, 0.5, -0.3), sq(2, 0.2, 0.4), sq(3, 1.3, 0.7)];
        let points = vec![pt(0.3, 0.2), pt(0.9, 0.35), pt(1.1, 0.8), pt(2.0, 0.9)];
        let base = Instance::new(points, vec![pt(0.9, 0.5)], squares);
        let problem = Problem::Slab(SlabInstance::new(base, 0.0).unwrap());
        let sol = problem.solve(&SolveOptions::default()).unwrap();
        let r = verify(&problem, &sol, true);
        assert!(r.feasible && r.swap_free && r.key_lemma_ok && r.clique_types_legal);
        assert!(r.bound_slack.unwrap() >= 0.0);
    }
}
