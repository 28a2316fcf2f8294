//! Swap-based local search for line instances.
//!
//! Starting from a redundancy-free cover, the solver repeatedly replaces two
//! or more consecutive squares of the leftmost maximum clique by a single
//! unused square, as long as the cover stays feasible. Each swap shrinks the
//! cover by at least one square, so at most `m` swaps are applied.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::clique::{classify_clique, discrete_cliques, leftmost_maximum_clique, Clique, CliqueType};
use crate::error::{Error, Result};
use crate::geometry::{
    canonicalize_line_instance, coverage_gaps, LineInstance, Point,
    SquareId, SquareIndex, Strictness, UnitSquare,
};

/// Replace `removed` (consecutive squares of the leftmost maximum clique) by
/// `added`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapCandidate {
    pub removed: Vec<UnitSquare>,
    pub added: UnitSquare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSolution {
    /// Chosen squares in ascending id order, in the instance's own orientation.
    pub squares: Vec<UnitSquare>,
    /// Swaps in the order they were applied.
    pub trace: Vec<SwapCandidate>,
}

impl LineSolution {
    pub fn ids(&self) -> Vec<SquareId> {
        self.squares.iter().map(|s| s.id).collect()
    }
}

/// Containment incidence between a fixed square list and a point list.
struct Incidence {
    /// Per point: positions of squares containing it, ascending.
    point_cover: Vec<Vec<usize>>,
    /// Per square: points it contains.
    square_points: Vec<Vec<usize>>,
    /// Square positions sorted by id.
    by_id: Vec<usize>,
    position_of: HashMap<SquareId, usize>,
}

impl Incidence {
    fn new(squares: &[UnitSquare], points: &[Point]) -> Self {
        let index = SquareIndex::new(squares);
        let point_cover: Vec<Vec<usize>> = points.iter().map(|&p| index.containing(p)).collect();
        let mut square_points = vec![Vec::new(); squares.len()];
        for (p, cover) in point_cover.iter().enumerate() {
            for &s in cover {
                square_points[s].push(p);
            }
        }
        let mut by_id: Vec<usize> = (0..squares.len()).collect();
        by_id.sort_by_key(|&i| squares[i].id);
        let position_of = squares.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        Self {
            point_cover,
            square_points,
            by_id,
            position_of,
        }
    }

    fn positions(&self, sol: &[UnitSquare]) -> Result<Vec<bool>> {
        let mut in_sol = vec![false; self.square_points.len()];
        for s in sol {
            let &pos = self.position_of.get(&s.id).ok_or_else(|| {
                Error::InvalidInstance(format!("square {} is not part of the instance", s.id))
            })?;
            in_sol[pos] = true;
        }
        Ok(in_sol)
    }

    fn uncovered(&self, in_sol: &[bool]) -> Vec<usize> {
        (0..self.point_cover.len())
            .filter(|&p| !self.point_cover[p].iter().any(|&s| in_sol[s]))
            .collect()
    }

    /// Greedy removal of squares with no exclusive point, examining squares
    /// in `order` (positions).
    fn remove_redundancy(&self, in_sol: &mut [bool], order: &[usize]) {
        let mut count: Vec<usize> = self
            .point_cover
            .iter()
            .map(|cover| cover.iter().filter(|&&s| in_sol[s]).count())
            .collect();
        for &s in order {
            if !in_sol[s] {
                continue;
            }
            if self.square_points[s].iter().all(|&p| count[p] != 1) {
                in_sol[s] = false;
                for &p in &self.square_points[s] {
                    count[p] -= 1;
                }
            }
        }
    }

    /// Search for a profitable swap on clique `q`. Returns the run of clique
    /// positions `[i, j]` and the position of the incoming square.
    fn find_swap(&self, in_sol: &[bool], q: &Clique) -> Option<(usize, usize, usize)> {
        let k = q.len();
        if k < 2 {
            return None;
        }
        let mut rank: HashMap<usize, usize> = HashMap::with_capacity(k);
        for (r, s) in q.squares.iter().enumerate() {
            rank.insert(self.position_of[&s.id], r);
        }
        // Points whose whole cover lies inside q, with the span of clique
        // ranks covering them. Removing a run [i, j] uncovers exactly the
        // points with i <= lo and hi <= j.
        let mut critical: Vec<(usize, usize, usize)> = Vec::new();
        for (p, cover) in self.point_cover.iter().enumerate() {
            let mut lo = usize::MAX;
            let mut hi = 0;
            let mut inside = true;
            for &s in cover.iter().filter(|&&s| in_sol[s]) {
                match rank.get(&s) {
                    Some(&r) => {
                        lo = lo.min(r);
                        hi = hi.max(r);
                    }
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if inside && lo != usize::MAX {
                critical.push((p, lo, hi));
            }
        }

        let mut min_hi_at = vec![k; k + 1];
        for &t in &self.by_id {
            if in_sol[t] {
                continue;
            }
            min_hi_at.fill(k);
            for &(p, lo, hi) in &critical {
                if !self.point_cover[p].contains(&t) && hi < min_hi_at[lo] {
                    min_hi_at[lo] = hi;
                }
            }
            // suffix minimum: first rank a run starting at i may not reach
            for i in (0..k).rev() {
                min_hi_at[i] = min_hi_at[i].min(min_hi_at[i + 1]);
            }
            let mut best: Option<(usize, usize)> = None;
            for (i, &limit) in min_hi_at[..k - 1].iter().enumerate() {
                if limit < i + 2 {
                    continue;
                }
                let j = limit - 1;
                if best.is_none_or(|(bi, bj)| j - i > bj - bi) {
                    best = Some((i, j));
                }
            }
            if let Some((i, j)) = best {
                return Some((i, j, t));
            }
        }
        None
    }
}

/// Drops squares without an exclusive point, examining them by ascending id.
pub fn remove_redundancy(points: &[Point], sol: &[UnitSquare]) -> Result<Vec<UnitSquare>> {
    let mut ids: Vec<SquareId> = sol.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    remove_redundancy_ordered(points, sol, &ids)
}

/// Like [`remove_redundancy`] but examines squares in the given id order.
/// Squares missing from `order` are never removed.
pub fn remove_redundancy_ordered(
    points: &[Point],
    sol: &[UnitSquare],
    order: &[SquareId],
) -> Result<Vec<UnitSquare>> {
    let inc = Incidence::new(sol, points);
    let mut in_sol = vec![true; sol.len()];
    let uncovered = inc.uncovered(&in_sol);
    if !uncovered.is_empty() {
        return Err(Error::InfeasibleInput {
            uncovered: uncovered.into_iter().map(|p| points[p]).collect(),
        });
    }
    let order: Vec<usize> = order.iter().filter_map(|id| inc.position_of.get(id).copied()).collect();
    inc.remove_redundancy(&mut in_sol, &order);
    let mut kept: Vec<UnitSquare> = (0..sol.len()).filter(|&i| in_sol[i]).map(|i| sol[i]).collect();
    kept.sort_by_key(|s| s.id);
    Ok(kept)
}

/// Finds a profitable swap on clique `q` of cover `sol` for points `points`.
///
/// Incoming squares are tried by ascending id; for the first one admitting a
/// feasible run of length at least two, the longest such run is returned
/// (leftmost on ties).
pub fn find_profitable_swap(
    q: &Clique,
    squares: &[UnitSquare],
    sol: &[UnitSquare],
    points: &[Point],
) -> Option<SwapCandidate> {
    let inc = Incidence::new(squares, points);
    let in_sol = inc.positions(sol).ok()?;
    if q.squares.iter().any(|s| !inc.position_of.contains_key(&s.id)) {
        return None;
    }
    inc.find_swap(&in_sol, q).map(|(i, j, t)| SwapCandidate {
        removed: q.squares[i..=j].to_vec(),
        added: squares[t],
    })
}

/// Runs the swap algorithm on a line instance.
pub fn solve_line(inst: &LineInstance, strictness: Strictness) -> Result<LineSolution> {
    inst.base.validate(strictness)?;
    let canon = canonicalize_line_instance(inst);
    let squares = &canon.base.squares;
    let witnesses = &canon.base.witnesses;
    let inc = Incidence::new(squares, &canon.base.points);
    let original: HashMap<SquareId, UnitSquare> = inst.base.squares.iter().map(|s| (s.id, *s)).collect();

    let mut in_sol = vec![true; squares.len()];
    inc.remove_redundancy(&mut in_sol, &inc.by_id);
    let mut trace = Vec::new();
    let mut size = in_sol.iter().filter(|&&b| b).count();
    loop {
        let current: Vec<UnitSquare> = (0..squares.len()).filter(|&i| in_sol[i]).map(|i| squares[i]).collect();
        let Some(q) = leftmost_maximum_clique(&current, witnesses) else {
            break;
        };
        let Some((i, j, t)) = inc.find_swap(&in_sol, &q) else {
            break;
        };
        for s in &q.squares[i..=j] {
            in_sol[inc.position_of[&s.id]] = false;
        }
        in_sol[t] = true;
        trace.push(SwapCandidate {
            removed: q.squares[i..=j].iter().map(|s| original[&s.id]).collect(),
            added: original[&squares[t].id],
        });
        inc.remove_redundancy(&mut in_sol, &inc.by_id);
        let next = in_sol.iter().filter(|&&b| b).count();
        debug_assert!(next < size, "swap did not shrink the cover");
        size = next;
    }

    let mut chosen: Vec<UnitSquare> = (0..squares.len())
        .filter(|&i| in_sol[i])
        .map(|i| original[&squares[i].id])
        .collect();
    chosen.sort_by_key(|s| s.id);
    Ok(LineSolution { squares: chosen, trace })
}

/// Pair replacement check: for each pair of consecutive
/// squares of the leftmost maximum clique, no input square contains every
/// point covered only by that pair.
pub fn check_key_lemma(inst: &LineInstance, sol: &LineSolution) -> bool {
    let Some(q) = leftmost_maximum_clique(&sol.squares, &inst.base.witnesses) else {
        return true;
    };
    let sol_index = SquareIndex::new(&sol.squares);
    let covers: Vec<Vec<SquareId>> = inst
        .base
        .points
        .iter()
        .map(|&p| sol_index.containing(p).into_iter().map(|i| sol.squares[i].id).collect())
        .collect();
    q.squares.windows(2).all(|pair| {
        let (a, b) = (pair[0].id, pair[1].id);
        let pair_only: Vec<Point> = inst
            .base
            .points
            .iter()
            .zip(&covers)
            .filter(|(_, cover)| cover.iter().all(|&id| id == a || id == b))
            .map(|(&p, _)| p)
            .collect();
        !inst
            .base
            .squares
            .iter()
            .any(|t| pair_only.iter().all(|&p| t.contains(p)))
    })
}

/// Types of every discrete clique of `sol`, classified in the canonical
/// (points below the line) orientation.
pub fn line_clique_types(inst: &LineInstance, sol: &[UnitSquare]) -> Vec<CliqueType> {
    let canon = canonicalize_line_instance(inst);
    let by_id: HashMap<SquareId, UnitSquare> = canon.base.squares.iter().map(|s| (s.id, *s)).collect();
    let mapped: Vec<UnitSquare> = sol.iter().filter_map(|s| by_id.get(&s.id).copied()).collect();
    discrete_cliques(&mapped, &canon.base.witnesses)
        .iter()
        .map(classify_clique)
        .collect()
}

/// True when `sol` covers `points` and every square has an exclusive point.
pub fn is_redundancy_free(points: &[Point], sol: &[UnitSquare]) -> bool {
    coverage_gaps(points, sol).is_empty()
        && remove_redundancy(points, sol).is_ok_and(|kept| kept.len() == sol.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{membership, Instance, Side};

    fn sq(id: usize, x: f64, y: f64) -> UnitSquare {
        UnitSquare::new(id, x, y)
    }

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn redundancy_examples() {
        assert_eq!(remove_redundancy(&[pt(0.5, 0.5)], &[sq(0, 0.0, 0.0)]).unwrap(), vec![sq(0, 0.0, 0.0)]);
        let kept = remove_redundancy(&[pt(0.5, 0.5)], &[sq(0, 0.0, 0.0), sq(1, 0.2, 0.2)]).unwrap();
        assert_eq!(kept, vec![sq(1, 0.2, 0.2)]);
        assert!(remove_redundancy(&[], &[sq(0, 0.0, 0.0)]).unwrap().is_empty());
        assert!(matches!(
            remove_redundancy(&[pt(5.0, 5.0)], &[sq(0, 0.0, 0.0)]),
            Err(Error::InfeasibleInput { .. })
        ));
    }

    #[test]
    fn redundancy_respects_custom_order() {
        let sol = [sq(0, 0.0, 0.0), sq(1, 0.2, 0.2)];
        let kept = remove_redundancy_ordered(&[pt(0.5, 0.5)], &sol, &[1, 0]).unwrap();
        assert_eq!(kept, vec![sq(0, 0.0, 0.0)]);
    }

    /// Six squares crossing y = 0 with points below; s2 and s5 (ids 1, 4)
    /// have no exclusive point.
    fn redundant_pair_instance() -> LineInstance {
        let squares = vec![
            sq(0, 0.0, -0.9),
            sq(1, 0.5, -0.8),
            sq(2, 1.0, -0.7),
            sq(3, 2.0, -0.85),
            sq(4, 2.5, -0.75),
            sq(5, 3.0, -0.95),
        ];
        let points = vec![
            pt(0.2, -0.5),
            pt(1.8, -0.5),
            pt(2.2, -0.5),
            pt(3.8, -0.5),
            // points inside s2 / s5 regions that their neighbours also cover
            pt(0.8, -0.5),
            pt(3.2, -0.5),
        ];
        LineInstance::new(Instance::new(points, vec![pt(0.9, -0.2)], squares), 0.0, Side::Below).unwrap()
    }

    #[test]
    fn redundancy_counts_by_enumeration() {
        let inst = redundant_pair_instance();
        // exclusivity counts with respect to the full square set
        let excl: Vec<usize> = inst
            .base
            .squares
            .iter()
            .map(|s| {
                inst.base
                    .points
                    .iter()
                    .filter(|&&p| s.contains(p) && inst.base.squares.iter().filter(|t| t.contains(p)).count() == 1)
                    .count()
            })
            .collect();
        assert_eq!(excl, vec![1, 0, 1, 1, 0, 1]);
        let sol = solve_line(&inst, Strictness::Strict).unwrap();
        assert_eq!(sol.ids(), vec![0, 2, 3, 5]);
        assert!(sol.trace.is_empty());
    }

    #[test]
    fn single_square_is_returned() {
        let inst = LineInstance::new(
            Instance::new(vec![pt(0.5, -0.5), pt(0.1, -0.1)], vec![pt(0.5, -0.5)], vec![sq(7, 0.0, -0.9)]),
            0.0,
            Side::Below,
        )
        .unwrap();
        let sol = solve_line(&inst, Strictness::Strict).unwrap();
        assert_eq!(sol.ids(), vec![7]);
    }

    /// Clique squares 1, 2, 3 share the witness. Square 0 is dropped by the
    /// initial redundancy pass, yet it contains the exclusive points of 1
    /// and 2, so it can replace that pair.
    fn swap_instance() -> LineInstance {
        let squares = vec![
            sq(0, 0.05, -0.95),
            sq(1, 0.0, -0.9),
            sq(2, 0.3, -0.8),
            sq(3, 0.6, -0.7),
        ];
        let points = vec![
            pt(0.1, -0.85),  // in s0, s1
            pt(1.03, -0.75), // in s0, s2
            pt(1.55, -0.5),  // in s3 only
        ];
        LineInstance::new(Instance::new(points, vec![pt(0.9, -0.1)], squares), 0.0, Side::Below).unwrap()
    }

    fn covers_by_enumeration(inst: &Instance, sol: &[UnitSquare]) -> bool {
        inst.points.iter().all(|&p| sol.iter().any(|s| s.contains(p)))
    }

    #[test]
    fn swap_found_on_hand_built_instance() {
        let inst = swap_instance();
        let base = &inst.base;
        let start = remove_redundancy(&base.points, &base.squares).unwrap();
        assert_eq!(start.iter().map(|s| s.id).collect::<Vec<_>>(), vec![1, 2, 3]);
        let q = leftmost_maximum_clique(&start, &base.witnesses).unwrap();
        assert_eq!(q.len(), 3);
        let swap = find_profitable_swap(&q, &base.squares, &start, &base.points).unwrap();
        assert_eq!(swap.removed.iter().map(|s| s.id).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(swap.added.id, 0);
        // by enumeration: only the run {1, 2} can go when 0 comes in
        let sq_of = |id: usize| base.squares[id];
        assert!(covers_by_enumeration(base, &[sq_of(0), sq_of(3)]));
        assert!(!covers_by_enumeration(base, &[sq_of(0), sq_of(1)]));
        assert!(!covers_by_enumeration(base, &[sq_of(0)]));
    }

    #[test]
    fn solve_applies_exactly_one_swap() {
        let inst = swap_instance();
        let sol = solve_line(&inst, Strictness::Strict).unwrap();
        assert_eq!(sol.trace.len(), 1);
        assert_eq!(sol.ids(), vec![0, 3]);
        let before = membership(&inst.base.witnesses, &inst.base.squares[1..]);
        let after = membership(&inst.base.witnesses, &sol.squares);
        assert_eq!((before, after), (3, 2));
        let q = leftmost_maximum_clique(&sol.squares, &inst.base.witnesses).unwrap();
        assert!(find_profitable_swap(&q, &inst.base.squares, &sol.squares, &inst.base.points).is_none());
    }

    #[test]
    fn no_swap_for_singleton_or_tight_pair() {
        let base = Instance::new(vec![pt(0.5, -0.5)], vec![pt(0.5, -0.5)], vec![sq(0, 0.0, -0.9)]);
        let q = leftmost_maximum_clique(&base.squares, &base.witnesses).unwrap();
        assert!(find_profitable_swap(&q, &base.squares, &base.squares, &base.points).is_none());

        let squares = vec![sq(0, 0.0, -0.9), sq(1, 0.8, -0.8), sq(2, 0.1, -0.7)];
        let points = vec![pt(0.05, -0.5), pt(1.75, -0.5)];
        let base = Instance::new(points, vec![pt(0.9, -0.1)], squares);
        let sol = vec![base.squares[0], base.squares[1]];
        let q = leftmost_maximum_clique(&sol, &base.witnesses).unwrap();
        assert_eq!(q.len(), 2);
        assert!(base.squares[2..].iter().all(|t| !covers_by_enumeration(&base, &[*t])));
        assert!(find_profitable_swap(&q, &base.squares, &sol, &base.points).is_none());
    }

    #[test]
    fn key_lemma_examples() {
        let base = Instance::new(vec![pt(0.5, -0.5)], vec![pt(0.5, -0.5)], vec![sq(0, 0.0, -0.9)]);
        let inst = LineInstance::new(base, 0.0, Side::Below).unwrap();
        let sol = solve_line(&inst, Strictness::Strict).unwrap();
        assert!(check_key_lemma(&inst, &sol));

        // {1, 2, 3} is not a solver output: square 0 holds everything only 1 and 2 cover
        let inst = swap_instance();
        let fake = LineSolution {
            squares: inst.base.squares[1..].to_vec(),
            trace: vec![],
        };
        assert!(!check_key_lemma(&inst, &fake));
        let real = solve_line(&inst, Strictness::Strict).unwrap();
        assert!(check_key_lemma(&inst, &real));
    }

    #[test]
    fn above_instances_are_solved_in_their_own_orientation() {
        let inst = swap_instance();
        let flipped = crate::geometry::reflect_line_instance(&inst, Side::Above);
        let a = solve_line(&inst, Strictness::Strict).unwrap();
        let b = solve_line(&flipped, Strictness::Strict).unwrap();
        assert_eq!(a.ids(), b.ids());
        for s in &b.squares {
            assert_eq!(Some(s), flipped.base.square_by_id(s.id));
        }
    }
}
