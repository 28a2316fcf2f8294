//! LP relaxation of a slab instance and the rounding that splits its
//! points between the two boundary lines.
//!
//! Variables are one `x_s ∈ [0, 1]` per square plus the membership bound
//! `y ≥ 0`; the objective is `min y` under
//!
//! * `Σ_{s ∋ p} x_s ≥ 1` for every point `p` to cover, and
//! * `Σ_{s ∋ p'} x_s ≤ y` for every witness `p'`.

pub mod simplex;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Instance, Point, SquareId, SquareIndex, UnitSquare};
use crate::par::{self, Execution};
use simplex::{LinearProgram, Relation, Status};

/// Tolerance used when comparing the two sides of the δ split.
pub const DELTA_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    /// Column `j < square_ids.len()` is `x_s` for `square_ids[j]`; the last
    /// column is `y`.
    pub square_ids: Vec<SquareId>,
    /// Columns of the squares covering each point, one row per point.
    pub cover_rows: Vec<Vec<usize>>,
    /// Columns of the squares containing each witness, one row per witness.
    pub memb_rows: Vec<Vec<usize>>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.square_ids.len() + 1
    }

    pub fn y_var(&self) -> usize {
        self.square_ids.len()
    }

    pub fn objective(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.num_vars()];
        c[self.y_var()] = 1.0;
        c
    }

    pub fn to_linear_program(&self) -> LinearProgram {
        let y = self.y_var();
        let mut lp = LinearProgram::new(self.num_vars());
        lp.objective = self.objective();
        for j in 0..y {
            lp.upper_bounds[j] = Some(1.0);
        }
        for row in &self.cover_rows {
            lp.add_row(row.iter().map(|&j| (j, 1.0)).collect(), Relation::Ge, 1.0);
        }
        for row in &self.memb_rows {
            let mut coeffs: Vec<(usize, f64)> = row.iter().map(|&j| (j, 1.0)).collect();
            coeffs.push((y, -1.0));
            lp.add_row(coeffs, Relation::Le, 0.0);
        }
        lp
    }

    /// Human-readable row listing for debugging.
    pub fn dump(&self) -> String {
        let name = |j: usize| format!("x{}", self.square_ids[j]);
        let sum = |row: &[usize]| {
            if row.is_empty() {
                "0".to_string()
            } else {
                row.iter().map(|&j| name(j)).collect::<Vec<_>>().join(" + ")
            }
        };
        let mut out = String::from("minimize y\n");
        for (i, row) in self.cover_rows.iter().enumerate() {
            let _ = writeln!(out, "cover[{i}]: {} >= 1", sum(row));
        }
        for (i, row) in self.memb_rows.iter().enumerate() {
            let _ = writeln!(out, "memb[{i}]: {} <= y", sum(row));
        }
        let _ = writeln!(out, "bounds: 0 <= x_s <= 1 for {} squares, y >= 0", self.square_ids.len());
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub square_ids: Vec<SquareId>,
    /// Aligned with `square_ids`.
    pub x_star: Vec<f64>,
    pub y_star: f64,
    pub status: LpStatus,
}

impl LpSolution {
    pub fn value_of(&self, id: SquareId) -> Option<f64> {
        self.square_ids.iter().position(|&s| s == id).map(|j| self.x_star[j])
    }

    pub fn values_by_id(&self) -> HashMap<SquareId, f64> {
        self.square_ids.iter().copied().zip(self.x_star.iter().copied()).collect()
    }
}

/// Builds the relaxation for `inst`, with columns in ascending square id and
/// rows in point order.
pub fn build_slab_lp(inst: &Instance) -> Result<LpProblem> {
    let mut squares: Vec<UnitSquare> = inst.squares.clone();
    squares.sort_by_key(|s| s.id);
    let index = SquareIndex::new(&squares);
    let cover_rows: Vec<Vec<usize>> = inst.points.iter().map(|&p| index.containing(p)).collect();
    let uncovered: Vec<Point> = inst
        .points
        .iter()
        .zip(&cover_rows)
        .filter(|(_, row)| row.is_empty())
        .map(|(&p, _)| p)
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::InfeasibleInput { uncovered });
    }
    Ok(LpProblem {
        square_ids: squares.iter().map(|s| s.id).collect(),
        cover_rows,
        memb_rows: inst.witnesses.iter().map(|&w| index.containing(w)).collect(),
    })
}

/// Solves the whole relaxation as one dense tableau.
pub fn simplex_solve(lp: &LpProblem) -> Result<LpSolution> {
    let solution = simplex::solve(&lp.to_linear_program())?;
    let y = lp.y_var();
    Ok(match solution.status {
        Status::Optimal => LpSolution {
            square_ids: lp.square_ids.clone(),
            x_star: solution.x[..y].to_vec(),
            y_star: solution.x[y],
            status: LpStatus::Optimal,
        },
        // y >= 0 bounds the objective from below, so only infeasibility remains
        Status::Infeasible | Status::Unbounded => LpSolution {
            square_ids: lp.square_ids.clone(),
            x_star: vec![0.0; y],
            y_star: f64::NAN,
            status: LpStatus::Infeasible,
        },
    })
}

/// Indices of the rows of `rows` not implied by another row, ascending.
///
/// With `keep_minimal` a row is dropped when another row's support is a
/// subset of its own (cover rows); otherwise when its support is contained
/// in another row's (membership rows). Of identical rows the first stays.
fn undominated(rows: &[Vec<usize>], keep_minimal: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        let by_len = rows[a].len().cmp(&rows[b].len());
        (if keep_minimal { by_len } else { by_len.reverse() }).then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    let mut by_col: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut shared: HashMap<usize, usize> = HashMap::new();
    for r in order {
        shared.clear();
        for c in &rows[r] {
            for &q in by_col.get(c).map(Vec::as_slice).unwrap_or(&[]) {
                *shared.entry(q).or_default() += 1;
            }
        }
        let implied = shared.iter().any(|(&q, &k)| k == if keep_minimal { rows[q].len() } else { rows[r].len() });
        if implied {
            continue;
        }
        for &c in &rows[r] {
            by_col.entry(c).or_default().push(r);
        }
        kept.push(r);
    }
    kept.sort_unstable();
    kept
}

/// Solves the relaxation component by component.
///
/// Rows implied by other rows are dropped first (a cover row containing
/// another cover row's squares, a membership row inside another one), which
/// leaves the feasible region unchanged. Squares linked through a remaining
/// row form a component; for a fixed `y` the feasibility question splits
/// across components, so the optimum is the largest component optimum and
/// the merged `x` is optimal for the full problem.
pub fn solve_decomposed(lp: &LpProblem, exec: Execution) -> Result<LpSolution> {
    let n = lp.square_ids.len();
    if lp.cover_rows.iter().any(Vec::is_empty) {
        return Ok(infeasible(lp));
    }
    let memb_nonempty: Vec<Vec<usize>> = lp.memb_rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    let cover_rows: Vec<&Vec<usize>> = undominated(&lp.cover_rows, true).into_iter().map(|i| &lp.cover_rows[i]).collect();
    let memb_rows: Vec<&Vec<usize>> = undominated(&memb_nonempty, false).into_iter().map(|i| &memb_nonempty[i]).collect();
    let mut dsu = Dsu::new(n);
    for row in cover_rows.iter().chain(&memb_rows) {
        for w in row.windows(2) {
            dsu.union(w[0], w[1]);
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..n {
        components.entry(dsu.find(j)).or_default().push(j);
    }
    let mut subproblems: Vec<(Vec<usize>, LpProblem)> = Vec::with_capacity(components.len());
    let mut root_slot: HashMap<usize, usize> = HashMap::new();
    for (root, cols) in &components {
        root_slot.insert(*root, subproblems.len());
        subproblems.push((
            cols.clone(),
            LpProblem {
                square_ids: cols.iter().map(|&j| lp.square_ids[j]).collect(),
                cover_rows: Vec::new(),
                memb_rows: Vec::new(),
            },
        ));
    }
    let mut local = vec![0; n];
    for (cols, _) in &subproblems {
        for (k, &j) in cols.iter().enumerate() {
            local[j] = k;
        }
    }
    for row in cover_rows {
        let slot = root_slot[&dsu.find(row[0])];
        subproblems[slot].1.cover_rows.push(row.iter().map(|&j| local[j]).collect());
    }
    for row in memb_rows {
        let slot = root_slot[&dsu.find(row[0])];
        subproblems[slot].1.memb_rows.push(row.iter().map(|&j| local[j]).collect());
    }

    let solved = par::map(exec, &subproblems, |(_, sub)| simplex_solve(sub));
    let mut x_star = vec![0.0; n];
    let mut y_star: f64 = 0.0;
    for ((cols, _), sol) in subproblems.iter().zip(solved) {
        let sol = sol?;
        if sol.status == LpStatus::Infeasible {
            return Ok(infeasible(lp));
        }
        for (k, &j) in cols.iter().enumerate() {
            x_star[j] = sol.x_star[k];
        }
        y_star = y_star.max(sol.y_star);
    }
    Ok(LpSolution {
        square_ids: lp.square_ids.clone(),
        x_star,
        y_star,
        status: LpStatus::Optimal,
    })
}

fn infeasible(lp: &LpProblem) -> LpSolution {
    LpSolution {
        square_ids: lp.square_ids.clone(),
        x_star: vec![0.0; lp.square_ids.len()],
        y_star: f64::NAN,
        status: LpStatus::Infeasible,
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Split of a slab's points between the bottom-line squares (`p1`) and the
/// top-line squares (`p2`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointPartition {
    pub p1: Vec<Point>,
    pub p2: Vec<Point>,
}

/// Fractional coverage of `p` by the squares of `part`.
pub fn delta(p: Point, part: &[UnitSquare], x: &HashMap<SquareId, f64>) -> f64 {
    part.iter()
        .filter(|s| s.contains(p))
        .map(|s| x.get(&s.id).copied().unwrap_or(0.0))
        .sum()
}

/// Assigns each point to the side with the larger δ; near-ties go to `p1`.
pub fn partition_points(inst: &Instance, s1: &[UnitSquare], s2: &[UnitSquare], sol: &LpSolution) -> PointPartition {
    let x = sol.values_by_id();
    let mut out = PointPartition::default();
    for &p in &inst.points {
        let d1 = delta(p, s1, &x);
        let d2 = delta(p, s2, &x);
        if d2 > d1 + DELTA_TIE_TOL {
            out.p2.push(p);
        } else {
            out.p1.push(p);
        }
    }
    out
}
