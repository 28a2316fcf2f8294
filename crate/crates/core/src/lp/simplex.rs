//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `min c·x` subject to linear rows `a·x {<=, >=, =} b` and bounds
//! `0 <= x_j <= u_j` (upper bounds optional). Finite upper bounds are
//! lowered to explicit `<=` rows.

use thiserror::Error;

/// Feasibility tolerance for phase one and the ratio test.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Reduced costs above `-OPTIMALITY_TOL` are treated as non-negative.
pub const OPTIMALITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// Sparse coefficients `(variable, value)`; repeated variables add up.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub upper_bounds: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            upper_bounds: vec![None; num_vars],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row { coeffs, relation, rhs });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Primal values; meaningful only when `status == Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    width: usize,
    data: Vec<f64>,
    rows: usize,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    pivots: usize,
    limit: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    /// Objective row is stored after the constraint rows.
    fn obj(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > self.limit {
            return Err(LpError::IterationLimit(self.limit));
        }
        let w = self.width;
        let inv = 1.0 / self.at(r, c);
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(eliminate);
        after.chunks_exact_mut(w).for_each(eliminate);
        self.basis[r] = c;
        Ok(())
    }

    /// Bland's rule iterations on the current objective row. `allowed`
    /// filters entering columns.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> Result<bool, LpError> {
        let rhs = self.rhs_col();
        loop {
            let obj = self.obj();
            let Some(enter) = (0..rhs).find(|&c| allowed(c) && self.at(obj, c) < -OPTIMALITY_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a > PIVOT_TOL {
                    let ratio = self.at(r, rhs).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio || (ratio == lratio && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter)?,
            }
        }
    }

    fn load_objective(&mut self, cost: &[f64]) {
        let obj = self.obj();
        let w = self.width;
        for c in 0..w {
            self.data[obj * w + c] = if c < cost.len() { cost[c] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = cost.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for c in 0..w {
                    self.data[obj * w + c] -= cb * self.data[r * w + c];
                }
            }
        }
    }
}

/// Solves `lp` to optimality. The pivot budget is `10 · (rows + cols)²`
/// measured on the standard-form tableau.
pub fn solve(lp: &LinearProgram) -> Result<Solution, LpError> {
    let n = lp.num_vars;
    if lp.objective.len() != n || lp.upper_bounds.len() != n {
        return Err(LpError::Malformed("objective/bounds length differs from num_vars".into()));
    }
    // Dense rows with non-negative right-hand sides.
    let mut dense: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(lp.rows.len() + n);
    for row in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            if j >= n {
                return Err(LpError::Malformed(format!("variable index {j} out of range")));
            }
            a[j] += v;
        }
        dense.push((a, row.relation, row.rhs));
    }
    for (j, ub) in lp.upper_bounds.iter().enumerate() {
        if let Some(u) = *ub {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            dense.push((a, Relation::Le, u));
        }
    }
    for (a, rel, b) in &mut dense {
        if *b < 0.0 {
            a.iter_mut().for_each(|v| *v = -*v);
            *b = -*b;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = dense.len();
    let n_slack = dense.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let n_art = dense.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let cols = n + n_slack + n_art;
    let width = cols + 1;
    let mut kinds = vec![Column::Structural; n];
    kinds.extend(std::iter::repeat_n(Column::Slack, n_slack));
    kinds.extend(std::iter::repeat_n(Column::Artificial, n_art));

    let mut data = vec![0.0; (m + 1) * width];
    let mut basis = vec![0; m];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (r, (a, rel, b)) in dense.iter().enumerate() {
        let row = &mut data[r * width..(r + 1) * width];
        row[..n].copy_from_slice(a);
        row[cols] = *b;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
        }
    }
    let limit = 10 * (m + cols) * (m + cols);
    let mut t = Tableau {
        width,
        data,
        rows: m,
        basis,
        kinds,
        pivots: 0,
        limit,
    };

    if n_art > 0 {
        let phase_one: Vec<f64> = t
            .kinds
            .iter()
            .map(|k| if *k == Column::Artificial { 1.0 } else { 0.0 })
            .collect();
        t.load_objective(&phase_one);
        t.run(|_| true)?;
        let infeasibility = -t.at(t.obj(), t.rhs_col());
        if infeasibility > FEASIBILITY_TOL * (1.0 + m as f64) {
            return Ok(Solution {
                status: Status::Infeasible,
                x: vec![0.0; n],
                objective: f64::NAN,
                pivots: t.pivots,
            });
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for r in 0..m {
            if t.kinds[t.basis[r]] != Column::Artificial {
                continue;
            }
            if let Some(c) = (0..cols).find(|&c| t.kinds[c] != Column::Artificial && t.at(r, c).abs() > PIVOT_TOL) {
                t.pivot(r, c)?;
            }
        }
    }

    let mut cost = lp.objective.clone();
    cost.resize(cols, 0.0);
    t.load_objective(&cost);
    let kinds = t.kinds.clone();
    let bounded = t.run(|c| kinds[c] != Column::Artificial)?;
    if !bounded {
        return Ok(Solution {
            status: Status::Unbounded,
            x: vec![0.0; n],
            objective: f64::NEG_INFINITY,
            pivots: t.pivots,
        });
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        let c = t.basis[r];
        if c < n {
            x[c] = t.at(r, t.rhs_col()).max(0.0);
        }
    }
    for (j, ub) in lp.upper_bounds.iter().enumerate() {
        if let Some(u) = *ub {
            x[j] = x[j].min(u);
        }
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(Solution {
        status: Status::Optimal,
        x,
        objective,
        pivots: t.pivots,
    })
}
