//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::time::{Duration, Instant};

use rand_core::RngCore;
use rand_pcg::Pcg64;

use membcover::clique::leftmost_maximum_clique;
use membcover::geometry::{reflect_line_instance, Instance, LineInstance, Side, UnitSquare};
use membcover::gmmgsc::{derive_ply_points, solve_detailed, InstanceKind, Problem};
use membcover::io::generate::{generate_instance, generate_problem, GeneratorParams, WitnessMode};
use membcover::io::report::{Report, SolveReport};
use membcover::io::serialize_instance;
use membcover::line_solver::{check_key_lemma, find_profitable_swap, line_clique_types, solve_line};
use membcover::lp::simplex::{self, LinearProgram, Relation, Status};
use membcover::lp::{build_slab_lp, solve_decomposed};
use membcover::oracle::{
    approximation_bound, exact_min_membership, exact_min_membership_enumerate, geometric_ply,
    has_profitable_swap_exhaustive, verify_global_solution, DEFAULT_MAX_M,
};
use membcover::slab_solver::solve_slab_detailed;
use membcover::{membership, Execution, SolveOptions, Strictness};

const BOUND_INSTANCES: u64 = 200;
const LINE_PROPERTY_INSTANCES: u64 = 500;
const ORACLE_PAIR_INSTANCES: u64 = 100;
const PLY_TRIALS: u64 = 100;
const RANDOM_LPS: u64 = 50;
const GLOBAL_TIME_LIMIT: Duration = Duration::from_secs(60);
const SCALING_TIME_LIMIT: Duration = Duration::from_secs(120);
const LP_OPT_TOL: f64 = 1e-6;
const VERTEX_TOL: f64 = 1e-7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Small instance for bound checks: m in 4..=12, n in 5..=30, |P'| = n.
fn small_params(kind: InstanceKind, seed: u64) -> GeneratorParams {
    let m = 4 + (seed % 9) as usize;
    let n = 5 + (seed * 7 % 26) as usize;
    let spread = if kind == InstanceKind::Global { 3.0 } else { 2.5 };
    GeneratorParams { m, n, witnesses: WitnessMode::Count(n), spread, seed, kind }
}

fn line_problem(seed: u64) -> LineInstance {
    let Problem::Line(line) = generate_problem(&small_params(InstanceKind::Line, seed)).unwrap() else {
        unreachable!()
    };
    // every other instance is mirrored so both orientations are exercised
    if seed % 2 == 1 {
        reflect_line_instance(&line, Side::Above)
    } else {
        line
    }
}

/// Membership never exceeds the bound for the instance kind.
fn bound_check(kind: InstanceKind, lp_slack: &mut Vec<f64>) -> Outcome {
    let opts = SolveOptions::default();
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut worst_gap = 0i64;
    for seed in 0..BOUND_INSTANCES {
        let problem = generate_problem(&small_params(kind, 1000 + seed)).unwrap();
        let inst = problem.instance();
        let sol = problem.solve(&opts).unwrap();
        let value = membership(&inst.witnesses, &sol);
        let opt = exact_min_membership(inst, DEFAULT_MAX_M).unwrap().opt;
        if value > approximation_bound(kind, opt) {
            violations.push(seed);
        }
        worst_gap = worst_gap.max(value as i64 - opt as i64);
        match &problem {
            Problem::Global(g) => {
                let slabs = solve_detailed(g, &opts).unwrap().slabs;
                lp_slack.extend(slabs.iter().map(|(_, s)| opt as f64 - s.lp.y_star));
            }
            _ => {
                let y = solve_decomposed(&build_slab_lp(inst).unwrap(), Execution::Sequential).unwrap().y_star;
                lp_slack.push(opt as f64 - y);
            }
        }
    }
    let elapsed = start.elapsed();
    let timed = kind != InstanceKind::Global || elapsed < GLOBAL_TIME_LIMIT;
    outcome(
        violations.is_empty() && timed,
        format!(
            "{BOUND_INSTANCES} instances, {} violations, max membership-OPT gap {worst_gap}, {:.2?}",
            violations.len(),
            elapsed
        ),
    )
}

fn observation_1() -> Outcome {
    let mut failures = 0;
    for seed in 0..LINE_PROPERTY_INSTANCES {
        let inst = line_problem(5000 + seed);
        let sol = solve_line(&inst, Strictness::Strict).unwrap();
        let exhaustive = has_profitable_swap_exhaustive(&inst, &sol.squares);
        let targeted = leftmost_maximum_clique(&sol.squares, &inst.base.witnesses)
            .and_then(|q| find_profitable_swap(&q, &inst.base.squares, &sol.squares, &inst.base.points));
        if exhaustive.is_some() || targeted.is_some() {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{LINE_PROPERTY_INSTANCES} instances, {failures} with a profitable swap left"))
}

fn key_lemma() -> Outcome {
    let failures = (0..LINE_PROPERTY_INSTANCES)
        .filter(|seed| {
            let inst = line_problem(5000 + seed);
            let sol = solve_line(&inst, Strictness::Strict).unwrap();
            !check_key_lemma(&inst, &sol)
        })
        .count();
    outcome(failures == 0, format!("{LINE_PROPERTY_INSTANCES} instances, {failures} failures"))
}

fn claim_1() -> Outcome {
    let mut cliques = 0;
    let mut illegal = 0;
    for seed in 0..LINE_PROPERTY_INSTANCES {
        let inst = line_problem(5000 + seed);
        let sol = solve_line(&inst, Strictness::Strict).unwrap();
        let types = line_clique_types(&inst, &sol.squares);
        cliques += types.len();
        illegal += types.iter().filter(|t| !t.kind.is_legal()).count();
    }
    outcome(illegal == 0, format!("{LINE_PROPERTY_INSTANCES} instances, {cliques} cliques, {illegal} illegal"))
}

/// Minimum over all feasible vertices: every choice of `n` tight
/// hyperplanes among rows and bounds, solved by Gaussian elimination.
fn vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars;
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let dense = |coeffs: &[(usize, f64)]| {
        let mut a = vec![0.0; n];
        for &(j, v) in coeffs {
            a[j] += v;
        }
        a
    };
    for row in &lp.rows {
        planes.push((dense(&row.coeffs), row.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), 0.0));
        if let Some(u) = lp.upper_bounds[j] {
            planes.push((e, u));
        }
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-9;
        x.iter().all(|&v| v >= -tol)
            && lp.upper_bounds.iter().zip(x).all(|(u, &v)| u.is_none_or(|u| v <= u + tol))
            && lp.rows.iter().all(|r| {
                let lhs: f64 = dense(&r.coeffs).iter().zip(x).map(|(a, v)| a * v).sum();
                match r.relation {
                    Relation::Le => lhs <= r.rhs + tol,
                    Relation::Ge => lhs >= r.rhs - tol,
                    Relation::Eq => (lhs - r.rhs).abs() <= tol,
                }
            })
    };
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let mut a: Vec<Vec<f64>> = pick.iter().map(|&i| {
            let mut row = planes[i].0.clone();
            row.push(planes[i].1);
            row
        }).collect();
        if let Some(x) = gauss(&mut a, n) {
            if feasible(&x) {
                let v: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < k - n + i {
                pick[i] += 1;
                for t in i + 1..n {
                    pick[t] = pick[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn gauss(a: &mut [Vec<f64>], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (v, p) in row[col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                    *v -= f * p;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

fn random_lp(rng: &mut Pcg64) -> LinearProgram {
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let n = 1 + (unit() * 6.0) as usize;
    let mut lp = LinearProgram::new(n.min(6));
    let n = lp.num_vars;
    lp.objective = (0..n).map(|_| (unit() * 10.0 - 5.0).round()).collect();
    lp.upper_bounds = (0..n).map(|_| Some((1.0 + unit() * 4.0).round())).collect();
    let rows = 1 + (unit() * 5.0) as usize;
    for _ in 0..rows {
        let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, (unit() * 6.0 - 2.0).round())).collect();
        let relation = match (unit() * 3.0) as usize {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        };
        lp.add_row(coeffs, relation, (unit() * 8.0 - 2.0).round());
    }
    lp
}

fn lp_validity(slack: &[f64]) -> Outcome {
    let below = slack.iter().filter(|&&s| s < -LP_OPT_TOL).count();
    let mut rng = Pcg64::new(77, 0xa02bdbf7bb3c0a7ac28fa16a64abf96);
    let mut mismatches = 0;
    let mut feasible = 0;
    for _ in 0..RANDOM_LPS {
        let lp = random_lp(&mut rng);
        let got = simplex::solve(&lp).unwrap();
        let want = vertex_enumeration(&lp);
        let agree = match (got.status, want) {
            (Status::Optimal, Some(v)) => (got.objective - v).abs() <= VERTEX_TOL,
            (Status::Infeasible, None) => true,
            _ => false,
        };
        feasible += usize::from(want.is_some());
        mismatches += usize::from(!agree);
    }
    outcome(
        below == 0 && mismatches == 0,
        format!(
            "y* <= OPT on {}/{} oracle-solved instances; simplex vs vertex enumeration {mismatches} mismatches on {RANDOM_LPS} LPs ({feasible} feasible)",
            slack.len() - below,
            slack.len()
        ),
    )
}

fn oracle_consistency() -> Outcome {
    let mut mismatches = 0;
    for seed in 0..ORACLE_PAIR_INSTANCES {
        let kind = [InstanceKind::Global, InstanceKind::Slab, InstanceKind::Line][(seed % 3) as usize];
        let mut p = small_params(kind, 9000 + seed);
        p.m = 3 + (seed % 8) as usize;
        let inst = generate_instance(&p).unwrap();
        let bnb = exact_min_membership(&inst, 10).unwrap();
        let full = exact_min_membership_enumerate(&inst, 10).unwrap();
        let witness_ok = membership(&inst.witnesses, &bnb.witness) == bnb.opt
            && membcover::geometry::coverage_gaps(&inst.points, &bnb.witness).is_empty();
        if bnb.opt != full.opt || !witness_ok {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{ORACLE_PAIR_INSTANCES} instances with m <= 10, {mismatches} mismatches"))
}

fn ply_witnesses() -> Outcome {
    let mut rng = Pcg64::new(4242, 0xa02bdbf7bb3c0a7ac28fa16a64abf96);
    let mut mismatches = 0;
    for seed in 0..PLY_TRIALS {
        let m = 1 + (seed % 8) as usize;
        let p = GeneratorParams { m, n: 0, witnesses: WitnessMode::Count(0), spread: 2.0, seed: 7000 + seed, kind: InstanceKind::Global };
        let squares = generate_instance(&p).unwrap().squares;
        let mask = rng.next_u64();
        let sol: Vec<UnitSquare> = squares.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| *s).collect();
        if membership(&derive_ply_points(&squares), &sol) != geometric_ply(&sol) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{PLY_TRIALS} trials with m <= 8, {mismatches} mismatches"))
}

fn scaling() -> Outcome {
    let p = GeneratorParams { m: 2000, n: 5000, witnesses: WitnessMode::Count(1000), spread: 200.0, seed: 1, kind: InstanceKind::Slab };
    let Problem::Slab(slab) = generate_problem(&p).unwrap() else { unreachable!() };
    let start = Instant::now();
    let sol = solve_slab_detailed(&slab, &SolveOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let swaps = [sol.bottom.trace.len(), sol.top.trace.len()];
    let within = swaps[0] <= sol.bottom_instance.base.squares.len() && swaps[1] <= sol.top_instance.base.squares.len();
    let covered = membcover::geometry::coverage_gaps(&slab.base.points, &sol.squares).is_empty();
    outcome(
        elapsed < SCALING_TIME_LIMIT && within && covered,
        format!(
            "m=2000 n=5000 |P'|=1000 solved in {elapsed:.2?}, cover size {}, swaps per line {swaps:?} (line sizes {}, {})",
            sol.squares.len(),
            sol.bottom_instance.base.squares.len(),
            sol.top_instance.base.squares.len()
        ),
    )
}

fn run_report(inst: &Instance, execution: Execution) -> (Vec<usize>, String) {
    let opts = SolveOptions { execution, ..SolveOptions::default() };
    let sol = solve_detailed(inst, &opts).unwrap();
    let report = SolveReport {
        mode: InstanceKind::Global,
        m: inst.squares.len(),
        n: inst.points.len(),
        n_prime: inst.witnesses.len(),
        solution: sol.ids(),
        size: sol.squares.len(),
        membership: membership(&inst.witnesses, &sol.squares),
        max_swaps: sol.max_swaps_per_line(),
        verification: Some(verify_global_solution(inst, &sol, true)),
    };
    (sol.ids(), report.to_text() + &report.to_json())
}

fn determinism() -> Outcome {
    let mut differing = 0;
    let mut runs = 0;
    for seed in [3u64, 17, 99] {
        for (m, spread) in [(12usize, 3.0), (300, 20.0)] {
            let p = GeneratorParams { m, n: 2 * m, witnesses: WitnessMode::Count(m), spread, seed, kind: InstanceKind::Global };
            let a = generate_instance(&p).unwrap();
            let b = generate_instance(&p).unwrap();
            if serialize_instance(&a) != serialize_instance(&b) {
                differing += 1;
            }
            let first = run_report(&a, Execution::Parallel);
            let second = run_report(&b, Execution::Parallel);
            let sequential = run_report(&a, Execution::Sequential);
            differing += usize::from(first != second) + usize::from(first != sequential);
            runs += 1;
        }
    }
    outcome(differing == 0, format!("{runs} seeded configurations, instances + ids + reports compared, {differing} differences"))
}

type Check = Box<dyn FnOnce(&mut Vec<f64>) -> Outcome>;

fn main() {
    let start = Instant::now();
    let mut lp_slack = Vec::new();
    let criteria: Vec<(&str, Check)> = vec![
        ("global bound 16*OPT+36", Box::new(|s: &mut Vec<f64>| bound_check(InstanceKind::Global, s))),
        ("slab bound 8*OPT+18", Box::new(|s: &mut Vec<f64>| bound_check(InstanceKind::Slab, s))),
        ("line bound 4*OPT+9", Box::new(|s: &mut Vec<f64>| bound_check(InstanceKind::Line, s))),
        ("no profitable swap after solve_line", Box::new(|_: &mut Vec<f64>| observation_1())),
        ("key lemma on solve_line output", Box::new(|_: &mut Vec<f64>| key_lemma())),
        ("clique types legal on solve_line output", Box::new(|_: &mut Vec<f64>| claim_1())),
        ("LP relaxation validity", Box::new(|s: &mut Vec<f64>| lp_validity(s))),
        ("branch-and-bound equals enumeration", Box::new(|_: &mut Vec<f64>| oracle_consistency())),
        ("ply witnesses match geometric ply", Box::new(|_: &mut Vec<f64>| ply_witnesses())),
        ("scaling smoke test", Box::new(|_: &mut Vec<f64>| scaling())),
        ("determinism", Box::new(|_: &mut Vec<f64>| determinism())),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let o = check(&mut lp_slack);
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {} of 11 criteria passed in {:.2?}", 11 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
