//! Acceptance criteria, one PASS/FAIL line each. The test fails if any
//! criterion does.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::Instant;

use common::{enumerate_projection, weighted_min_norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use visolve::harness::{
    build_preset, compare, run_preset, sweep, ExperimentPreset, PresetName, SweepGrid, NETWORK_SENSITIVITY,
    SWEEP_MAX_ITER,
};
use visolve_core::linalg::{dist, dot, norm_inf, sub, Matrix};
use visolve_core::operators::{NashProblem, NetworkProblem};
use visolve_core::projections::{project_polyhedron, DEFAULT_MAX_INNER};
use visolve_core::solver::{linear_rate_rho, linear_rate_t};
use visolve_core::{estimate_lipschitz, AlgorithmVariant, NoClock, PolyhedralSet, Solver, Termination};

const NETWORK_STAR: [f64; 8] = [1.0, 1.0, 0.1575, 0.8425, 0.885, 0.115, 1.0425, 0.9575];
const NASH_STAR: [f64; 5] = [36.912, 41.842, 43.705, 42.665, 39.182];

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        println!("{} criterion {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id);
        }
    }
}

fn preset(name: PresetName) -> ExperimentPreset {
    build_preset(name).unwrap()
}

fn network_equilibrium(rep: &mut Report) {
    let p = preset(PresetName::Network51);
    let t0 = Instant::now();
    let run = run_preset(&p).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let r = &run.result;
    let e = r.final_residual().unwrap();
    let err = norm_inf(&sub(&r.x, &NETWORK_STAR));
    let ok = r.termination == Termination::TolReached && e < 1e-6 && err <= 2e-3 && r.iterations <= 3 * 58 && secs < 10.0;
    rep.line(1, "network", ok, format!("E_n = {e:.3e}, error = {err:.3e}, iterations = {} (limit 174), {secs:.3} s", r.iterations));
}

fn nash_cournot(rep: &mut Report) {
    let p = preset(PresetName::Nash52);
    let r = run_preset(&p).unwrap().result;
    let err = norm_inf(&sub(&r.x, &NASH_STAR));
    let f = NashProblem::five_firm_example().eval(&NASH_STAR).unwrap();
    let fmax = norm_inf(&f);
    let ok = err <= 5e-2 && r.iterations <= 3 * 80 && fmax <= 1e-2;
    rep.line(2, "nash", ok, format!("error = {err:.3e}, iterations = {} (limit 240), max |F_i(p*)| = {fmax:.3e}", r.iterations));
}

fn deblurring(rep: &mut Report) {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in [PresetName::DeblurGaussian53, PresetName::DeblurMotion53] {
        let p = preset(name);
        let run = run_preset(&p).unwrap();
        let ratio = run.summary.objective_final.unwrap() / run.summary.objective_initial.unwrap();
        let this = run.result.termination == Termination::TolReached && run.result.iterations <= 2000 && ratio <= 0.01;
        ok &= this;
        parts.push(format!(
            "{name}: {} after {} iterations, objective ratio {ratio:.4} ({})",
            run.result.termination,
            run.result.iterations,
            if this { "ok" } else { "above 0.01" }
        ));
    }
    rep.line(3, "deblur", ok, parts.join("; "));
}

fn linear_rate(rep: &mut Report) {
    let p = preset(PresetName::LinearRate);
    let AlgorithmVariant::Linear41b { lambda, nu, alpha } = p.variant else { unreachable!() };
    let (l, k) = (p.problem.lipschitz.unwrap(), p.problem.strong_monotonicity.unwrap());
    let rho = linear_rate_rho(linear_rate_t(lambda, l, k), nu, alpha);
    let star = p.problem.solution.clone().unwrap();
    let t0 = Instant::now();
    let solver = Solver::new(&p.problem, &p.config.solver, p.variant, p.config.stop).unwrap();
    let mut state = solver.initial_state(p.x0.clone(), p.x0.clone()).unwrap();
    let b = |s: &visolve_core::SolverState| dist(&s.x_curr, &star).powi(2) + dist(&s.x_curr, &s.x_prev).powi(2);
    let (mut prev, mut worst, mut steps) = (b(&state), f64::NEG_INFINITY, 0);
    while state.terminated.is_none() {
        solver.iterate(&mut state, &NoClock).unwrap();
        if state.terminated.is_some() {
            break;
        }
        let now = b(&state);
        worst = worst.max(now - (rho * prev + 1e-12));
        prev = now;
        steps += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = (l / k - 10.0).abs() < 1e-9 && worst <= 0.0 && steps > 0 && secs < 1.0;
    rep.line(
        4,
        "linear rate",
        ok,
        format!("n = 20, L/k = {:.6}, rho = {rho:.6}, {steps} steps, max excess over rho*b_n + 1e-12 = {worst:.3e}, {secs:.3} s", l / k),
    );
}

fn projections(rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (cases, mut worst_match, mut worst_idem, mut worst_var, mut worst_exp) = (64, 0.0f64, 0.0f64, f64::MIN, f64::MIN);
    for _ in 0..cases {
        let n = rng.gen_range(2..=6);
        let q = rng.gen_range(1..n);
        let t: Vec<Vec<f64>> = (0..q).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..-0.2)).collect();
        let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
        let inner: Vec<f64> = (0..n).map(|i| lower[i] + rng.gen_range(0.0..1.0) * (upper[i] - lower[i])).collect();
        let r: Vec<f64> = t.iter().map(|row| dot(row, &inner)).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let z2: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let set = PolyhedralSet::new(Matrix::from_rows(&t), r.clone(), lower.clone(), upper.clone()).unwrap();
        let p = project_polyhedron(&set, &z, 1e-10, DEFAULT_MAX_INNER).unwrap();
        let want = enumerate_projection(&t, &r, &lower, &upper, &z);
        worst_match = worst_match.max(norm_inf(&sub(&p, &want)));
        worst_idem = worst_idem.max(dist(&set.project(&p).unwrap(), &p));
        let p2 = set.project(&z2).unwrap();
        worst_var = worst_var.max(dot(&sub(&z, &p), &sub(&p2, &p)));
        worst_exp = worst_exp.max(dist(&p, &p2) - dist(&z, &z2));
    }
    let ok = worst_match <= 1e-6 && worst_idem <= 1e-9 && worst_var <= 1e-7 && worst_exp <= 1e-9;
    rep.line(
        5,
        "projections",
        ok,
        format!(
            "{cases} polyhedra: max mismatch {worst_match:.2e}, idempotence {worst_idem:.2e}, variational {worst_var:.2e}, expansion {worst_exp:.2e}"
        ),
    );
}

fn step_floor(rep: &mut Report) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in [PresetName::Network51, PresetName::DeblurGaussian53, PresetName::DeblurMotion53] {
        let p = preset(name);
        let l = estimate_lipschitz(&*p.problem.operator).unwrap();
        let cfg = p.variant.effective_config(&p.config.solver);
        let floor = (cfg.mu / l).min(cfg.lambda1);
        let min = run_preset(&p).unwrap().result.min_lambda().unwrap();
        ok &= min >= floor - 1e-12;
        parts.push(format!("{name}: min {min:.5} vs floor {floor:.5} (L = {l:.4})"));
    }
    rep.line(6, "step-size floor", ok, parts.join("; "));
}

fn fejer(rep: &mut Report) {
    let p = preset(PresetName::Network51);
    let net = NetworkProblem::six_node_example();
    let t: Vec<Vec<f64>> = (0..net.incidence().rows()).map(|i| net.incidence().row(i).to_vec()).collect();
    // exact solution; the published one is rounded to four digits
    let star = weighted_min_norm(&t, net.balances(), &[0.0; 8], net.capacities(), net.cost());
    let solver = Solver::new(&p.problem, &p.config.solver, p.variant, p.config.stop).unwrap();
    let mut state = solver.initial_state(p.x0.clone(), p.x0.clone()).unwrap();
    let mut bad = Vec::new();
    let mut checked = 0;
    while state.terminated.is_none() {
        let rec = solver.iterate(&mut state, &NoClock).unwrap();
        if state.terminated.is_some() || rec.n < 10 {
            continue;
        }
        checked += 1;
        let excess = dist(&state.u, &star) - dist(&state.w, &star);
        if excess > 1e-9 {
            bad.push(format!("n = {} by {excess:.3e}", rec.n));
        }
    }
    let detail = if bad.is_empty() {
        format!("{checked} iterations with n >= 10, none violate")
    } else {
        format!("{checked} iterations with n >= 10, violated at {}", bad.join(", "))
    };
    rep.line(7, "fejer", bad.is_empty(), detail);
}

fn ablation(rep: &mut Report) {
    let p = preset(PresetName::Network51);
    let rows = compare(&p.problem, &[AlgorithmVariant::Mdisem, AlgorithmVariant::NoInertia], &p.config, &p.x0).unwrap();
    let ok = rows[1].iterations >= rows[0].iterations;
    rep.line(8, "ablation", ok, format!("mdisem {} iterations, no_inertia {}", rows[0].iterations, rows[1].iterations));
}

fn sensitivity(rep: &mut Report) {
    let p = preset(PresetName::Network51);
    let mut cfg = p.config.clone();
    cfg.stop.max_iter = SWEEP_MAX_ITER;
    let res = sweep(&p.problem, &SweepGrid::from_table(&NETWORK_SENSITIVITY), &cfg, p.variant, &p.x0).unwrap();
    let converged = res.iter().filter(|r| r.outcome.converged_iterations().is_some()).count();
    let share = converged as f64 / res.len() as f64;
    let mut ok = share >= 0.8;
    let mut blocks = Vec::new();
    for (mu, sigma, row) in NETWORK_SENSITIVITY {
        let (fast_beta, _) = row.into_iter().min_by_key(|&(_, n)| n).unwrap();
        let ours = |beta: f64| {
            res.iter()
                .find(|r| r.cell.mu == mu && r.cell.sigma == sigma && r.cell.beta == beta)
                .and_then(|r| r.outcome.converged_iterations())
        };
        let best = row.iter().filter_map(|&(b, _)| ours(b)).min();
        let this = match (ours(fast_beta), best) {
            (Some(a), Some(b)) => a <= 2 * b,
            _ => false,
        };
        ok &= this;
        if !this {
            blocks.push(format!(
                "(mu {mu}, sigma {sigma}): beta {fast_beta} took {:?} vs fastest {:?}",
                ours(fast_beta),
                best
            ));
        }
    }
    let detail = format!(
        "{converged}/{} cells converged ({:.0}%), blocks outside 2x: {}",
        res.len(),
        100.0 * share,
        if blocks.is_empty() { String::from("none") } else { blocks.join("; ") }
    );
    rep.line(9, "sensitivity", ok, detail);
}

#[test]
fn acceptance() {
    let mut rep = Report { failed: Vec::new() };
    network_equilibrium(&mut rep);
    nash_cournot(&mut rep);
    deblurring(&mut rep);
    linear_rate(&mut rep);
    projections(&mut rep);
    step_floor(&mut rep);
    fejer(&mut rep);
    ablation(&mut rep);
    sensitivity(&mut rep);
    assert!(rep.failed.is_empty(), "failing criteria: {:?}", rep.failed);
}
