//! Experiment presets, sensitivity sweeps and variant comparisons.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use visolve_core::config::is_runnable;
use visolve_core::linalg;
use visolve_core::operators::{
    build_gaussian_kernel, build_motion_kernel, DeblurProblem, Kernel, LinearVIProblem, NashProblem, NetworkProblem,
};
use visolve_core::solver::{linear_rate_t, Termination};
use visolve_core::{validate_config, AlgorithmVariant, ProblemInstance, RunResult, SeqSpec, Severity, SolverConfig, StopRule, Violation};

use crate::clock::StdClock;
use crate::error::{Error, Result};
use crate::format::trace::{real, write_trace, TraceRow};
use crate::format::RunConfig;

pub const DEBLUR_SIZE: usize = 64;
/// Seed of the random SPD instance in the `linear_rate` preset.
pub const LINEAR_RATE_SEED: u64 = 20;
pub const LINEAR_RATE_DIM: usize = 20;
pub const LINEAR_RATE_CONDITION: f64 = 10.0;
pub const LINEAR_RATE_ALPHA: f64 = 0.3;
pub const SWEEP_MAX_ITER: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetName {
    Network51,
    Nash52,
    DeblurGaussian53,
    DeblurMotion53,
    LinearRate,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::Network51,
        PresetName::Nash52,
        PresetName::DeblurGaussian53,
        PresetName::DeblurMotion53,
        PresetName::LinearRate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::Network51 => "network_51",
            PresetName::Nash52 => "nash_52",
            PresetName::DeblurGaussian53 => "deblur_gaussian_53",
            PresetName::DeblurMotion53 => "deblur_motion_53",
            PresetName::LinearRate => "linear_rate",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown preset `{s}`")))
    }
}

/// A problem bundled with the settings used to solve it.
#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub name: String,
    pub problem: ProblemInstance,
    pub config: RunConfig,
    pub variant: AlgorithmVariant,
    pub x0: Vec<f64>,
    /// Kept for objective reporting on deblurring runs.
    pub deblur: Option<DeblurProblem>,
}

/// Checkerboard of 8-pixel squares at levels 0 and 0.8 plus a left-to-right
/// ramp of height 0.2, so values cover `[0, 1]`.
pub fn synthetic_image(rows: usize, cols: usize) -> Vec<f64> {
    let ramp = |j: usize| if cols > 1 { 0.2 * j as f64 / (cols - 1) as f64 } else { 0.0 };
    (0..rows)
        .flat_map(|i| (0..cols).map(move |j| if (i / 8 + j / 8) % 2 == 0 { 0.8 } else { 0.0 } + ramp(j)))
        .collect()
}

pub fn deblur_config() -> SolverConfig {
    SolverConfig { beta: 0.76, nu_seq: SeqSpec::Constant(0.4), ..SolverConfig::default() }
}

pub fn deblur_stop(relative_tol: f64) -> StopRule {
    StopRule { residual_tol: 0.0, relative_tol, operator_tol: 0.0, max_iter: 2000 }
}

/// Deblurring run started from the observation.
pub fn deblur_preset(name: &str, problem: DeblurProblem, relative_tol: f64) -> ExperimentPreset {
    let x0 = problem.observed().to_vec();
    ExperimentPreset {
        name: name.to_string(),
        problem: ProblemInstance::deblur(problem.clone()),
        config: RunConfig { solver: deblur_config(), stop: deblur_stop(relative_tol) },
        variant: AlgorithmVariant::Mdisem,
        x0,
        deblur: Some(problem),
    }
}

fn blurred_synthetic(kernel: Kernel) -> Result<DeblurProblem> {
    let img = synthetic_image(DEBLUR_SIZE, DEBLUR_SIZE);
    Ok(DeblurProblem::from_clean_image(DEBLUR_SIZE, DEBLUR_SIZE, kernel, &img)?)
}

/// Random SPD matrix with eigenvalues evenly spaced in `[1, condition]`,
/// in an orthonormal basis from Gram-Schmidt on Gaussian vectors.
pub fn random_spd_problem(dim: usize, condition: f64, seed: u64) -> Result<LinearVIProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        // two passes keep the basis orthonormal to rounding
        for _ in 0..2 {
            for b in &basis {
                let c = linalg::dot(&v, b);
                linalg::axpy(-c, b, &mut v);
            }
        }
        let nv = linalg::norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    let eig: Vec<f64> = (0..dim)
        .map(|i| if dim > 1 { 1.0 + (condition - 1.0) * i as f64 / (dim - 1) as f64 } else { 1.0 })
        .collect();
    let q = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok(LinearVIProblem::from_spectrum(&basis, &eig, q)?)
}

/// λ = 0.9/L, α = 0.3 and ν halfway to its bound `1/t − 1`.
pub fn linear_rate_variant(problem: &ProblemInstance) -> AlgorithmVariant {
    let l = problem.lipschitz.unwrap_or(1.0);
    let k = problem.strong_monotonicity.unwrap_or(0.0);
    let lambda = 0.9 / l;
    let t = linear_rate_t(lambda, l, k);
    AlgorithmVariant::Linear41b { lambda, nu: 0.5 * (1.0 / t - 1.0), alpha: LINEAR_RATE_ALPHA }
}

pub fn build_preset(name: PresetName) -> Result<ExperimentPreset> {
    let plain = |problem: ProblemInstance, x0: Vec<f64>| ExperimentPreset {
        name: name.to_string(),
        problem,
        config: RunConfig::default(),
        variant: AlgorithmVariant::Mdisem,
        x0,
        deblur: None,
    };
    Ok(match name {
        PresetName::Network51 => plain(ProblemInstance::network(NetworkProblem::six_node_example())?, vec![1.0; 8]),
        PresetName::Nash52 => plain(ProblemInstance::nash(NashProblem::five_firm_example()), vec![1.0; 5]),
        PresetName::DeblurGaussian53 => {
            deblur_preset(name.as_str(), blurred_synthetic(build_gaussian_kernel(5, 1.5)?)?, 1e-3)
        }
        PresetName::DeblurMotion53 => {
            deblur_preset(name.as_str(), blurred_synthetic(build_motion_kernel(5, 60.0)?)?, 1e-2)
        }
        PresetName::LinearRate => {
            let lin = random_spd_problem(LINEAR_RATE_DIM, LINEAR_RATE_CONDITION, LINEAR_RATE_SEED)?;
            let problem = ProblemInstance::linear(lin);
            let variant = linear_rate_variant(&problem);
            let stop = StopRule { residual_tol: 1e-10, relative_tol: 0.0, operator_tol: 0.0, max_iter: 5000 };
            ExperimentPreset {
                config: RunConfig { solver: SolverConfig::default(), stop },
                variant,
                ..plain(problem, vec![1.0; LINEAR_RATE_DIM])
            }
        }
    })
}

/// Rejects configs with range errors and returns the remaining warnings.
pub fn check_config(cfg: &SolverConfig) -> Result<Vec<Violation>> {
    let v = validate_config(cfg);
    if is_runnable(&v) {
        Ok(v)
    } else {
        let msg = v.iter().filter(|x| x.severity == Severity::Error).map(|x| x.to_string()).collect::<Vec<_>>();
        Err(Error::Invalid(msg.join("; ")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub name: String,
    pub variant: String,
    pub iterations: usize,
    pub termination: Termination,
    pub wall_time_ms: f64,
    pub final_residual: Option<f64>,
    pub min_lambda: Option<f64>,
    /// ∞-norm distance to the known solution.
    pub error_inf: Option<f64>,
    pub objective_initial: Option<f64>,
    pub objective_final: Option<f64>,
}

/// Six significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        let digits = if v == 0.0 { 0 } else { v.abs().log10().floor() as i32 };
        format!("{:.*}", (5 - digits).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| String::from("-"));
        let rows = [
            ("run", self.name.clone()),
            ("variant", self.variant.clone()),
            ("iterations", self.iterations.to_string()),
            ("termination", self.termination.to_string()),
            ("wall_time_ms", sig6(self.wall_time_ms)),
            ("final_E_n", opt(self.final_residual)),
            ("min_lambda", opt(self.min_lambda)),
            ("error_inf", opt(self.error_inf)),
            ("objective_initial", opt(self.objective_initial)),
            ("objective_final", opt(self.objective_final)),
        ];
        for (k, v) in rows {
            writeln!(f, "{k:<18} {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PresetRun {
    pub result: RunResult,
    pub summary: Summary,
}

fn error_inf(x: &[f64], p: &ProblemInstance) -> Option<f64> {
    p.solution.as_ref().map(|s| linalg::norm_inf(&linalg::sub(x, s)))
}

pub fn run_preset(preset: &ExperimentPreset) -> Result<PresetRun> {
    let cfg = &preset.config;
    check_config(&preset.variant.effective_config(&cfg.solver))?;
    let clock = StdClock::start();
    let solver = visolve_core::Solver::new(&preset.problem, &cfg.solver, preset.variant, cfg.stop)?;
    let result = solver.run(preset.x0.clone(), preset.x0.clone(), &clock)?;
    let summary = Summary {
        name: preset.name.clone(),
        variant: preset.variant.name().to_string(),
        iterations: result.iterations,
        termination: result.termination,
        wall_time_ms: result.wall_time_ms,
        final_residual: result.final_residual(),
        min_lambda: result.min_lambda(),
        error_inf: error_inf(&result.x, &preset.problem),
        objective_initial: preset.deblur.as_ref().map(|d| d.objective(&preset.x0)),
        objective_final: preset.deblur.as_ref().map(|d| d.objective(&result.x)),
    };
    Ok(PresetRun { result, summary })
}

pub fn trace_rows(result: &RunResult, timings: bool) -> Vec<TraceRow> {
    result.trace.iter().map(|r| TraceRow::from_record(r, timings)).collect()
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

/// Writes `trace_<name>.csv` under `dir`.
pub fn write_trace_file(dir: &Path, name: &str, result: &RunResult, timings: bool) -> Result<PathBuf> {
    let path = dir.join(format!("trace_{name}.csv"));
    write_trace(create(&path)?, &trace_rows(result, timings))?;
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub mu: f64,
    pub sigma: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub cells: Vec<SweepCell>,
}

/// Per (μ, σ) block, four β values and the iteration counts reported for them.
pub type SensitivityTable = [(f64, f64, [(f64, usize); 4]); 9];

pub const NETWORK_SENSITIVITY: SensitivityTable = [
    (0.2323, 1.8, [(1.4, 56), (2.6, 88), (3.1, 126), (4.6, 199)]),
    (0.2323, 4.9, [(2.5, 74), (3.1, 65), (3.9, 87), (4.1, 189)]),
    (0.2323, 5.6, [(2.9, 49), (3.3, 59), (3.7, 64), (4.01, 81)]),
    (0.3332, 0.49, [(0.30, 90), (1.1, 160), (2.6, 571), (2.8, 729)]),
    (0.3332, 1.21, [(0.8, 56), (1.2, 70), (2.2, 141), (2.7, 232)]),
    (0.3332, 2.44, [(1.23, 60), (1.4, 44), (2.6, 76), (3.0, 187)]),
    (0.464, 0.5, [(0.3, 76), (1.4, 217), (1.9, 413), (2.1, 624)]),
    (0.464, 1.8, [(1.0, 59), (1.23, 47), (1.96, 82), (2.04, 119)]),
    (0.464, 2.9, [(1.56, 50), (1.72, 55), (1.89, 47), (2.06, 71)]),
];

pub const NASH_SENSITIVITY: SensitivityTable = [
    (0.2323, 1.8, [(1.4, 83), (2.6, 76), (3.1, 76), (4.2, 67)]),
    (0.2323, 4.9, [(2.5, 55), (3.1, 49), (3.9, 31), (4.1, 65)]),
    (0.2323, 5.6, [(2.9, 48), (3.3, 44), (3.7, 30), (4.01, 31)]),
    (0.3332, 0.49, [(0.30, 241), (1.1, 182), (2.6, 96), (2.8, 97)]),
    (0.3332, 1.21, [(0.8, 92), (1.2, 82), (2.2, 78), (2.7, 77)]),
    (0.3332, 2.44, [(1.23, 81), (1.4, 83), (2.6, 78), (3.0, 74)]),
    (0.464, 0.5, [(0.3, 203), (1.4, 88), (1.9, 90), (2.1, 90)]),
    (0.464, 1.8, [(1.0, 146), (1.23, 116), (1.96, 90), (2.04, 91)]),
    (0.464, 2.9, [(1.56, 95), (1.72, 92), (1.89, 90), (2.06, 91)]),
];

impl SweepGrid {
    pub fn cartesian(mu: &[f64], beta: &[f64], sigma: &[f64]) -> Self {
        let cells = mu
            .iter()
            .flat_map(|&mu| sigma.iter().flat_map(move |&sigma| beta.iter().map(move |&beta| SweepCell { mu, sigma, beta })))
            .collect();
        Self { cells }
    }

    pub fn from_table(table: &SensitivityTable) -> Self {
        let cells = table
            .iter()
            .flat_map(|&(mu, sigma, row)| row.into_iter().map(move |(beta, _)| SweepCell { mu, sigma, beta }))
            .collect();
        Self { cells }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Converged { iterations: usize, termination: Termination },
    MaxIter { iterations: usize },
    ConfigViolation(String),
    Failed(String),
}

impl CellOutcome {
    pub fn converged_iterations(&self) -> Option<usize> {
        match self {
            CellOutcome::Converged { iterations, .. } => Some(*iterations),
            _ => None,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            CellOutcome::Converged { .. } => "converged",
            CellOutcome::MaxIter { .. } => "max_iter",
            CellOutcome::ConfigViolation(_) => "config_violation",
            CellOutcome::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cell: SweepCell,
    pub outcome: CellOutcome,
    pub error_inf: Option<f64>,
}

fn run_cell(problem: &ProblemInstance, base: &RunConfig, variant: AlgorithmVariant, x0: &[f64], cell: SweepCell) -> SweepResult {
    let cfg = SolverConfig { mu: cell.mu, sigma: cell.sigma, beta: cell.beta, ..base.solver.clone() };
    if let Err(e) = check_config(&variant.effective_config(&cfg)) {
        return SweepResult { cell, outcome: CellOutcome::ConfigViolation(e.to_string()), error_inf: None };
    }
    match visolve_core::run(problem, &cfg, variant, base.stop, x0.to_vec(), None) {
        Ok(r) => {
            let outcome = if r.termination == Termination::MaxIter {
                CellOutcome::MaxIter { iterations: r.iterations }
            } else {
                CellOutcome::Converged { iterations: r.iterations, termination: r.termination }
            };
            SweepResult { cell, outcome, error_inf: error_inf(&r.x, problem) }
        }
        Err(e) => SweepResult { cell, outcome: CellOutcome::Failed(e.to_string()), error_inf: None },
    }
}

/// One run per cell, in parallel. Results are sorted by `(μ, σ, β)`.
pub fn sweep(
    problem: &ProblemInstance,
    grid: &SweepGrid,
    base: &RunConfig,
    variant: AlgorithmVariant,
    x0: &[f64],
) -> Result<Vec<SweepResult>> {
    if grid.cells.is_empty() {
        return Err(Error::Invalid(String::from("sweep grid is empty")));
    }
    let mut out: Vec<SweepResult> =
        grid.cells.par_iter().map(|&cell| run_cell(problem, base, variant, x0, cell)).collect();
    out.sort_by(|a, b| {
        let key = |c: &SweepCell| [c.mu, c.sigma, c.beta];
        let (ka, kb) = (key(&a.cell), key(&b.cell));
        ka.iter().zip(&kb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

pub fn write_sweep_csv<W: Write>(out: W, results: &[SweepResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mu", "sigma", "beta", "status", "iterations", "termination", "error_inf", "reason"])?;
    for r in results {
        let (iters, term, reason) = match &r.outcome {
            CellOutcome::Converged { iterations, termination } => (iterations.to_string(), termination.to_string(), String::new()),
            CellOutcome::MaxIter { iterations } => (iterations.to_string(), Termination::MaxIter.to_string(), String::new()),
            CellOutcome::ConfigViolation(m) | CellOutcome::Failed(m) => (String::new(), String::new(), m.clone()),
        };
        w.write_record([
            real(r.cell.mu),
            real(r.cell.sigma),
            real(r.cell.beta),
            r.outcome.status().to_string(),
            iters,
            term,
            r.error_inf.map(real).unwrap_or_default(),
            reason,
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_sweep_file(dir: &Path, problem: &str, results: &[SweepResult]) -> Result<PathBuf> {
    let path = dir.join(format!("sweep_{problem}.csv"));
    write_sweep_csv(create(&path)?, results)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub variant: String,
    pub iterations: usize,
    pub termination: Termination,
    pub wall_time_ms: f64,
    pub final_residual: Option<f64>,
    pub error_inf: Option<f64>,
}

/// Runs every variant from the same start.
pub fn compare(
    problem: &ProblemInstance,
    variants: &[AlgorithmVariant],
    cfg: &RunConfig,
    x0: &[f64],
) -> Result<Vec<CompareRow>> {
    if variants.len() < 2 {
        return Err(Error::Invalid(String::from("compare needs at least two variants")));
    }
    variants
        .iter()
        .map(|&v| {
            check_config(&v.effective_config(&cfg.solver))?;
            let clock = StdClock::start();
            let r = visolve_core::Solver::new(problem, &cfg.solver, v, cfg.stop)?.run(x0.to_vec(), x0.to_vec(), &clock)?;
            Ok(CompareRow {
                variant: v.name().to_string(),
                iterations: r.iterations,
                termination: r.termination,
                wall_time_ms: r.wall_time_ms,
                final_residual: r.final_residual(),
                error_inf: error_inf(&r.x, problem),
            })
        })
        .collect()
}

pub fn write_compare_csv<W: Write>(out: W, rows: &[CompareRow], timings: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "iterations", "termination", "final_E_n", "error_inf", "wall_time_ms"])?;
    for r in rows {
        w.write_record([
            r.variant.clone(),
            r.iterations.to_string(),
            r.termination.to_string(),
            r.final_residual.map(real).unwrap_or_default(),
            r.error_inf.map(real).unwrap_or_default(),
            if timings { real(r.wall_time_ms) } else { String::new() },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_compare_file(dir: &Path, problem: &str, rows: &[CompareRow], timings: bool) -> Result<PathBuf> {
    let path = dir.join(format!("compare_{problem}.csv"));
    write_compare_csv(create(&path)?, rows, timings)?;
    Ok(path)
}

/// Aligned text table for the terminal.
pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = format!("{:<16} {:>10} {:<14} {:>12} {:>12} {:>12}\n", "variant", "iterations", "termination", "final_E_n", "error_inf", "time_ms");
    for r in rows {
        let opt = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| String::from("-"));
        out.push_str(&format!(
            "{:<16} {:>10} {:<14} {:>12} {:>12} {:>12}\n",
            r.variant,
            r.iterations,
            r.termination.to_string(),
            opt(r.final_residual),
            opt(r.error_inf),
            sig6(r.wall_time_ms)
        ));
    }
    out
}

pub fn sweep_table(results: &[SweepResult]) -> String {
    let mut out = format!("{:>8} {:>8} {:>8} {:<17} {:>10}\n", "mu", "sigma", "beta", "status", "iterations");
    for r in results {
        let iters = match &r.outcome {
            CellOutcome::Converged { iterations, .. } | CellOutcome::MaxIter { iterations } => iterations.to_string(),
            _ => String::from("-"),
        };
        out.push_str(&format!(
            "{:>8} {:>8} {:>8} {:<17} {:>10}\n",
            sig6(r.cell.mu),
            sig6(r.cell.sigma),
            sig6(r.cell.beta),
            r.outcome.status(),
            iters
        ));
    }
    out
}
