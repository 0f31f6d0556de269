//! The modified double-inertial subgradient extragradient iteration and its
//! special cases.
//!
//! One pass from `(x_n, x_{n-1}, λ_n)`:
//!
//! 1. `w = x_n + ν_n (x_n − x_{n-1})`, `y = P_C(w − βλ_n F w)`, then update λ.
//!    Stop if `w ≈ y` or `F y ≈ 0`.
//! 2. `η = w − y − βλ_n (Fw − Fy)`, `d = ⟨w − y, η⟩ / ‖η‖²`,
//!    `u = P_T(w − σλ_n d F y)` with `T = {z : ⟨w − βλ_n F w − y, z − y⟩ ≤ 0}`.
//! 3. `v = x_n + ξ_n (x_n − x_{n-1})`, `x_{n+1} = (1 − α_n) v + α_n u`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::config::{SolverConfig, StopRule};
use crate::error::{ConfigError, SolverError};
use crate::linalg;
use crate::problem::ProblemInstance;
use crate::projections::{HalfSpace, ProjectionOracle};
use crate::sequence::SeqSpec;
use crate::stepsize::{self, StepParams};

/// Relative threshold on `‖η‖` below which the iteration stops.
pub const ETA_REL_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmVariant {
    /// Full parameterization.
    Mdisem,
    /// `ν ≡ 1`, `ξ ≡ 0`, `δ ≡ χ ≡ 1`, `ζ ≡ 0`, `σ = β = 1`.
    Simplified41a,
    /// Constant step size with constant inertia and averaging; `σ = β = 1`, `ξ ≡ 0`.
    Linear41b { lambda: f64, nu: f64, alpha: f64 },
    /// `ν ≡ ξ ≡ 0`.
    NoInertia,
}

impl AlgorithmVariant {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmVariant::Mdisem => "mdisem",
            AlgorithmVariant::Simplified41a => "simplified_41a",
            AlgorithmVariant::Linear41b { .. } => "linear_41b",
            AlgorithmVariant::NoInertia => "no_inertia",
        }
    }

    /// The configuration this variant actually runs with.
    pub fn effective_config(&self, cfg: &SolverConfig) -> SolverConfig {
        let mut c = cfg.clone();
        match *self {
            AlgorithmVariant::Mdisem => {}
            AlgorithmVariant::Simplified41a => {
                c.nu_seq = SeqSpec::Constant(1.0);
                c.xi_seq = SeqSpec::Constant(0.0);
                c.delta_seq = SeqSpec::Constant(1.0);
                c.chi_seq = SeqSpec::Constant(1.0);
                c.zeta_seq = SeqSpec::Constant(0.0);
                c.sigma = 1.0;
                c.beta = 1.0;
            }
            AlgorithmVariant::Linear41b { lambda, nu, alpha } => {
                c.lambda1 = lambda;
                c.nu_seq = SeqSpec::Constant(nu);
                c.xi_seq = SeqSpec::Constant(0.0);
                c.alpha_seq = SeqSpec::Constant(alpha);
                c.sigma = 1.0;
                c.beta = 1.0;
            }
            AlgorithmVariant::NoInertia => {
                c.nu_seq = SeqSpec::Constant(0.0);
                c.xi_seq = SeqSpec::Constant(0.0);
            }
        }
        if c.xi_seq == SeqSpec::Constant(0.0) {
            c.xi_cap = 0.0;
        }
        c
    }

    fn adaptive_step(&self) -> bool {
        !matches!(self, AlgorithmVariant::Linear41b { .. })
    }
}

impl fmt::Display for AlgorithmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmVariant {
    type Err = ConfigError;

    /// Parses the parameter-free variants; `linear_41b` needs explicit constants.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mdisem" => Ok(AlgorithmVariant::Mdisem),
            "simplified_41a" => Ok(AlgorithmVariant::Simplified41a),
            "no_inertia" => Ok(AlgorithmVariant::NoInertia),
            "linear_41b" => Err(ConfigError::Invalid(String::from(
                "linear_41b needs lambda, nu and alpha; build it with linear_41b_params",
            ))),
            other => Err(ConfigError::Invalid(format!("unknown variant `{other}`"))),
        }
    }
}

/// `t = 1 − ½ min{(1−λL)²/(1+λL)², 2λk(1−λL)/(1+λL)²}`
pub fn linear_rate_t(lambda: f64, lipschitz: f64, strong: f64) -> f64 {
    let ll = lambda * lipschitz;
    let den = (1.0 + ll) * (1.0 + ll);
    let a = (1.0 - ll) * (1.0 - ll) / den;
    let b = 2.0 * lambda * strong * (1.0 - ll) / den;
    1.0 - 0.5 * a.min(b)
}

/// Contraction factor `ρ = 1 − α(1 − t(1 + ν))` of `‖x_n − p*‖² + ‖x_n − x_{n−1}‖²`.
pub fn linear_rate_rho(t: f64, nu: f64, alpha: f64) -> f64 {
    1.0 - alpha * (1.0 - t * (1.0 + nu))
}

/// Builds the constant-step variant after checking `λ ∈ (0, 1/L)`,
/// `0 ≤ ν < 1/t − 1` (when `k` is known) and `0 < α < 1/3`.
pub fn linear_41b_params(
    lambda: f64,
    nu: f64,
    alpha: f64,
    lipschitz: f64,
    strong: Option<f64>,
) -> Result<AlgorithmVariant, ConfigError> {
    if !(lambda > 0.0 && lambda * lipschitz < 1.0) {
        return Err(ConfigError::Invalid(format!("step {lambda} must lie in (0, 1/L) with L = {lipschitz}")));
    }
    if !(alpha > 0.0 && alpha < 1.0 / 3.0) {
        return Err(ConfigError::Invalid(format!("alpha = {alpha} must lie in (0, 1/3)")));
    }
    if !(nu >= 0.0) {
        return Err(ConfigError::Invalid(format!("nu = {nu} must be nonnegative")));
    }
    if let Some(k) = strong {
        let t = linear_rate_t(lambda, lipschitz, k);
        if !(nu < 1.0 / t - 1.0) {
            return Err(ConfigError::Invalid(format!("nu = {nu} must be below 1/t - 1 = {}", 1.0 / t - 1.0)));
        }
    }
    Ok(AlgorithmVariant::Linear41b { lambda, nu, alpha })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `w_n = y_n` (or `η_n = 0`): `y_n` solves the problem.
    ResidualZero,
    /// `F y_n = 0` within `operator_tol`.
    OperatorZero,
    /// A residual or relative-change tolerance was met.
    TolReached,
    MaxIter,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ResidualZero => "residual_zero",
            Termination::OperatorZero => "operator_zero",
            Termination::TolReached => "tol_reached",
            Termination::MaxIter => "max_iter",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-iteration metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    /// `E_n = ‖w_n − y_n‖`
    pub residual: f64,
    /// `λ_n`, the step used in this pass.
    pub lambda: f64,
    /// Distance from the produced iterate to the known solution.
    pub dist_to_solution: Option<f64>,
    /// `‖x_{n+1} − x_n‖`
    pub step_norm: f64,
    pub elapsed_ms: f64,
    /// `d_n`; `None` when the pass stopped before computing it.
    pub d: Option<f64>,
}

/// Mutable state of one run. The vectors hold the quantities of the most
/// recent pass (`w`, `y`, `u`, `v`, `eta` and the half-space `T_n`).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub n: usize,
    pub x_curr: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub lambda: f64,
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub eta: Vec<f64>,
    pub d: f64,
    pub halfspace: Option<HalfSpace>,
    pub terminated: Option<Termination>,
    /// The last pass stopped at step 1, so `y` is the answer.
    pub stopped_at_y: bool,
}

impl SolverState {
    pub fn new(x0: Vec<f64>, x1: Vec<f64>, lambda1: f64) -> Self {
        let n = x1.len();
        Self {
            n: 1,
            x_curr: x1,
            x_prev: x0,
            lambda: lambda1,
            w: vec![0.0; n],
            y: vec![0.0; n],
            u: vec![0.0; n],
            v: vec![0.0; n],
            eta: vec![0.0; n],
            d: 0.0,
            halfspace: None,
            terminated: None,
            stopped_at_y: false,
        }
    }

    /// The point reported as the answer: `y_n` after a solution stop, else `x_n`.
    pub fn solution(&self) -> &[f64] {
        if self.stopped_at_y {
            &self.y
        } else {
            &self.x_curr
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub x: Vec<f64>,
    pub termination: Termination,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub wall_time_ms: f64,
}

impl RunResult {
    pub fn final_residual(&self) -> Option<f64> {
        self.trace.last().map(|r| r.residual)
    }

    pub fn min_lambda(&self) -> Option<f64> {
        self.trace.iter().map(|r| r.lambda).reduce(f64::min)
    }
}

/// Source of elapsed wall time, in milliseconds since the run started.
pub trait Clock {
    fn elapsed_ms(&self) -> f64;
}

/// Reports zero; used where timing is unavailable or unwanted.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_ms(&self) -> f64 {
        0.0
    }
}

/// `x_curr + coeff · (x_curr − x_prev)`
pub fn inertial_extrapolate(x_curr: &[f64], x_prev: &[f64], coeff: f64) -> Vec<f64> {
    x_curr.iter().zip(x_prev).map(|(a, b)| a + coeff * (a - b)).collect()
}

/// `P_C(w − βλ F w)` given `F w`.
pub fn forward_step(
    w: &[f64],
    fw: &[f64],
    lambda: f64,
    beta: f64,
    feasible: &ProjectionOracle,
) -> Result<Vec<f64>, SolverError> {
    let s = beta * lambda;
    let arg: Vec<f64> = w.iter().zip(fw).map(|(wi, fi)| wi - s * fi).collect();
    Ok(feasible.project(&arg)?)
}

/// `T_n = {z : ⟨a, z − y⟩ ≤ 0}` with `a = w − βλFw − y`.
pub fn build_tn(w: &[f64], y: &[f64], beta_lambda_fw: &[f64]) -> HalfSpace {
    let a: Vec<f64> = w.iter().zip(beta_lambda_fw).zip(y).map(|((wi, s), yi)| wi - s - yi).collect();
    let b = linalg::dot(&a, y);
    // b = ⟨0, y⟩ = 0 whenever a vanishes, so construction cannot fail
    HalfSpace::new(a, b).expect("half-space through y is never empty")
}

/// `η = w − y − βλ(Fw − Fy)`
pub fn compute_eta(w: &[f64], y: &[f64], beta: f64, lambda: f64, fw: &[f64], fy: &[f64]) -> Vec<f64> {
    let s = beta * lambda;
    (0..w.len()).map(|i| w[i] - y[i] - s * (fw[i] - fy[i])).collect()
}

/// `d = ⟨w − y, η⟩ / ‖η‖²`, or `None` when `‖η‖` is numerically zero.
pub fn compute_dn(w: &[f64], y: &[f64], eta: &[f64]) -> Option<f64> {
    let eta_norm = linalg::norm(eta);
    if eta_norm <= ETA_REL_EPS * (1.0 + linalg::norm(w)) {
        return None;
    }
    let num: f64 = w.iter().zip(y).zip(eta).map(|((wi, yi), ei)| (wi - yi) * ei).sum();
    Some(num / (eta_norm * eta_norm))
}

/// `P_{T_n}(w − σλ d F y)`
pub fn contraction_step(w: &[f64], sigma: f64, lambda: f64, d: f64, fy: &[f64], tn: &HalfSpace) -> Vec<f64> {
    let s = sigma * lambda * d;
    let mut arg: Vec<f64> = w.iter().zip(fy).map(|(wi, fi)| wi - s * fi).collect();
    tn.project_in_place(&mut arg);
    arg
}

fn ensure_finite(v: &[f64], quantity: &'static str, n: usize) -> Result<(), SolverError> {
    if linalg::all_finite(v) {
        Ok(())
    } else {
        Err(SolverError::NonFinite { quantity, n })
    }
}

/// A configured run: problem, effective parameters and stopping rule.
pub struct Solver<'a> {
    problem: &'a ProblemInstance,
    cfg: SolverConfig,
    variant: AlgorithmVariant,
    stop: StopRule,
}

impl<'a> Solver<'a> {
    pub fn new(
        problem: &'a ProblemInstance,
        cfg: &SolverConfig,
        variant: AlgorithmVariant,
        stop: StopRule,
    ) -> Result<Self, SolverError> {
        stop.validate()?;
        if let AlgorithmVariant::Linear41b { lambda, nu, alpha } = variant {
            let l = problem.lipschitz_constant().map_err(|_| {
                ConfigError::Invalid(String::from("linear_41b requires a known Lipschitz constant"))
            })?;
            linear_41b_params(lambda, nu, alpha, l, problem.strong_monotonicity)?;
        }
        Ok(Self { problem, cfg: variant.effective_config(cfg), variant, stop })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn variant(&self) -> AlgorithmVariant {
        self.variant
    }

    pub fn initial_state(&self, x0: Vec<f64>, x1: Vec<f64>) -> Result<SolverState, SolverError> {
        let dim = self.problem.dim();
        for x in [&x0, &x1] {
            if x.len() != dim {
                return Err(SolverError::DimensionMismatch { expected: dim, got: x.len() });
            }
        }
        Ok(SolverState::new(x0, x1, self.cfg.lambda1))
    }

    /// One full pass. Sets `state.terminated` when a stopping test fires.
    pub fn iterate(&self, state: &mut SolverState, clock: &dyn Clock) -> Result<IterationRecord, SolverError> {
        let cfg = &self.cfg;
        let op = &*self.problem.operator;
        let n = state.n;
        let lambda = state.lambda;

        // Step 1
        let nu = cfg.nu_seq.at(n);
        state.w = inertial_extrapolate(&state.x_curr, &state.x_prev, nu);
        let fw = op.apply(&state.w)?;
        ensure_finite(&fw, "F(w)", n)?;
        state.y = forward_step(&state.w, &fw, lambda, cfg.beta, &self.problem.feasible)?;
        ensure_finite(&state.y, "y", n)?;
        let fy = op.apply(&state.y)?;
        ensure_finite(&fy, "F(y)", n)?;
        let residual = linalg::dist(&state.w, &state.y);

        let next_lambda = if self.variant.adaptive_step() {
            let p = StepParams {
                mu: cfg.mu,
                delta: cfg.delta_seq.at(n),
                chi: cfg.chi_seq.at(n),
                zeta: cfg.zeta_seq.at(n),
            };
            stepsize::next_lambda(lambda, &state.w, &state.y, &fw, &fy, p)
        } else {
            lambda
        };

        let mut record = IterationRecord {
            n,
            residual,
            lambda,
            dist_to_solution: None,
            step_norm: 0.0,
            elapsed_ms: 0.0,
            d: None,
        };

        let stop_at_y = if residual == 0.0 {
            Some(Termination::ResidualZero)
        } else if residual <= self.stop.residual_tol {
            Some(Termination::TolReached)
        } else if linalg::norm(&fy) <= self.stop.operator_tol {
            Some(Termination::OperatorZero)
        } else {
            None
        };

        // Step 2
        let eta = compute_eta(&state.w, &state.y, cfg.beta, lambda, &fw, &fy);
        let d = match stop_at_y {
            Some(_) => None,
            None => compute_dn(&state.w, &state.y, &eta),
        };
        state.eta = eta;
        let Some(d) = d else {
            state.terminated = Some(stop_at_y.unwrap_or(Termination::ResidualZero));
            state.d = f64::NAN;
            state.halfspace = None;
            state.stopped_at_y = true;
            record.step_norm = linalg::dist(&state.y, &state.x_curr);
            record.dist_to_solution = self.problem.solution.as_deref().map(|p| linalg::dist(&state.y, p));
            record.elapsed_ms = clock.elapsed_ms();
            return Ok(record);
        };
        state.d = d;
        record.d = Some(d);

        let s = cfg.beta * lambda;
        let scaled_fw: Vec<f64> = fw.iter().map(|v| s * v).collect();
        let tn = build_tn(&state.w, &state.y, &scaled_fw);
        state.u = contraction_step(&state.w, cfg.sigma, lambda, d, &fy, &tn);
        ensure_finite(&state.u, "u", n)?;
        state.halfspace = Some(tn);

        // Step 3
        let xi = cfg.xi_seq.at(n);
        let alpha = cfg.alpha_seq.at(n);
        state.v = inertial_extrapolate(&state.x_curr, &state.x_prev, xi);
        let x_next: Vec<f64> = state.v.iter().zip(&state.u).map(|(v, u)| (1.0 - alpha) * v + alpha * u).collect();
        ensure_finite(&x_next, "x", n)?;

        let step = linalg::dist(&x_next, &state.x_curr);
        let x_norm = linalg::norm(&state.x_curr);
        record.step_norm = step;
        record.dist_to_solution = self.problem.solution.as_deref().map(|p| linalg::dist(&x_next, p));

        state.x_prev = core::mem::replace(&mut state.x_curr, x_next);
        state.lambda = next_lambda;
        state.n += 1;

        if self.stop.relative_tol > 0.0 && step < self.stop.relative_tol * x_norm {
            state.terminated = Some(Termination::TolReached);
        }
        record.elapsed_ms = clock.elapsed_ms();
        Ok(record)
    }

    /// Iterates until a stopping test fires or `max_iter` passes have run.
    pub fn run(&self, x0: Vec<f64>, x1: Vec<f64>, clock: &dyn Clock) -> Result<RunResult, SolverError> {
        let mut state = self.initial_state(x0, x1)?;
        let mut trace = Vec::new();
        while trace.len() < self.stop.max_iter {
            let rec = self.iterate(&mut state, clock)?;
            trace.push(rec);
            if state.terminated.is_some() {
                break;
            }
        }
        let termination = state.terminated.unwrap_or(Termination::MaxIter);
        Ok(RunResult {
            x: state.solution().to_vec(),
            termination,
            iterations: trace.len(),
            trace,
            wall_time_ms: clock.elapsed_ms(),
        })
    }
}

/// Runs `variant` on `problem` from `(x0, x1)` without timing.
pub fn run(
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    variant: AlgorithmVariant,
    stop: StopRule,
    x0: Vec<f64>,
    x1: Option<Vec<f64>>,
) -> Result<RunResult, SolverError> {
    let x1 = x1.unwrap_or_else(|| x0.clone());
    Solver::new(problem, cfg, variant, stop)?.run(x0, x1, &NoClock)
}
