//! Solver parameters, stopping rules and assumption checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::ConfigError;
use crate::sequence::SeqSpec;

/// Number of sequence terms sampled by [`validate_config`].
pub const DEFAULT_CHECK_TERMS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationMode {
    /// Every parameter assumption is an error.
    Strict,
    /// Sequence assumptions only warn; scalar ranges are still errors.
    #[default]
    Paper,
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationMode::Strict => "strict",
            ValidationMode::Paper => "paper",
        })
    }
}

impl FromStr for ValidationMode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "strict" => Ok(ValidationMode::Strict),
            "paper" => Ok(ValidationMode::Paper),
            other => Err(ConfigError::Invalid(format!("unknown validation mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Step-size contraction factor, in (0, 1).
    pub mu: f64,
    pub lambda1: f64,
    /// Relaxation of the contraction step, in (0, 2/mu).
    pub sigma: f64,
    /// Forward-step scale, in (sigma/2, 1/mu).
    pub beta: f64,
    pub theta_bar: f64,
    pub alpha_seq: SeqSpec,
    pub nu_seq: SeqSpec,
    pub xi_seq: SeqSpec,
    pub delta_seq: SeqSpec,
    pub chi_seq: SeqSpec,
    pub zeta_seq: SeqSpec,
    pub xi_cap: f64,
    pub validation_mode: ValidationMode,
}

impl Default for SolverConfig {
    /// The parameter set used for the network and Nash experiments.
    fn default() -> Self {
        Self {
            mu: 0.6,
            lambda1: 0.6,
            sigma: 1.5,
            beta: 0.8,
            theta_bar: 8.0,
            alpha_seq: SeqSpec::Constant(0.5),
            nu_seq: SeqSpec::Constant(1.0),
            xi_seq: SeqSpec::Constant(0.499),
            delta_seq: SeqSpec::OnePlusInvN,
            chi_seq: SeqSpec::OnePlusInvPow(1.1),
            zeta_seq: SeqSpec::InvPow(1.1),
            xi_cap: 0.499,
            validation_mode: ValidationMode::Paper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Name of the offending parameter (config key).
    pub parameter: &'static str,
    /// Assumption label, e.g. `A5`, or `range` for scalar checks.
    pub rule: &'static str,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev} [{}] {}: {}", self.rule, self.parameter, self.message)
    }
}

/// Checks the scalar ranges and the sequence assumptions on the first
/// [`DEFAULT_CHECK_TERMS`] terms.
pub fn validate_config(cfg: &SolverConfig) -> Vec<Violation> {
    validate_config_terms(cfg, DEFAULT_CHECK_TERMS)
}

pub fn validate_config_terms(cfg: &SolverConfig, check_terms: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut scalar = |parameter: &'static str, ok: bool, message: String| {
        if !ok {
            out.push(Violation { parameter, rule: "range", severity: Severity::Error, message });
        }
    };
    let SolverConfig { mu, lambda1, sigma, beta, theta_bar, .. } = *cfg;

    scalar("mu", mu > 0.0 && mu < 1.0, format!("mu = {mu} must lie in (0, 1)"));
    scalar("lambda1", lambda1 > 0.0 && lambda1.is_finite(), format!("lambda1 = {lambda1} must be positive"));
    scalar(
        "sigma",
        sigma > 0.0 && sigma < 2.0 / mu,
        format!("sigma = {sigma} must lie in (0, 2/mu) = (0, {})", 2.0 / mu),
    );
    scalar(
        "beta",
        beta > sigma / 2.0 && beta < 1.0 / mu,
        format!("beta = {beta} must lie in (sigma/2, 1/mu) = ({}, {})", sigma / 2.0, 1.0 / mu),
    );
    scalar("theta_bar", theta_bar > 2.0, format!("theta_bar = {theta_bar} must exceed 2"));

    let severity = match cfg.validation_mode {
        ValidationMode::Strict => Severity::Error,
        ValidationMode::Paper => Severity::Warning,
    };
    let mut seq = |parameter: &'static str, rule: &'static str, message: String| {
        out.push(Violation { parameter, rule, severity, message });
    };
    let terms = check_terms.max(1);

    // (A4)
    if let Some(n) = first_failure(terms, |n| {
        let (a, b) = (cfg.nu_seq.at(n), cfg.nu_seq.at(n + 1));
        0.0 <= a && a <= b && b <= 1.0
    }) {
        seq("nu_seq", "A4", format!("needs 0 <= nu_n <= nu_(n+1) <= 1; fails at n = {n}"));
    }

    // (A5)
    let xi_bound = f64::min((theta_bar - libm::sqrt(2.0 * theta_bar)) / theta_bar, cfg.nu_seq.at(1));
    if !(cfg.xi_cap < xi_bound) {
        seq(
            "xi_cap",
            "A5",
            format!("xi = {} must be below min((theta-sqrt(2 theta))/theta, nu_1) = {xi_bound}", cfg.xi_cap),
        );
    }
    if let Some(n) = first_failure(terms, |n| {
        let (a, b) = (cfg.xi_seq.at(n), cfg.xi_seq.at(n + 1));
        0.0 <= a && a <= b && b <= cfg.xi_cap
    }) {
        seq("xi_seq", "A5", format!("needs 0 <= xi_n <= xi_(n+1) <= xi; fails at n = {n}"));
    }

    // (A6)
    let alpha_bound = 1.0 / (1.0 + theta_bar);
    if let Some(n) = first_failure(terms, |n| {
        let (a, b) = (cfg.alpha_seq.at(n), cfg.alpha_seq.at(n + 1));
        0.0 < a && a <= b && b < alpha_bound
    }) {
        seq(
            "alpha_seq",
            "A6",
            format!("needs 0 < alpha_n <= alpha_(n+1) < 1/(1+theta) = {alpha_bound}; fails at n = {n}"),
        );
    }

    // (A7): sampled lower bounds plus closed-form limit / summability
    if let Some(n) = first_failure(terms, |n| cfg.delta_seq.at(n) >= 1.0) {
        seq("delta_seq", "A7", format!("needs delta_n >= 1; fails at n = {n}"));
    }
    if cfg.delta_seq.limit() != 1.0 {
        seq("delta_seq", "A7", format!("needs delta_n -> 1; limit is {}", cfg.delta_seq.limit()));
    }
    if let Some(n) = first_failure(terms, |n| cfg.chi_seq.at(n) >= 1.0) {
        seq("chi_seq", "A7", format!("needs chi_n >= 1; fails at n = {n}"));
    }
    if !cfg.chi_seq.summable_excess(1.0) {
        seq("chi_seq", "A7", String::from("needs sum of (chi_n - 1) to be finite"));
    }
    if let Some(n) = first_failure(terms, |n| cfg.zeta_seq.at(n) >= 0.0) {
        seq("zeta_seq", "A7", format!("needs zeta_n >= 0; fails at n = {n}"));
    }
    if !cfg.zeta_seq.summable_excess(0.0) {
        seq("zeta_seq", "A7", String::from("needs sum of zeta_n to be finite"));
    }

    out
}

fn first_failure(terms: usize, ok: impl Fn(usize) -> bool) -> Option<usize> {
    (1..=terms).find(|&n| !ok(n))
}

/// True when no violation has [`Severity::Error`].
pub fn is_runnable(violations: &[Violation]) -> bool {
    violations.iter().all(|v| v.severity != Severity::Error)
}

/// Termination thresholds. A zero tolerance disables that test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Threshold on `E_n = ‖w_n − y_n‖`.
    pub residual_tol: f64,
    /// Threshold on `‖x_(n+1) − x_n‖ / ‖x_n‖`.
    pub relative_tol: f64,
    /// Threshold on `‖F y_n‖`.
    pub operator_tol: f64,
    pub max_iter: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { residual_tol: 1e-6, relative_tol: 0.0, operator_tol: 1e-10, max_iter: 10_000 }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("residual_tol", self.residual_tol),
            ("relative_tol", self.relative_tol),
            ("operator_tol", self.operator_tol),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} = {v} must be a finite value >= 0")));
            }
        }
        Ok(())
    }
}
