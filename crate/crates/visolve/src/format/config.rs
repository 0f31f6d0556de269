//! `key = value` files for solver settings and stopping rules.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! rejected. Keys that are absent keep their defaults.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use visolve_core::{SeqSpec, SolverConfig, StopRule, ValidationMode};

use crate::error::{Error, Result};

pub const KEYS: [&str; 17] = [
    "mu",
    "lambda1",
    "sigma",
    "beta",
    "theta_bar",
    "alpha_seq",
    "nu_seq",
    "xi_seq",
    "xi_cap",
    "delta_seq",
    "chi_seq",
    "zeta_seq",
    "residual_tol",
    "relative_tol",
    "operator_tol",
    "max_iter",
    "validation_mode",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub stop: StopRule,
}

/// Splits `text` into `(line number, key, value)` triples.
pub(crate) fn key_values<'a>(path: &Path, text: &'a str) -> Result<Vec<(usize, &'a str, &'a str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, i + 1, format!("expected `key = value`, got `{line}`")))?;
        out.push((i + 1, k.trim(), v.trim()));
    }
    Ok(out)
}

fn value<T: FromStr>(path: &Path, line: usize, key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| Error::parse(path, line, format!("{key}: {e}")))
}

/// Parses a config file body. `path` is only used in messages.
pub fn parse_config(path: &Path, text: &str, base: RunConfig) -> Result<RunConfig> {
    let mut cfg = base;
    let mut seen = Vec::new();
    for (line, key, v) in key_values(path, text)? {
        if seen.contains(&key) {
            return Err(Error::parse(path, line, format!("duplicate key `{key}`")));
        }
        seen.push(key);
        let s = &mut cfg.solver;
        let seq = |v: &str| value::<SeqSpec>(path, line, key, v);
        match key {
            "mu" => s.mu = value(path, line, key, v)?,
            "lambda1" => s.lambda1 = value(path, line, key, v)?,
            "sigma" => s.sigma = value(path, line, key, v)?,
            "beta" => s.beta = value(path, line, key, v)?,
            "theta_bar" => s.theta_bar = value(path, line, key, v)?,
            "alpha_seq" => s.alpha_seq = seq(v)?,
            "nu_seq" => s.nu_seq = seq(v)?,
            "xi_seq" => s.xi_seq = seq(v)?,
            "xi_cap" => s.xi_cap = value(path, line, key, v)?,
            "delta_seq" => s.delta_seq = seq(v)?,
            "chi_seq" => s.chi_seq = seq(v)?,
            "zeta_seq" => s.zeta_seq = seq(v)?,
            "residual_tol" => cfg.stop.residual_tol = value(path, line, key, v)?,
            "relative_tol" => cfg.stop.relative_tol = value(path, line, key, v)?,
            "operator_tol" => cfg.stop.operator_tol = value(path, line, key, v)?,
            "max_iter" => cfg.stop.max_iter = value(path, line, key, v)?,
            "validation_mode" => s.validation_mode = value::<ValidationMode>(path, line, key, v)?,
            other => return Err(Error::parse(path, line, format!("unknown key `{other}`"))),
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path, base: RunConfig) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(path, &text, base)
}

/// Writes every key. Reals use the shortest representation that parses back
/// to the same value.
pub fn render_config(cfg: &RunConfig) -> String {
    let s = &cfg.solver;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("mu", format!("{:?}", s.mu));
    put("lambda1", format!("{:?}", s.lambda1));
    put("sigma", format!("{:?}", s.sigma));
    put("beta", format!("{:?}", s.beta));
    put("theta_bar", format!("{:?}", s.theta_bar));
    put("alpha_seq", s.alpha_seq.to_string());
    put("nu_seq", s.nu_seq.to_string());
    put("xi_seq", s.xi_seq.to_string());
    put("xi_cap", format!("{:?}", s.xi_cap));
    put("delta_seq", s.delta_seq.to_string());
    put("chi_seq", s.chi_seq.to_string());
    put("zeta_seq", s.zeta_seq.to_string());
    put("residual_tol", format!("{:?}", cfg.stop.residual_tol));
    put("relative_tol", format!("{:?}", cfg.stop.relative_tol));
    put("operator_tol", format!("{:?}", cfg.stop.operator_tol));
    put("max_iter", cfg.stop.max_iter.to_string());
    put("validation_mode", s.validation_mode.to_string());
    out
}
