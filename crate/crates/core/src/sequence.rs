//! Closed-form parameter sequences indexed from `n = 1`.
//!
//! Text form is `name(params)`; a bare number is accepted as a constant.
//!
//! | text                     | term                 |
//! |--------------------------|----------------------|
//! | `const(c)`               | `c`                  |
//! | `one_plus_inv_n()`       | `1 + 1/n`            |
//! | `one_plus_inv_pow(p)`    | `1 + 1/(n+1)^p`      |
//! | `inv_pow(p)`             | `1/(n+1)^p`          |
//! | `inv_n_pow(p)`           | `1/n^p`              |
//! | `affine(a, b)`           | `a + b/n`            |

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeqSpec {
    Constant(f64),
    OnePlusInvN,
    OnePlusInvPow(f64),
    InvPow(f64),
    InvNPow(f64),
    Affine { a: f64, b: f64 },
}

impl SeqSpec {
    /// The `n`-th term. `n = 0` is clamped to `1`.
    pub fn at(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        match *self {
            SeqSpec::Constant(c) => c,
            SeqSpec::OnePlusInvN => 1.0 + 1.0 / n,
            SeqSpec::OnePlusInvPow(p) => 1.0 + 1.0 / libm::pow(n + 1.0, p),
            SeqSpec::InvPow(p) => 1.0 / libm::pow(n + 1.0, p),
            SeqSpec::InvNPow(p) => 1.0 / libm::pow(n, p),
            SeqSpec::Affine { a, b } => a + b / n,
        }
    }

    /// Limit of the sequence as `n → ∞`.
    pub fn limit(&self) -> f64 {
        match *self {
            SeqSpec::Constant(c) => c,
            SeqSpec::OnePlusInvN => 1.0,
            SeqSpec::OnePlusInvPow(p) | SeqSpec::InvPow(p) | SeqSpec::InvNPow(p) => {
                let base = if matches!(self, SeqSpec::OnePlusInvPow(_)) { 1.0 } else { 0.0 };
                if p > 0.0 {
                    base
                } else if p == 0.0 {
                    base + 1.0
                } else {
                    f64::INFINITY
                }
            }
            SeqSpec::Affine { a, .. } => a,
        }
    }

    /// Whether `Σ_n (term_n − offset)` is finite, decided from the closed form.
    pub fn summable_excess(&self, offset: f64) -> bool {
        match *self {
            SeqSpec::Constant(c) => c == offset,
            SeqSpec::OnePlusInvN => false,
            SeqSpec::OnePlusInvPow(p) => offset == 1.0 && p > 1.0,
            SeqSpec::InvPow(p) | SeqSpec::InvNPow(p) => offset == 0.0 && p > 1.0,
            SeqSpec::Affine { a, b } => a == offset && b == 0.0,
        }
    }

    /// Monotonically non-decreasing in `n`.
    pub fn is_nondecreasing(&self) -> bool {
        match *self {
            SeqSpec::Constant(_) => true,
            SeqSpec::OnePlusInvN => false,
            SeqSpec::OnePlusInvPow(p) | SeqSpec::InvPow(p) | SeqSpec::InvNPow(p) => p <= 0.0,
            SeqSpec::Affine { b, .. } => b <= 0.0,
        }
    }
}

impl From<f64> for SeqSpec {
    fn from(c: f64) -> Self {
        SeqSpec::Constant(c)
    }
}

impl fmt::Display for SeqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{:?}` on f64 prints the shortest round-trip representation
        match self {
            SeqSpec::Constant(c) => write!(f, "const({c:?})"),
            SeqSpec::OnePlusInvN => write!(f, "one_plus_inv_n()"),
            SeqSpec::OnePlusInvPow(p) => write!(f, "one_plus_inv_pow({p:?})"),
            SeqSpec::InvPow(p) => write!(f, "inv_pow({p:?})"),
            SeqSpec::InvNPow(p) => write!(f, "inv_n_pow({p:?})"),
            SeqSpec::Affine { a, b } => write!(f, "affine({a:?}, {b:?})"),
        }
    }
}

impl FromStr for SeqSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(c) = s.parse::<f64>() {
            return Ok(SeqSpec::Constant(c));
        }
        let bad = || ConfigError::BadSequence(s.to_string());
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let name = s[..open].trim();
        let params: Vec<f64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        let arity = |k: usize| if params.len() == k { Ok(()) } else { Err(bad()) };
        match name {
            "const" => arity(1).map(|_| SeqSpec::Constant(params[0])),
            "one_plus_inv_n" => arity(0).map(|_| SeqSpec::OnePlusInvN),
            "one_plus_inv_pow" => arity(1).map(|_| SeqSpec::OnePlusInvPow(params[0])),
            "inv_pow" => arity(1).map(|_| SeqSpec::InvPow(params[0])),
            "inv_n_pow" => arity(1).map(|_| SeqSpec::InvNPow(params[0])),
            "affine" => arity(2).map(|_| SeqSpec::Affine { a: params[0], b: params[1] }),
            other => Err(ConfigError::UnknownSequence(String::from(other))),
        }
    }
}

/// Evaluates a textual sequence spec at `n`.
pub fn sequence_at(spec: &str, n: usize) -> Result<f64, ConfigError> {
    Ok(spec.parse::<SeqSpec>()?.at(n))
}
