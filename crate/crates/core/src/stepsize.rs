//! Self-adaptive, non-monotone step size.
//!
//! ```text
//! λ_{n+1} = min{ μ δ_n ‖w − y‖ / ‖Fw − Fy‖,  χ_n λ_n + ζ_n }   if Fw ≠ Fy
//!         = χ_n λ_n + ζ_n                                     otherwise
//! ```

use alloc::collections::VecDeque;

use crate::linalg;

/// Relative threshold below which `‖Fw − Fy‖` counts as zero.
pub const DENOM_REL_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub mu: f64,
    pub delta: f64,
    pub chi: f64,
    pub zeta: f64,
}

/// Computes `λ_{n+1}` from the current `lambda` and the iteration's points.
pub fn next_lambda(lambda: f64, w: &[f64], y: &[f64], fw: &[f64], fy: &[f64], p: StepParams) -> f64 {
    let growth = p.chi * lambda + p.zeta;
    let denom = linalg::dist(fw, fy);
    if denom > DENOM_REL_EPS * (1.0 + linalg::norm(fw)) {
        let adaptive = p.mu * p.delta * linalg::dist(w, y) / denom;
        adaptive.min(growth)
    } else {
        growth
    }
}

/// Step-size bookkeeping with an optional window of recent values.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSizeState {
    lambda: f64,
    n: usize,
    history: Option<(usize, VecDeque<f64>)>,
}

impl StepSizeState {
    pub fn new(lambda1: f64) -> Self {
        Self { lambda: lambda1, n: 1, history: None }
    }

    /// Keeps the last `capacity` values of λ for diagnostics.
    pub fn with_history(mut self, capacity: usize) -> Self {
        let mut buf = VecDeque::with_capacity(capacity);
        if capacity > 0 {
            buf.push_back(self.lambda);
        }
        self.history = Some((capacity, buf));
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn history(&self) -> Option<&VecDeque<f64>> {
        self.history.as_ref().map(|(_, h)| h)
    }

    /// Applies the rule and advances to `n + 1`. Returns the new λ.
    pub fn advance(&mut self, w: &[f64], y: &[f64], fw: &[f64], fy: &[f64], p: StepParams) -> f64 {
        self.lambda = next_lambda(self.lambda, w, y, fw, fy, p);
        self.n += 1;
        if let Some((cap, h)) = &mut self.history {
            if *cap > 0 {
                if h.len() == *cap {
                    h.pop_front();
                }
                h.push_back(self.lambda);
            }
        }
        self.lambda
    }
}
