//! Cost operators `F : Rⁿ → Rⁿ` of the benchmark problems.

mod deblur;
mod linear;
mod nash;
mod network;

pub use deblur::{build_gaussian_kernel, build_motion_kernel, DeblurProblem, Kernel};
pub use linear::LinearVIProblem;
pub use nash::NashProblem;
pub use network::NetworkProblem;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::OperatorError;

/// A (possibly nonlinear) vector field evaluated by the solver.
pub trait Operator: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `F(x)` into `out`. Both slices have length [`Operator::dim`].
    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError>;

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    /// A Lipschitz constant of `F`, when one can be computed.
    fn lipschitz_estimate(&self) -> Result<f64, OperatorError> {
        Err(OperatorError::LipschitzUnsupported)
    }
}

pub fn estimate_lipschitz(op: &dyn Operator) -> Result<f64, OperatorError> {
    op.lipschitz_estimate()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<(), OperatorError> {
    if expected == got {
        Ok(())
    } else {
        Err(OperatorError::DimensionMismatch { expected, got })
    }
}
