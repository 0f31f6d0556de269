//! Solver core for monotone and non-monotone variational inequalities
//!
//! find `x* ∈ C` with `⟨F(x*), y − x*⟩ ≥ 0` for all `y ∈ C`,
//!
//! by a double-inertial subgradient extragradient method with a
//! projection-contraction correction and a self-adaptive step size.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, timing and the
//! experiment harness live in the `visolve` crate.

#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod config;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod problem;
pub mod projections;
pub mod sequence;
pub mod solver;
pub mod stepsize;

pub use config::{validate_config, Severity, SolverConfig, StopRule, ValidationMode, Violation};
pub use error::{ConfigError, OperatorError, ProjectionError, SolverError};
pub use linalg::Matrix;
pub use operators::{estimate_lipschitz, Operator};
pub use problem::ProblemInstance;
pub use projections::{BoxSet, HalfSpace, PolyhedralSet, ProjectionOracle};
pub use sequence::{sequence_at, SeqSpec};
pub use solver::{
    run, AlgorithmVariant, Clock, IterationRecord, NoClock, RunResult, Solver, SolverState, Termination,
};
