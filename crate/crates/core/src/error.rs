use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    UnknownSequence(String),
    BadSequence(String),
    /// Scalar parameter outside its admissible range.
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownSequence(name) => write!(f, "unknown sequence family `{name}`"),
            ConfigError::BadSequence(text) => write!(f, "malformed sequence spec `{text}`"),
            ConfigError::Invalid(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionError {
    DimensionMismatch { expected: usize, got: usize },
    /// Half-space with zero normal and negative offset: the empty set.
    EmptyHalfSpace,
    /// `Tx = r` has no solution; carries the residual of the best least-squares fit.
    InconsistentAffine { residual: f64 },
    /// Lower bound above upper bound at the given coordinate.
    InvertedBounds { index: usize },
    Infeasible { gap: f64 },
    NotConverged {
        best: Vec<f64>,
        equality_residual: f64,
        bound_violation: f64,
        iterations: usize,
    },
}

impl fmt::Display for ProjectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionError::DimensionMismatch { expected, got } => {
                write!(f, "projection: dimension mismatch (expected {expected}, got {got})")
            }
            ProjectionError::EmptyHalfSpace => {
                write!(f, "projection: half-space has zero normal and negative offset")
            }
            ProjectionError::InconsistentAffine { residual } => {
                write!(f, "projection: affine system is inconsistent (residual {residual:e})")
            }
            ProjectionError::InvertedBounds { index } => {
                write!(f, "projection: lower bound exceeds upper bound at index {index}")
            }
            ProjectionError::Infeasible { gap } => {
                write!(f, "projection: polyhedral set appears empty (set gap {gap:e})")
            }
            ProjectionError::NotConverged { equality_residual, bound_violation, iterations, .. } => write!(
                f,
                "projection: no convergence after {iterations} inner iterations \
                 (equality residual {equality_residual:e}, bound violation {bound_violation:e})"
            ),
        }
    }
}

impl core::error::Error for ProjectionError {}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorError {
    DimensionMismatch { expected: usize, got: usize },
    /// Evaluation point outside the operator's domain.
    Domain(String),
    /// No closed-form Lipschitz estimate is available for this operator.
    LipschitzUnsupported,
    Invalid(String),
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorError::DimensionMismatch { expected, got } => {
                write!(f, "operator: dimension mismatch (expected {expected}, got {got})")
            }
            OperatorError::Domain(msg) => write!(f, "operator: domain error: {msg}"),
            OperatorError::LipschitzUnsupported => {
                write!(f, "operator: no Lipschitz estimate available; supply L explicitly")
            }
            OperatorError::Invalid(msg) => write!(f, "operator: invalid problem data: {msg}"),
        }
    }
}

impl core::error::Error for OperatorError {}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    Config(ConfigError),
    Projection(ProjectionError),
    Operator(OperatorError),
    /// A NaN or infinity appeared in the named quantity at iteration `n`.
    NonFinite { quantity: &'static str, n: usize },
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Config(e) => write!(f, "solver: {e}"),
            SolverError::Projection(e) => write!(f, "solver: {e}"),
            SolverError::Operator(e) => write!(f, "solver: {e}"),
            SolverError::NonFinite { quantity, n } => {
                write!(f, "solver: non-finite value in {quantity} at iteration {n}")
            }
            SolverError::DimensionMismatch { expected, got } => {
                write!(f, "solver: dimension mismatch (expected {expected}, got {got})")
            }
        }
    }
}

impl core::error::Error for SolverError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            SolverError::Config(e) => Some(e),
            SolverError::Projection(e) => Some(e),
            SolverError::Operator(e) => Some(e),
            _ => None,
        }
    }
}

impl From<ConfigError> for SolverError {
    fn from(e: ConfigError) -> Self {
        SolverError::Config(e)
    }
}

impl From<ProjectionError> for SolverError {
    fn from(e: ProjectionError) -> Self {
        SolverError::Projection(e)
    }
}

impl From<OperatorError> for SolverError {
    fn from(e: OperatorError) -> Self {
        SolverError::Operator(e)
    }
}
