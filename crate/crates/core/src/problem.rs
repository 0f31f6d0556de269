use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{OperatorError, ProjectionError};
use crate::operators::{DeblurProblem, LinearVIProblem, NashProblem, NetworkProblem, Operator};
use crate::projections::{BoxSet, ProjectionOracle};

/// Operator + feasible set + whatever is known about the solution.
#[derive(Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub operator: Arc<dyn Operator>,
    pub feasible: ProjectionOracle,
    pub solution: Option<Vec<f64>>,
    pub lipschitz: Option<f64>,
    /// Strong monotonicity modulus, when known.
    pub strong_monotonicity: Option<f64>,
}

impl core::fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("dim", &self.operator.dim())
            .field("feasible", &self.feasible)
            .field("solution", &self.solution)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ProblemInstance {
    pub fn new(name: impl Into<String>, operator: Arc<dyn Operator>, feasible: ProjectionOracle) -> Self {
        Self {
            name: name.into(),
            operator,
            feasible,
            solution: None,
            lipschitz: None,
            strong_monotonicity: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn network(p: NetworkProblem) -> Result<Self, ProjectionError> {
        let feasible = ProjectionOracle::Polyhedral(p.feasible_set()?);
        let solution = p.known_solution().map(<[f64]>::to_vec);
        let lipschitz = p.lipschitz_estimate().ok();
        Ok(Self { solution, lipschitz, ..Self::new("network", Arc::new(p), feasible) })
    }

    pub fn nash(p: NashProblem) -> Self {
        let feasible = ProjectionOracle::Box(BoxSet::nonnegative(p.firms()));
        let solution = p.known_solution().map(<[f64]>::to_vec);
        Self { solution, ..Self::new("nash", Arc::new(p), feasible) }
    }

    pub fn deblur(p: DeblurProblem) -> Self {
        let lipschitz = p.lipschitz_estimate().ok();
        Self { lipschitz, ..Self::new("deblur", Arc::new(p), ProjectionOracle::WholeSpace) }
    }

    pub fn linear(p: LinearVIProblem) -> Self {
        let solution = Some(p.unconstrained_solution());
        let (k, l) = (p.strong_monotonicity(), p.lipschitz());
        Self {
            solution,
            lipschitz: Some(l),
            strong_monotonicity: Some(k),
            ..Self::new("linear", Arc::new(p), ProjectionOracle::WholeSpace)
        }
    }

    /// The recorded Lipschitz constant, or the operator's own estimate.
    pub fn lipschitz_constant(&self) -> Result<f64, OperatorError> {
        match self.lipschitz {
            Some(l) => Ok(l),
            None => self.operator.lipschitz_estimate(),
        }
    }
}
