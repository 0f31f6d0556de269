use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_dim, Operator};
use crate::error::{OperatorError, ProjectionError};
use crate::linalg::Matrix;
use crate::projections::PolyhedralSet;

/// Capacitated network equilibrium with separable linear arc costs
/// `F(x) = diag(D) x` over `{Tx = r, 0 ≤ x ≤ d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkProblem {
    cost: Vec<f64>,
    incidence: Matrix,
    balances: Vec<f64>,
    capacities: Vec<f64>,
    known_solution: Option<Vec<f64>>,
}

impl NetworkProblem {
    pub fn new(
        cost: Vec<f64>,
        incidence: Matrix,
        balances: Vec<f64>,
        capacities: Vec<f64>,
    ) -> Result<Self, OperatorError> {
        let n = cost.len();
        check_dim(n, incidence.cols())?;
        check_dim(n, capacities.len())?;
        check_dim(incidence.rows(), balances.len())?;
        if let Some(i) = cost.iter().position(|d| !(*d >= 0.0)) {
            return Err(OperatorError::Invalid(format!("arc cost D[{i}] must be nonnegative")));
        }
        for j in 0..n {
            let (mut plus, mut minus) = (0, 0);
            for i in 0..incidence.rows() {
                match incidence[(i, j)] {
                    1.0 => plus += 1,
                    -1.0 => minus += 1,
                    0.0 => {}
                    v => {
                        return Err(OperatorError::Invalid(format!(
                            "incidence entry ({i}, {j}) = {v} is not in {{-1, 0, 1}}"
                        )))
                    }
                }
            }
            if plus != 1 || minus != 1 {
                return Err(OperatorError::Invalid(format!(
                    "arc {j} needs exactly one source (-1) and one sink (+1)"
                )));
            }
        }
        Ok(Self { cost, incidence, balances, capacities, known_solution: None })
    }

    pub fn with_solution(mut self, solution: Vec<f64>) -> Self {
        self.known_solution = Some(solution);
        self
    }

    /// Six nodes, eight arcs, two units of flow from node 1 to node 6.
    pub fn six_node_example() -> Self {
        #[rustfmt::skip]
        let t = Matrix::from_row_major(6, 8, vec![
            -1.0, -1.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,
             1.0,  0.0, -1.0, -1.0,  0.0,  0.0,  0.0,  0.0,
             0.0,  1.0,  0.0,  0.0, -1.0, -1.0,  0.0,  0.0,
             0.0,  0.0,  1.0,  0.0,  1.0,  0.0, -1.0,  0.0,
             0.0,  0.0,  0.0,  1.0,  0.0,  1.0,  0.0, -1.0,
             0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  1.0,  1.0,
        ]);
        Self::new(
            vec![5.5, 1.0, 2.0, 3.0, 4.0, 50.0, 3.5, 1.5],
            t,
            vec![-2.0, 0.0, 0.0, 0.0, 0.0, 2.0],
            vec![2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0],
        )
        .expect("built-in network data is valid")
        .with_solution(vec![1.000, 1.000, 0.1575, 0.8425, 0.885, 0.115, 1.0425, 0.9575])
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn incidence(&self) -> &Matrix {
        &self.incidence
    }

    pub fn balances(&self) -> &[f64] {
        &self.balances
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn known_solution(&self) -> Option<&[f64]> {
        self.known_solution.as_deref()
    }

    pub fn feasible_set(&self) -> Result<PolyhedralSet, ProjectionError> {
        PolyhedralSet::new(
            self.incidence.clone(),
            self.balances.clone(),
            vec![0.0; self.cost.len()],
            self.capacities.clone(),
        )
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        self.apply(x)
    }
}

impl Operator for NetworkProblem {
    fn dim(&self) -> usize {
        self.cost.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        check_dim(self.dim(), x.len())?;
        for ((o, d), xi) in out.iter_mut().zip(&self.cost).zip(x) {
            *o = d * xi;
        }
        Ok(())
    }

    /// The operator norm of a diagonal map: its largest entry.
    fn lipschitz_estimate(&self) -> Result<f64, OperatorError> {
        Ok(self.cost.iter().fold(0.0, |m, d| f64::max(m, *d)))
    }
}
