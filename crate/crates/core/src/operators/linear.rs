use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{check_dim, Operator};
use crate::error::OperatorError;
use crate::linalg::{self, Matrix, PivotedCholesky};

/// `F(x) = Mx + q` with `M` symmetric positive definite, so `F` is
/// `k`-strongly monotone and `L`-Lipschitz with `k`, `L` the extreme eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearVIProblem {
    m: Matrix,
    q: Vec<f64>,
    k: f64,
    l: f64,
}

impl LinearVIProblem {
    pub fn new(m: Matrix, q: Vec<f64>) -> Result<Self, OperatorError> {
        if m.rows() != m.cols() {
            return Err(OperatorError::Invalid(format!("M is {}x{}, not square", m.rows(), m.cols())));
        }
        check_dim(m.rows(), q.len())?;
        let scale = m.as_slice().iter().fold(0.0, |a, v| f64::max(a, v.abs()));
        if !m.is_symmetric(1e-12 * scale.max(1.0)) {
            return Err(OperatorError::Invalid(String::from("M must be symmetric")));
        }
        let eig = linalg::symmetric_eigenvalues(&m);
        let (k, l) = (eig[0], eig[eig.len() - 1]);
        if !(k > 0.0) {
            return Err(OperatorError::Invalid(format!("M is not positive definite (smallest eigenvalue {k})")));
        }
        Ok(Self { m, q, k, l })
    }

    /// Builds `M = Q diag(eigenvalues) Qᵀ` from an orthonormal basis given as
    /// the columns `basis[j]`.
    pub fn from_spectrum(basis: &[Vec<f64>], eigenvalues: &[f64], q: Vec<f64>) -> Result<Self, OperatorError> {
        let n = eigenvalues.len();
        check_dim(n, basis.len())?;
        let mut m = Matrix::zeros(n, n);
        for (col, &lam) in basis.iter().zip(eigenvalues) {
            check_dim(n, col.len())?;
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += lam * col[i] * col[j];
                }
            }
        }
        // symmetrize rounding
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self::new(m, q)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn offset(&self) -> &[f64] {
        &self.q
    }

    /// Strong monotonicity modulus (smallest eigenvalue).
    pub fn strong_monotonicity(&self) -> f64 {
        self.k
    }

    /// Lipschitz constant (largest eigenvalue).
    pub fn lipschitz(&self) -> f64 {
        self.l
    }

    /// The unique zero of `F`, i.e. the solution over the whole space.
    pub fn unconstrained_solution(&self) -> Vec<f64> {
        let f = PivotedCholesky::factor(&self.m, 0.0);
        let mut x = f.solve(&self.q);
        x.iter_mut().for_each(|v| *v = -*v);
        x
    }
}

impl Operator for LinearVIProblem {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        check_dim(self.dim(), x.len())?;
        self.m.mul_vec_into(x, out);
        for (o, q) in out.iter_mut().zip(&self.q) {
            *o += q;
        }
        Ok(())
    }

    fn lipschitz_estimate(&self) -> Result<f64, OperatorError> {
        Ok(self.l)
    }
}
