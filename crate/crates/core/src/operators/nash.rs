use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_dim, Operator};
use crate::error::OperatorError;

/// Total supply below this is clamped before evaluating the demand curve.
pub const MIN_TOTAL_SUPPLY: f64 = 1e-9;

/// Nash-Cournot oligopoly with cost functions
/// `g_i(t) = e_i t + r_i/(r_i+1) · O_i^(−1/r_i) · t^((r_i+1)/r_i)`
/// and inverse demand `q(R) = s^(1/γ) R^(−1/γ)`.
///
/// The operator is `F_i(x) = g'_i(x_i) − q(R) − x_i q'(R)` with `R = Σ x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct NashProblem {
    e: Vec<f64>,
    o: Vec<f64>,
    r: Vec<f64>,
    demand_scale: f64,
    demand_exponent: f64,
    known_solution: Option<Vec<f64>>,
}

impl NashProblem {
    pub fn new(
        e: Vec<f64>,
        o: Vec<f64>,
        r: Vec<f64>,
        demand_scale: f64,
        demand_exponent: f64,
    ) -> Result<Self, OperatorError> {
        check_dim(e.len(), o.len())?;
        check_dim(e.len(), r.len())?;
        if e.is_empty() {
            return Err(OperatorError::Invalid(String::from("need at least one firm")));
        }
        if let Some(i) = o.iter().position(|v| !(*v > 0.0)) {
            return Err(OperatorError::Invalid(format!("O[{i}] must be positive")));
        }
        if let Some(i) = r.iter().position(|v| !(*v > 0.0)) {
            return Err(OperatorError::Invalid(format!("r[{i}] must be positive")));
        }
        if !(demand_scale > 0.0) || !(demand_exponent > 0.0) {
            return Err(OperatorError::Invalid(format!(
                "demand scale and exponent must be positive (got {demand_scale}, {demand_exponent})"
            )));
        }
        Ok(Self { e, o, r, demand_scale, demand_exponent, known_solution: None })
    }

    pub fn with_solution(mut self, solution: Vec<f64>) -> Self {
        self.known_solution = Some(solution);
        self
    }

    /// Five firms, demand `5000^(1/1.1) R^(−1/1.1)`.
    pub fn five_firm_example() -> Self {
        Self::new(
            vec![10.0, 8.0, 6.0, 4.0, 2.0],
            vec![5.0; 5],
            vec![1.2, 1.1, 1.0, 0.9, 0.8],
            5000.0,
            1.1,
        )
        .expect("built-in Nash data is valid")
        .with_solution(vec![36.912, 41.842, 43.705, 42.665, 39.182])
    }

    pub fn firms(&self) -> usize {
        self.e.len()
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }

    pub fn o(&self) -> &[f64] {
        &self.o
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn demand_scale(&self) -> f64 {
        self.demand_scale
    }

    pub fn demand_exponent(&self) -> f64 {
        self.demand_exponent
    }

    pub fn known_solution(&self) -> Option<&[f64]> {
        self.known_solution.as_deref()
    }

    /// Inverse demand `q(R)`.
    pub fn price(&self, total: f64) -> f64 {
        let inv = 1.0 / self.demand_exponent;
        libm::pow(self.demand_scale, inv) * libm::pow(total, -inv)
    }

    /// `q'(R)`
    pub fn price_slope(&self, total: f64) -> f64 {
        let inv = 1.0 / self.demand_exponent;
        -inv * libm::pow(self.demand_scale, inv) * libm::pow(total, -inv - 1.0)
    }

    /// Marginal cost `g'_i(t) = e_i + O_i^(−1/r_i) t^(1/r_i)`.
    ///
    /// Negative `t` (reachable only at extrapolated points outside the
    /// orthant) uses the odd extension `−|t|^(1/r_i)`.
    pub fn marginal_cost(&self, i: usize, t: f64) -> f64 {
        let inv = 1.0 / self.r[i];
        let mag = libm::pow(t.abs(), inv);
        self.e[i] + libm::pow(self.o[i], -inv) * if t < 0.0 { -mag } else { mag }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        self.apply(x)
    }
}

impl Operator for NashProblem {
    fn dim(&self) -> usize {
        self.e.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        check_dim(self.dim(), x.len())?;
        let total: f64 = x.iter().sum();
        if total < 0.0 || !total.is_finite() {
            return Err(OperatorError::Domain(format!("total supply {total} is not positive")));
        }
        let total = total.max(MIN_TOTAL_SUPPLY);
        let q = self.price(total);
        let dq = self.price_slope(total);
        for (i, (o, xi)) in out.iter_mut().zip(x).enumerate() {
            *o = self.marginal_cost(i, *xi) - q - xi * dq;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_equilibrium_nearly_zeroes_the_operator() {
        let p = NashProblem::five_firm_example();
        let f = p.eval(p.known_solution().unwrap()).unwrap();
        for v in &f {
            assert!(v.abs() <= 1e-2, "{f:?}");
        }
    }

    #[test]
    fn single_firm_by_hand() {
        let p = NashProblem::new(vec![0.0], vec![1.0], vec![1.0], 5000.0, 1.1).unwrap();
        let s = libm::pow(5000.0, 1.0 / 1.1);
        let expected = 1.0 - s + s / 1.1;
        let got = p.eval(&[1.0]).unwrap()[0];
        assert!((got - expected).abs() < 1e-9 * expected.abs(), "{got} vs {expected}");
    }

    #[test]
    fn larger_demand_lowers_every_component() {
        let base = NashProblem::five_firm_example();
        let doubled = NashProblem::new(
            base.e().to_vec(),
            base.o().to_vec(),
            base.r().to_vec(),
            2.0 * base.demand_scale(),
            base.demand_exponent(),
        )
        .unwrap();
        let x = [10.0, 20.0, 30.0, 40.0, 50.0];
        let f0 = base.eval(&x).unwrap();
        let f1 = doubled.eval(&x).unwrap();
        assert!(f0.iter().zip(&f1).all(|(a, b)| b < a), "{f0:?} {f1:?}");
    }

    #[test]
    fn origin_is_clamped_not_an_error() {
        let p = NashProblem::five_firm_example();
        let f = p.eval(&[0.0; 5]).unwrap();
        assert!(f.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn negative_total_supply_is_a_domain_error() {
        let p = NashProblem::five_firm_example();
        assert!(matches!(p.eval(&[-1.0, 0.0, 0.0, 0.0, 0.0]), Err(OperatorError::Domain(_))));
    }

    #[test]
    fn no_lipschitz_estimate() {
        assert_eq!(
            NashProblem::five_firm_example().lipschitz_estimate(),
            Err(OperatorError::LipschitzUnsupported)
        );
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(NashProblem::new(vec![1.0], vec![0.0], vec![1.0], 5000.0, 1.1).is_err());
        assert!(NashProblem::new(vec![1.0], vec![1.0], vec![-1.0], 5000.0, 1.1).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let p = NashProblem::five_firm_example();
        assert!(matches!(p.eval(&[1.0]), Err(OperatorError::DimensionMismatch { .. })));
    }
}
