//! Metric projections onto the feasible sets used by the solver.
//!
//! The polyhedral projection `{x : Tx = r, lower ≤ x ≤ upper}` runs Dykstra's
//! alternating projections between the affine subspace and the box. Every few
//! sweeps the active bounds of the current box iterate are frozen and the
//! remaining equality-constrained problem is solved exactly; if that candidate
//! passes the KKT test it is returned, otherwise Dykstra keeps going.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use crate::error::ProjectionError;
use crate::linalg::{self, Matrix, PivotedCholesky};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_INNER: usize = 20_000;

const RANK_TOL: f64 = 1e-12;
const POLISH_EVERY: usize = 16;
const INFEASIBLE_CHECK_FROM: usize = 200;
const INFEASIBLE_CHECK_EVERY: usize = 50;

fn check_dim(expected: usize, x: &[f64]) -> Result<(), ProjectionError> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(ProjectionError::DimensionMismatch { expected, got: x.len() })
    }
}

/// `{x : ⟨a, x⟩ ≤ b}`
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    a: Vec<f64>,
    b: f64,
    a_norm_sq: f64,
}

impl HalfSpace {
    /// A zero normal with `b ≥ 0` is the whole space; with `b < 0` the set is empty.
    pub fn new(a: Vec<f64>, b: f64) -> Result<Self, ProjectionError> {
        let a_norm_sq = linalg::dot(&a, &a);
        if a_norm_sq == 0.0 && b < 0.0 {
            return Err(ProjectionError::EmptyHalfSpace);
        }
        Ok(Self { a, b, a_norm_sq })
    }

    pub fn normal(&self) -> &[f64] {
        &self.a
    }

    pub fn offset(&self) -> f64 {
        self.b
    }

    pub fn is_degenerate(&self) -> bool {
        self.a_norm_sq == 0.0
    }

    /// `⟨a, x⟩ − b`; non-positive inside the set.
    pub fn violation(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.a, x) - self.b
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
        check_dim(self.a.len(), x)?;
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn project_in_place(&self, x: &mut [f64]) {
        if self.is_degenerate() {
            return;
        }
        let excess = self.violation(x);
        if excess > 0.0 {
            linalg::axpy(-excess / self.a_norm_sq, &self.a, x);
        }
    }
}

/// Componentwise bounds; entries may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ProjectionError> {
        check_dim(lower.len(), &upper)?;
        if let Some(index) = lower.iter().zip(&upper).position(|(l, u)| !(l <= u)) {
            return Err(ProjectionError::InvertedBounds { index });
        }
        Ok(Self { lower, upper })
    }

    /// The nonnegative orthant of dimension `n`.
    pub fn nonnegative(n: usize) -> Self {
        Self { lower: vec![0.0; n], upper: vec![f64::INFINITY; n] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
        check_dim(self.dim(), x)?;
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    fn project_in_place(&self, x: &mut [f64]) {
        for ((xi, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.max(*l).min(*u);
        }
    }

    /// Largest amount by which `x` leaves the box.
    pub fn violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .fold(0.0, |m, ((xi, l), u)| f64::max(m, f64::max(l - xi, xi - u)))
    }
}

/// `{x : Tx = r}` with `T Tᵀ` factored once.
#[derive(Debug, Clone)]
pub struct AffineSet {
    t: Matrix,
    r: Vec<f64>,
    gram: PivotedCholesky,
    tol: f64,
}

impl AffineSet {
    pub fn new(t: Matrix, r: Vec<f64>) -> Result<Self, ProjectionError> {
        Self::with_tolerance(t, r, DEFAULT_TOL)
    }

    pub fn with_tolerance(t: Matrix, r: Vec<f64>, tol: f64) -> Result<Self, ProjectionError> {
        check_dim(t.rows(), &r)?;
        let gram = PivotedCholesky::factor(&t.gram_rows(), RANK_TOL);
        let set = Self { t, r, gram, tol };
        // least-norm point Tᵀ (T Tᵀ)⁺ r must satisfy the system
        let z = set.gram.solve(&set.r);
        let p = set.t.mul_t_vec(&z);
        let residual = set.residual(&p);
        if residual > set.consistency_tol() {
            return Err(ProjectionError::InconsistentAffine { residual });
        }
        Ok(set)
    }

    fn consistency_tol(&self) -> f64 {
        // scale-aware: rounding in the factorization grows with ‖r‖
        self.tol.max(1e-9) * (1.0 + linalg::norm(&self.r))
    }

    pub fn dim(&self) -> usize {
        self.t.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    pub fn rhs(&self) -> &[f64] {
        &self.r
    }

    /// `‖Tx − r‖`
    pub fn residual(&self, x: &[f64]) -> f64 {
        let tx = self.t.mul_vec(x);
        linalg::dist(&tx, &self.r)
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
        check_dim(self.dim(), x)?;
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    fn project_in_place(&self, x: &mut [f64]) {
        let mut rhs = self.t.mul_vec(x);
        for (v, r) in rhs.iter_mut().zip(&self.r) {
            *v -= r;
        }
        let z = self.gram.solve(&rhs);
        let corr = self.t.mul_t_vec(&z);
        for (xi, c) in x.iter_mut().zip(&corr) {
            *xi -= c;
        }
    }
}

/// `{x : Tx = r, lower ≤ x ≤ upper}`
#[derive(Debug)]
pub struct PolyhedralSet {
    affine: AffineSet,
    bounds: BoxSet,
    tol: f64,
    max_inner: usize,
    certified: AtomicBool,
}

impl Clone for PolyhedralSet {
    fn clone(&self) -> Self {
        Self {
            affine: self.affine.clone(),
            bounds: self.bounds.clone(),
            tol: self.tol,
            max_inner: self.max_inner,
            certified: AtomicBool::new(self.certified.load(Ordering::Relaxed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralProjection {
    pub point: Vec<f64>,
    pub inner_iterations: usize,
    /// Whether the exact active-set solve produced the result.
    pub polished: bool,
}

impl PolyhedralSet {
    pub fn new(t: Matrix, r: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ProjectionError> {
        let bounds = BoxSet::new(lower, upper)?;
        check_dim(t.cols(), bounds.lower())?;
        let affine = AffineSet::new(t, r)?;
        Ok(Self {
            affine,
            bounds,
            tol: DEFAULT_TOL,
            max_inner: DEFAULT_MAX_INNER,
            certified: AtomicBool::new(false),
        })
    }

    pub fn with_limits(mut self, tol: f64, max_inner: usize) -> Self {
        self.tol = tol;
        self.max_inner = max_inner;
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn affine(&self) -> &AffineSet {
        &self.affine
    }

    pub fn bounds(&self) -> &BoxSet {
        &self.bounds
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn max_inner(&self) -> usize {
        self.max_inner
    }

    /// Set once a projection has succeeded, which proves the set nonempty.
    pub fn is_certified(&self) -> bool {
        self.certified.load(Ordering::Relaxed)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim() && self.affine.residual(x) <= tol && self.bounds.violation(x) <= tol
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
        self.project_with(x, self.tol, self.max_inner).map(|p| p.point)
    }

    pub fn project_with(
        &self,
        x: &[f64],
        tol: f64,
        max_inner: usize,
    ) -> Result<PolyhedralProjection, ProjectionError> {
        check_dim(self.dim(), x)?;
        if self.contains(x, tol) {
            self.certified.store(true, Ordering::Relaxed);
            return Ok(PolyhedralProjection { point: x.to_vec(), inner_iterations: 0, polished: false });
        }

        let n = self.dim();
        let mut cur = x.to_vec();
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut prev = vec![0.0; n];

        for k in 1..=max_inner {
            prev.copy_from_slice(&cur);
            // affine step with correction p
            for i in 0..n {
                y[i] = cur[i] + p[i];
            }
            self.affine.project_in_place(&mut y);
            for i in 0..n {
                p[i] = cur[i] + p[i] - y[i];
            }
            // box step with correction q
            for i in 0..n {
                cur[i] = y[i] + q[i];
            }
            self.bounds.project_in_place(&mut cur);
            for i in 0..n {
                q[i] = y[i] + q[i] - cur[i];
            }

            let eq_res = self.affine.residual(&cur);
            let change = linalg::dist(&cur, &prev);
            if eq_res <= tol && change <= tol {
                if let Some(exact) = self.polish(x, &cur, tol) {
                    self.certified.store(true, Ordering::Relaxed);
                    return Ok(PolyhedralProjection { point: exact, inner_iterations: k, polished: true });
                }
                self.certified.store(true, Ordering::Relaxed);
                return Ok(PolyhedralProjection { point: cur, inner_iterations: k, polished: false });
            }
            if k % POLISH_EVERY == 0 {
                if let Some(exact) = self.polish(x, &cur, tol) {
                    self.certified.store(true, Ordering::Relaxed);
                    return Ok(PolyhedralProjection { point: exact, inner_iterations: k, polished: true });
                }
            }

            if !self.is_certified() && k >= INFEASIBLE_CHECK_FROM && k % INFEASIBLE_CHECK_EVERY == 0 {
                if let Some(gap) = self.separation(&y, &cur) {
                    return Err(ProjectionError::Infeasible { gap });
                }
            }
        }

        Err(ProjectionError::NotConverged {
            equality_residual: self.affine.residual(&cur),
            bound_violation: self.bounds.violation(&cur),
            best: cur,
            iterations: max_inner,
        })
    }

    /// Tries to prove the set empty from the Dykstra pair `y` (affine) and
    /// `cur` (box). The component of `y − cur` in the row space of `T` is
    /// constant on the affine set; if its supremum over the box stays strictly
    /// below that constant the two sets are disjoint. Returns the margin.
    fn separation(&self, y: &[f64], cur: &[f64]) -> Option<f64> {
        let d = linalg::sub(y, cur);
        let z = self.affine.gram.solve(&self.affine.t.mul_vec(&d));
        let g = self.affine.t.mul_t_vec(&z);
        let on_affine = linalg::dot(&g, y);
        let mut sup = 0.0;
        for ((gi, lo), up) in g.iter().zip(self.bounds.lower()).zip(self.bounds.upper()) {
            let end = if *gi > 0.0 { *up } else { *lo };
            if *gi != 0.0 {
                if !end.is_finite() {
                    return None;
                }
                sup += gi * end;
            }
        }
        let scale = linalg::norm(&g) * (1.0 + linalg::norm_inf(y));
        let margin = on_affine - sup;
        if scale > 0.0 && margin > 1e-9 * scale {
            Some(margin / linalg::norm(&g))
        } else {
            None
        }
    }

    /// Freezes the bounds that `guess` sits on and solves the remaining
    /// equality-constrained projection exactly. Returns it if it is KKT.
    fn polish(&self, x: &[f64], guess: &[f64], tol: f64) -> Option<Vec<f64>> {
        let n = self.dim();
        let (lo, up) = (self.bounds.lower(), self.bounds.upper());
        let t = self.affine.matrix();
        let r = self.affine.rhs();
        // +1 upper active, -1 lower active, 0 free
        let state: Vec<i8> = (0..n)
            .map(|i| {
                if guess[i] <= lo[i] {
                    -1
                } else if guess[i] >= up[i] {
                    1
                } else {
                    0
                }
            })
            .collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();

        let mut y = vec![0.0; n];
        let mut r_red = r.to_vec();
        for i in 0..n {
            if state[i] != 0 {
                let b = if state[i] < 0 { lo[i] } else { up[i] };
                y[i] = b;
                for (row, rr) in r_red.iter_mut().enumerate() {
                    *rr -= t[(row, i)] * b;
                }
            }
        }
        let mut z = vec![0.0; t.rows()];
        if !free.is_empty() {
            let t_free = Matrix::from_row_major(
                t.rows(),
                free.len(),
                (0..t.rows()).flat_map(|row| free.iter().map(move |&j| t[(row, j)])).collect(),
            );
            let x_free: Vec<f64> = free.iter().map(|&j| x[j]).collect();
            let mut rhs = t_free.mul_vec(&x_free);
            for (v, rr) in rhs.iter_mut().zip(&r_red) {
                *v -= rr;
            }
            let gram = PivotedCholesky::factor(&t_free.gram_rows(), RANK_TOL);
            z = gram.solve(&rhs);
            let corr = t_free.mul_t_vec(&z);
            for (k, &j) in free.iter().enumerate() {
                y[j] = x_free[k] - corr[k];
            }
        }
        // primal feasibility
        let scale = 1.0 + linalg::norm_inf(x);
        if self.affine.residual(&y) > tol * scale || self.bounds.violation(&y) > tol * scale {
            return None;
        }
        // dual feasibility: x − y − Tᵀz must point out of the box at active bounds
        let tz = t.mul_t_vec(&z);
        for i in 0..n {
            let s = x[i] - y[i] - tz[i];
            let ok = match state[i] {
                -1 => s <= tol * scale,
                1 => s >= -tol * scale,
                _ => true,
            };
            if !ok {
                return None;
            }
        }
        Some(y)
    }
}

/// The feasible set handed to the solver.
#[derive(Debug, Clone)]
pub enum ProjectionOracle {
    WholeSpace,
    Box(BoxSet),
    HalfSpace(HalfSpace),
    Affine(AffineSet),
    Polyhedral(PolyhedralSet),
}

impl ProjectionOracle {
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
        match self {
            ProjectionOracle::WholeSpace => Ok(x.to_vec()),
            ProjectionOracle::Box(b) => b.project(x),
            ProjectionOracle::HalfSpace(h) => h.project(x),
            ProjectionOracle::Affine(a) => a.project(x),
            ProjectionOracle::Polyhedral(p) => p.project(x),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            ProjectionOracle::WholeSpace => None,
            ProjectionOracle::Box(b) => Some(b.dim()),
            ProjectionOracle::HalfSpace(h) => Some(h.normal().len()),
            ProjectionOracle::Affine(a) => Some(a.dim()),
            ProjectionOracle::Polyhedral(p) => Some(p.dim()),
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            ProjectionOracle::Polyhedral(p) => p.tolerance(),
            ProjectionOracle::Affine(a) => a.tol,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            ProjectionOracle::WholeSpace => true,
            ProjectionOracle::Box(b) => b.violation(x) <= tol,
            ProjectionOracle::HalfSpace(h) => h.violation(x) <= tol,
            ProjectionOracle::Affine(a) => a.residual(x) <= tol,
            ProjectionOracle::Polyhedral(p) => p.contains(x, tol),
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, ProjectionOracle::WholeSpace)
    }
}

pub fn project_halfspace(h: &HalfSpace, x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
    h.project(x)
}

pub fn project_box(lower: &[f64], upper: &[f64], x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
    BoxSet::new(lower.to_vec(), upper.to_vec())?.project(x)
}

pub fn project_affine(t: &Matrix, r: &[f64], x: &[f64]) -> Result<Vec<f64>, ProjectionError> {
    AffineSet::new(t.clone(), r.to_vec())?.project(x)
}

pub fn project_polyhedron(
    set: &PolyhedralSet,
    x: &[f64],
    tol: f64,
    max_inner: usize,
) -> Result<Vec<f64>, ProjectionError> {
    set.project_with(x, tol, max_inner).map(|p| p.point)
}
