//! Least-squares deblurring with circular (periodic) convolution.
//!
//! Images are row-major grayscale vectors. The blur `A` is a circular
//! convolution, so `Aᵀ` is the correlation with the same kernel and
//! `∇f(x) = Aᵀ(Ax − b)` is exactly symmetric positive semidefinite.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_dim, Operator};
use crate::error::OperatorError;
use crate::linalg;

/// A blur kernel with odd dimensions, centered at `(rows/2, cols/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, OperatorError> {
        if rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            return Err(OperatorError::Invalid(format!("kernel dimensions {rows}x{cols} must be odd")));
        }
        check_dim(rows * cols, data.len())?;
        if data.iter().any(|v| !(*v >= 0.0)) {
            return Err(OperatorError::Invalid(String::from("kernel entries must be nonnegative")));
        }
        let sum: f64 = data.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(OperatorError::Invalid(format!("kernel sums to {sum}, expected 1")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity() -> Self {
        Self { rows: 1, cols: 1, data: vec![1.0] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn normalized(rows: usize, cols: usize, mut data: Vec<f64>) -> Self {
        let sum: f64 = data.iter().sum();
        data.iter_mut().for_each(|v| *v /= sum);
        Self { rows, cols, data }
    }
}

/// `size × size` Gaussian with standard deviation `sigma`, normalized to sum 1.
pub fn build_gaussian_kernel(size: usize, sigma: f64) -> Result<Kernel, OperatorError> {
    if size.is_multiple_of(2) {
        return Err(OperatorError::Invalid(format!("Gaussian kernel size {size} must be odd")));
    }
    if !(sigma > 0.0) {
        return Err(OperatorError::Invalid(format!("Gaussian sigma {sigma} must be positive")));
    }
    let h = (size / 2) as isize;
    let data = (-h..=h)
        .flat_map(|i| (-h..=h).map(move |j| (i, j)))
        .map(|(i, j)| libm::exp(-((i * i + j * j) as f64) / (2.0 * sigma * sigma)))
        .collect();
    Ok(Kernel::normalized(size, size, data))
}

/// Samples per pixel along the motion segment.
const MOTION_SUPERSAMPLING: usize = 8;

/// Linear motion blur of `length` pixels at `angle_degrees` (counter-clockwise
/// from the positive column axis).
///
/// The segment is sampled at eight points per pixel of length; each sample
/// adds its weight to the pixel it falls in. Samples are taken in mirrored
/// pairs so the kernel is exactly symmetric under a half turn.
pub fn build_motion_kernel(length: usize, angle_degrees: f64) -> Result<Kernel, OperatorError> {
    if length == 0 {
        return Err(OperatorError::Invalid(String::from("motion length must be at least 1")));
    }
    if length == 1 {
        return Ok(Kernel::identity());
    }
    let theta = angle_degrees.to_radians();
    let (dc, dr) = (libm::cos(theta), -libm::sin(theta));
    let samples = MOTION_SUPERSAMPLING * length;
    let step = length as f64 / samples as f64;
    // sample k sits at offset t_k = −L/2 + (k + ½)·step; pair k with samples−1−k
    let hits: Vec<(isize, isize)> = (0..samples / 2)
        .map(|k| {
            let t = -(length as f64) / 2.0 + (k as f64 + 0.5) * step;
            (libm::round(t * dr) as isize, libm::round(t * dc) as isize)
        })
        .collect();
    let hr = hits.iter().map(|(r, _)| r.unsigned_abs()).max().unwrap_or(0);
    let hc = hits.iter().map(|(_, c)| c.unsigned_abs()).max().unwrap_or(0);
    let (rows, cols) = (2 * hr + 1, 2 * hc + 1);
    let mut data = vec![0.0; rows * cols];
    for (r, c) in hits {
        for (sr, sc) in [(r, c), (-r, -c)] {
            let i = (sr + hr as isize) as usize;
            let j = (sc + hc as isize) as usize;
            data[i * cols + j] += 1.0;
        }
    }
    Ok(Kernel::normalized(rows, cols, data))
}

fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// `min ½‖Ax − b‖²` over all images, posed as the variational inequality with `F = ∇f`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeblurProblem {
    rows: usize,
    cols: usize,
    kernel: Kernel,
    observed: Vec<f64>,
    lipschitz: f64,
}

impl DeblurProblem {
    pub fn new(rows: usize, cols: usize, kernel: Kernel, observed: Vec<f64>) -> Result<Self, OperatorError> {
        check_dim(rows * cols, observed.len())?;
        if rows == 0 || cols == 0 {
            return Err(OperatorError::Invalid(String::from("empty image")));
        }
        let mut p = Self { rows, cols, kernel, observed, lipschitz: 0.0 };
        p.lipschitz = p.power_iteration(1e-9, 20_000);
        Ok(p)
    }

    /// Blurs `image` with `kernel` to produce the observation.
    pub fn from_clean_image(rows: usize, cols: usize, kernel: Kernel, image: &[f64]) -> Result<Self, OperatorError> {
        check_dim(rows * cols, image.len())?;
        let blank = Self { rows, cols, kernel: kernel.clone(), observed: vec![0.0; rows * cols], lipschitz: 0.0 };
        let observed = blank.forward(image);
        Self::new(rows, cols, kernel, observed)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    /// `A x`
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.convolve(x, &mut out, false);
        out
    }

    /// `Aᵀ z`
    pub fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        self.convolve(z, &mut out, true);
        out
    }

    fn convolve(&self, x: &[f64], out: &mut [f64], transpose: bool) {
        let (n, m) = (self.rows, self.cols);
        let (ck, cl) = ((self.kernel.rows / 2) as isize, (self.kernel.cols / 2) as isize);
        out.iter_mut().for_each(|v| *v = 0.0);
        for a in 0..self.kernel.rows {
            for b in 0..self.kernel.cols {
                let w = self.kernel.get(a, b);
                if w == 0.0 {
                    continue;
                }
                let (da, db) = (a as isize - ck, b as isize - cl);
                // forward: out(i,j) += w · x(i − da, j − db); adjoint flips the shift
                let (sa, sb) = if transpose { (da, db) } else { (-da, -db) };
                for i in 0..n {
                    let src_row = wrap(i as isize + sa, n) * m;
                    let dst_row = i * m;
                    for j in 0..m {
                        out[dst_row + j] += w * x[src_row + wrap(j as isize + sb, m)];
                    }
                }
            }
        }
    }

    /// `Aᵀ(Ax − b)`
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        self.apply(x)
    }

    /// `½‖Ax − b‖²`
    pub fn objective(&self, x: &[f64]) -> f64 {
        let ax = self.forward(x);
        let d = linalg::dist(&ax, &self.observed);
        0.5 * d * d
    }

    /// Largest eigenvalue of `AᵀA` by power iteration, stopped when the
    /// Rayleigh quotient changes by less than `rel_tol` relatively.
    pub fn power_iteration(&self, rel_tol: f64, max_iter: usize) -> f64 {
        let len = self.rows * self.cols;
        // deterministic start with a constant component plus xorshift noise
        let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
        let mut v: Vec<f64> = (0..len)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                1.0 + ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
            })
            .collect();
        let nv = linalg::norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut estimate = 0.0;
        for _ in 0..max_iter {
            let w = self.adjoint(&self.forward(&v));
            let rayleigh = linalg::dot(&v, &w);
            let nw = linalg::norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            v = w;
            v.iter_mut().for_each(|x| *x /= nw);
            let converged = (rayleigh - estimate).abs() <= rel_tol * rayleigh.abs();
            estimate = rayleigh;
            if converged {
                break;
            }
        }
        estimate
    }
}

impl Operator for DeblurProblem {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), OperatorError> {
        check_dim(self.dim(), x.len())?;
        let mut resid = self.forward(x);
        for (r, b) in resid.iter_mut().zip(&self.observed) {
            *r -= b;
        }
        self.convolve(&resid, out, true);
        Ok(())
    }

    fn lipschitz_estimate(&self) -> Result<f64, OperatorError> {
        Ok(self.lipschitz)
    }
}
