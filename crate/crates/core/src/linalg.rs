//! Small dense linear algebra on `f64` slices.
//!
//! Everything here is sized for the problems the solver targets: vectors of a
//! few thousand entries and matrices with at most a few hundred rows.

use alloc::vec;
use alloc::vec::Vec;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
}

/// Euclidean distance between two vectors of equal length.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += s * x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `out = self * x`
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out = selfᵀ * z`
    pub fn mul_t_vec_into(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, zi) in z.iter().enumerate() {
            if *zi != 0.0 {
                axpy(*zi, self.row(i), out);
            }
        }
    }

    pub fn mul_t_vec(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.mul_t_vec_into(z, &mut out);
        out
    }

    /// `self * selfᵀ`
    pub fn gram_rows(&self) -> Matrix {
        let mut g = Matrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factorization with diagonal pivoting of a symmetric positive
/// semidefinite matrix. Pivots below `rank_tol · max diag` are treated as zero,
/// so rank-deficient systems (e.g. node-arc incidence Gram matrices) factor
/// without breaking down.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    n: usize,
    rank: usize,
    perm: Vec<usize>,
    // lower-triangular factor in the permuted ordering, n × rank, row-major
    l: Vec<f64>,
}

impl PivotedCholesky {
    pub fn factor(a: &Matrix, rank_tol: f64) -> Self {
        let n = a.rows();
        assert_eq!(n, a.cols(), "pivoted Cholesky needs a square matrix");
        let mut work = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let max_diag = (0..n).fold(0.0, |m, i| f64::max(m, a[(i, i)]));
        let threshold = rank_tol * max_diag.max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        let mut rank = 0;

        for k in 0..n {
            // choose the largest remaining diagonal entry
            let (piv, pval) = (k..n)
                .map(|i| (i, work[(perm[i], perm[i])]))
                .fold((k, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
            if pval <= threshold {
                break;
            }
            perm.swap(k, piv);
            l.swap_rows(n, k, piv, k);

            let pk = perm[k];
            let lkk = libm::sqrt(pval);
            l[k * n + k] = lkk;
            for i in k + 1..n {
                let pi = perm[i];
                l[i * n + k] = work[(pi, pk)] / lkk;
            }
            // rank-one downdate of the trailing block
            for i in k + 1..n {
                let pi = perm[i];
                let lik = l[i * n + k];
                for j in k + 1..=i {
                    let pj = perm[j];
                    let v = work[(pi, pj)] - lik * l[j * n + k];
                    work[(pi, pj)] = v;
                    work[(pj, pi)] = v;
                }
            }
            rank += 1;
        }

        Self { n, rank, perm, l }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Solves `A z = rhs` on the range of the factor; components outside the
    /// numerical range are set to zero. For a consistent system the product
    /// `Bᵀ z` (with `A = B Bᵀ`) is the same for every solution.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, r) = (self.n, self.rank);
        let l = |i: usize, j: usize| self.l[i * n + j];
        // forward: L11 y = P rhs (first r rows)
        let mut y = vec![0.0; r];
        for i in 0..r {
            let s = rhs[self.perm[i]] - y[..i].iter().enumerate().map(|(j, yj)| l(i, j) * yj).sum::<f64>();
            y[i] = s / l(i, i);
        }
        // backward: L11ᵀ z1 = y
        let mut z1 = vec![0.0; r];
        for i in (0..r).rev() {
            let s = y[i] - (i + 1..r).map(|j| l(j, i) * z1[j]).sum::<f64>();
            z1[i] = s / l(i, i);
        }
        let mut z = vec![0.0; n];
        for i in 0..r {
            z[self.perm[i]] = z1[i];
        }
        z
    }
}

trait SwapRows {
    fn swap_rows(&mut self, n: usize, a: usize, b: usize, upto: usize);
}

impl SwapRows for Vec<f64> {
    /// Swaps the first `upto` columns of rows `a` and `b`.
    fn swap_rows(&mut self, n: usize, a: usize, b: usize, upto: usize) {
        if a == b {
            return;
        }
        for j in 0..upto {
            self.swap(a * n + j, b * n + j);
        }
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let scale: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}
