//! Independent oracles shared by the integration tests.

use nalgebra::{DMatrix, DVector};
use visolve_core::linalg::{dist, dot};

/// Brute force: for every assignment of {free, lower, upper} to the
/// coordinates, solve the equality-constrained least-squares subproblem and
/// keep the closest candidate that is feasible.
pub fn enumerate_projection(t: &[Vec<f64>], r: &[f64], lower: &[f64], upper: &[f64], z: &[f64]) -> Vec<f64> {
    let n = z.len();
    let q = t.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut status = vec![0u8; n];
        let mut c = code;
        for s in status.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let mut x = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|&i| status[i] == 0).collect();
        for i in 0..n {
            match status[i] {
                1 => x[i] = lower[i],
                2 => x[i] = upper[i],
                _ => {}
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            continue;
        }
        if !free.is_empty() {
            // x_F = z_F + T_Fᵀ m, with T_F T_Fᵀ m = r − T_B x_B − T_F z_F
            let tf = DMatrix::from_fn(q, free.len(), |i, j| t[i][free[j]]);
            let rhs = DVector::from_fn(q, |i, _| {
                let fixed: f64 = (0..n).filter(|k| status[*k] != 0).map(|k| t[i][k] * x[k]).sum();
                let zf: f64 = free.iter().map(|&k| t[i][k] * z[k]).sum();
                r[i] - fixed - zf
            });
            let gram = &tf * tf.transpose();
            let m = match gram.svd(true, true).solve(&rhs, 1e-12) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let step = tf.transpose() * m;
            for (j, &k) in free.iter().enumerate() {
                x[k] = z[k] + step[j];
            }
        }
        let eq_ok = (0..q).all(|i| (dot(&t[i], &x) - r[i]).abs() <= 1e-8);
        let box_ok = (0..n).all(|i| x[i] >= lower[i] - 1e-9 && x[i] <= upper[i] + 1e-9);
        if eq_ok && box_ok {
            let d = dist(&x, z);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, x));
            }
        }
    }
    best.expect("feasible set is non-empty").1
}

/// Minimizer of `½ Σ wᵢ xᵢ²` over the polyhedron, via the change of
/// variables `s = √w x`, which turns it into a Euclidean projection of 0.
#[allow(dead_code)]
pub fn weighted_min_norm(t: &[Vec<f64>], r: &[f64], lower: &[f64], upper: &[f64], w: &[f64]) -> Vec<f64> {
    let root: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let ts: Vec<Vec<f64>> = t.iter().map(|row| row.iter().zip(&root).map(|(a, s)| a / s).collect()).collect();
    let lo: Vec<f64> = lower.iter().zip(&root).map(|(l, s)| l * s).collect();
    let up: Vec<f64> = upper.iter().zip(&root).map(|(u, s)| u * s).collect();
    let s = enumerate_projection(&ts, r, &lo, &up, &vec![0.0; w.len()]);
    s.iter().zip(&root).map(|(v, q)| v / q).collect()
}
