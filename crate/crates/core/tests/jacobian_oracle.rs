//! The logit-transform Jacobian against a finite-difference oracle.
//!
//! `log_jacobian_det` is a closed form; here the determinant is rebuilt
//! numerically — central differences of the inverse transform column by
//! column, then an LU determinant — with no shared code between the two
//! routes.

use mixstock_core::sampler::transform::{log_jacobian_det, logit_to_simplex};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Determinant by LU decomposition with partial pivoting.
fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        if a[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        det *= a[k][k];
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Central-difference Jacobian of the first `p` simplex coordinates with
/// respect to the `p` logits.
fn fd_jacobian(xi: &[f64], h: f64) -> Vec<Vec<f64>> {
    let p = xi.len();
    let mut m = vec![vec![0.0; p]; p];
    for b in 0..p {
        let mut plus = xi.to_vec();
        plus[b] += h;
        let mut minus = xi.to_vec();
        minus[b] -= h;
        let tp = logit_to_simplex(&plus);
        let tm = logit_to_simplex(&minus);
        for (a, row) in m.iter_mut().enumerate() {
            row[b] = (tp[a] - tm[a]) / (2.0 * h);
        }
    }
    m
}

#[test]
fn log_jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in [1usize, 2, 6] {
        for trial in 0..20 {
            let xi: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
            let exact = log_jacobian_det(&xi).exp();
            let fd = determinant(fd_jacobian(&xi, 1e-4));
            let rel = (fd - exact).abs() / exact.abs();
            assert!(
                rel < 1e-5,
                "p = {p}, trial {trial}: exact {exact}, finite-difference {fd}, relative error {rel}"
            );
        }
    }
}

#[test]
fn log_jacobian_closed_forms_at_the_origin() {
    // At ξ = 0 every simplex coordinate is 1/(p+1) and the determinant is
    // (p+1)^-(p+1): 1/4 for p = 1, 1/27 for p = 2.
    assert!((log_jacobian_det(&[0.0]) - 0.25_f64.ln()).abs() < 1e-14);
    assert!((log_jacobian_det(&[0.0, 0.0]) - (1.0 / 27.0_f64).ln()).abs() < 1e-14);
}
