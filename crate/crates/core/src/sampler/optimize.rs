//! A small quasi-Newton maximizer for independence proposals.
//!
//! The independence-style Metropolis update centers its proposal at the
//! conditional mode of the current block, found here by BFGS with
//! central-difference gradients and a backtracking line search. The targets
//! are smooth log-densities in at most a dozen dimensions, so nothing
//! fancier is warranted. Failure to converge is benign — the proposal is
//! Metropolis-corrected regardless of where it is centered.

use crate::scalar::Scalar;

/// Central-difference gradient of `f` at `x`.
fn gradient<S: Scalar>(f: &impl Fn(&[S]) -> S, x: &[S], out: &mut [S]) {
    let h = S::from_f64(1e-5);
    let mut probe = x.to_vec();
    for d in 0..x.len() {
        let step = h * x[d].abs().max(S::one());
        probe[d] = x[d] + step;
        let up = f(&probe);
        probe[d] = x[d] - step;
        let down = f(&probe);
        probe[d] = x[d];
        out[d] = (up - down) / (S::from_f64(2.0) * step);
    }
}

/// Maximize `f` starting from `x0`, returning the best point found.
///
/// `f` may return `-inf` (or NaN) outside its support; the line search backs
/// away from such regions.
pub(crate) fn maximize<S: Scalar>(f: &impl Fn(&[S]) -> S, x0: &[S], max_iters: usize) -> Vec<S> {
    let d = x0.len();
    if d == 0 {
        return Vec::new();
    }
    let grad_tol = S::from_f64(1e-8);

    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return x;
    }
    let mut g = vec![S::zero(); d];
    gradient(f, &x, &mut g);

    // Inverse-Hessian approximation, dense row-major, initialized to I.
    let mut h_inv = vec![S::zero(); d * d];
    for i in 0..d {
        h_inv[i * d + i] = S::one();
    }

    let mut dir = vec![S::zero(); d];
    let mut x_new = vec![S::zero(); d];
    let mut g_new = vec![S::zero(); d];

    for _ in 0..max_iters {
        if g.iter().all(|&gi| gi.abs() < grad_tol) {
            break;
        }
        // Ascent direction H·g.
        for i in 0..d {
            let mut acc = S::zero();
            for j in 0..d {
                acc += h_inv[i * d + j] * g[j];
            }
            dir[i] = acc;
        }
        // If the direction has lost ascent (stale curvature), reset to g.
        let slope: S = dir.iter().zip(&g).map(|(&p, &gi)| p * gi).sum();
        if !(slope > S::zero()) {
            dir.copy_from_slice(&g);
            for i in 0..d {
                for j in 0..d {
                    h_inv[i * d + j] = if i == j { S::one() } else { S::zero() };
                }
            }
        }

        // Backtracking line search on t ∈ {1, 1/2, 1/4, …}.
        let mut t = S::one();
        let mut improved = false;
        for _ in 0..40 {
            for i in 0..d {
                x_new[i] = x[i] + t * dir[i];
            }
            let fn_new = f(&x_new);
            if fn_new.is_finite() && fn_new > fx {
                fx = fn_new;
                improved = true;
                break;
            }
            t = t / S::from_f64(2.0);
        }
        if !improved {
            break;
        }

        gradient(f, &x_new, &mut g_new);

        // BFGS update of the inverse Hessian (maximization form: y is the
        // gradient decrease). s = x_new - x, y = g - g_new.
        let s: Vec<S> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<S> = g.iter().zip(&g_new).map(|(&a, &b)| a - b).collect();
        let sy: S = s.iter().zip(&y).map(|(&a, &b)| a * b).sum();
        if sy > S::from_f64(1e-12) {
            // H ← (I - s yᵀ/sy) H (I - y sᵀ/sy) + s sᵀ/sy
            let mut hy = vec![S::zero(); d];
            for i in 0..d {
                let mut acc = S::zero();
                for j in 0..d {
                    acc += h_inv[i * d + j] * y[j];
                }
                hy[i] = acc;
            }
            let yhy: S = y.iter().zip(&hy).map(|(&a, &b)| a * b).sum();
            let c = (S::one() + yhy / sy) / sy;
            for i in 0..d {
                for j in 0..d {
                    h_inv[i * d + j] = h_inv[i * d + j] + c * s[i] * s[j]
                        - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }

        x.copy_from_slice(&x_new);
        g.copy_from_slice(&g_new);

        let step_size: S = s.iter().map(|&v| v * v).sum::<S>().sqrt();
        if step_size < S::from_f64(1e-12) {
            break;
        }
    }
    x
}
