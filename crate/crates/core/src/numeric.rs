//! Small numerical building blocks: stable log-space reductions and the
//! handful of distribution log-densities the priors and samplers share.

use crate::scalar::Scalar;

/// `ln Σ exp(x_k)`, computed with max-shifting so it never overflows and
/// stays exact for widely spread magnitudes.
///
/// An empty slice, or one containing only `-inf`, yields `-inf`.
pub fn log_sum_exp<S: Scalar>(terms: &[S]) -> S {
    let mut max = S::neg_infinity();
    for &t in terms {
        if t > max {
            max = t;
        }
    }
    if !max.is_finite() {
        // All -inf (or empty): the sum is zero. +inf propagates as +inf.
        return max;
    }
    let mut acc = S::zero();
    for &t in terms {
        acc += (t - max).exp();
    }
    max + acc.ln()
}

/// Overflow-safe softmax: `exp(x_i) / Σ_j exp(x_j)`.
///
/// The result is non-negative and sums to 1 for any finite input. When the
/// spread of the inputs exceeds roughly 745 the small components underflow
/// to exact zero; callers that need an open simplex pass the result through
/// [`floor_simplex`].
pub fn softmax<S: Scalar>(xs: &[S]) -> Vec<S> {
    let mut max = S::neg_infinity();
    for &x in xs {
        if x > max {
            max = x;
        }
    }
    let mut out: Vec<S> = xs.iter().map(|&x| (x - max).exp()).collect();
    let total: S = out.iter().copied().sum();
    for o in &mut out {
        *o /= total;
    }
    out
}

/// Push a probability vector strictly inside the simplex: raise every
/// component to at least `floor` and renormalize. A no-op for vectors
/// already above the floor. Used where downstream code requires open-simplex
/// values but floating point has rounded a component to the boundary.
pub fn floor_simplex<S: Scalar>(mut v: Vec<S>, floor: S) -> Vec<S> {
    if v.len() == 1 {
        return vec![S::one()];
    }
    let mut changed = false;
    for x in &mut v {
        if *x < floor {
            *x = floor;
            changed = true;
        }
    }
    if changed {
        let total: S = v.iter().copied().sum();
        for x in &mut v {
            *x /= total;
        }
    }
    v
}

/// Log-density of Normal(mean, variance) at `x`. Requires `variance > 0`.
pub fn normal_logpdf<S: Scalar>(x: S, mean: S, variance: S) -> S {
    let two = S::from_f64(2.0);
    let d = x - mean;
    -(two * S::PI() * variance).ln() / two - d * d / (two * variance)
}

/// Log-density of Gamma(shape, rate) at `x` (so the mean is `shape / rate`).
/// Outside the support (`x <= 0`) the result is `-inf`.
pub fn gamma_logpdf<S: Scalar>(x: S, shape: S, rate: S) -> S {
    if x <= S::zero() {
        return S::neg_infinity();
    }
    shape * rate.ln() - shape.ln_gamma() + (shape - S::one()) * x.ln() - rate * x
}

/// Log-density of Dirichlet(params) at `x`.
///
/// The support is the open simplex: any component of `x` outside (0, 1)
/// makes the result `-inf`, including boundary points where the density
/// would diverge for concentrations below 1. Callers are responsible for
/// `params` being strictly positive.
pub fn dirichlet_logpdf<S: Scalar>(x: &[S], params: &[S]) -> S {
    debug_assert_eq!(x.len(), params.len());
    // Degenerate one-component simplex: x = (1) with probability one.
    if x.len() == 1 {
        return if (x[0] - S::one()).abs() <= S::simplex_tolerance() {
            S::zero()
        } else {
            S::neg_infinity()
        };
    }
    let mut total_param = S::zero();
    let mut acc = S::zero();
    for (&xi, &ai) in x.iter().zip(params) {
        if xi <= S::zero() || xi >= S::one() {
            return S::neg_infinity();
        }
        total_param += ai;
        acc += (ai - S::one()) * xi.ln() - ai.ln_gamma();
    }
    acc + total_param.ln_gamma()
}

/// Arithmetic mean. Empty input yields NaN.
pub fn mean<S: Scalar>(xs: &[S]) -> S {
    let n = S::from_f64(xs.len() as f64);
    xs.iter().copied().sum::<S>() / n
}

/// Population variance (divides by `n`, not `n - 1`). With this convention
/// `mean((x - t)^2) = var(x) + (mean(x) - t)^2` holds exactly, which the
/// posterior summaries rely on.
pub fn population_variance<S: Scalar>(xs: &[S]) -> S {
    let m = mean(xs);
    let n = S::from_f64(xs.len() as f64);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<S>() / n
}
