//! Bijections between constrained parameter spaces and ℝ^d.
//!
//! All Metropolis proposals are made in unconstrained coordinates: a simplex
//! of dimension `p + 1` maps to ℝ^p by the multinomial logit (last component
//! as baseline), and a (0, 1) scalar maps to ℝ by the ordinary logit. Target
//! densities are specified in the original coordinates, so acceptance
//! ratios need the log-Jacobians below.

use crate::error::{Error, Result};
use crate::numeric::{floor_simplex, log_sum_exp, softmax};
use crate::scalar::Scalar;

/// Map an interior simplex point `θ` (length `p + 1`) to logit coordinates
/// `ξ ∈ ℝ^p`, with `ξ_i = ln(θ_i / θ_{p+1})`.
///
/// Boundary points (any component ≤ 0) have no finite image and are
/// rejected. The 1-simplex `(1)` maps to the empty vector.
pub fn simplex_to_logit<S: Scalar>(theta: &[S]) -> Result<Vec<S>> {
    if theta.is_empty() {
        return Err(Error::EmptyInput("simplex point has no components".into()));
    }
    if theta.iter().any(|&t| t <= S::zero()) {
        return Err(Error::InvalidValue(
            "logit transform needs a strictly interior simplex point".into(),
        ));
    }
    let base = theta[theta.len() - 1].ln();
    Ok(theta[..theta.len() - 1]
        .iter()
        .map(|&t| t.ln() - base)
        .collect())
}

/// Inverse of [`simplex_to_logit`]: `θ_i = exp(ξ_i) / (1 + Σ_j exp(ξ_j))`,
/// `θ_{p+1} = 1 / (1 + Σ_j exp(ξ_j))`.
///
/// Computed as an overflow-safe softmax; components that underflow at
/// extreme `ξ` are floored at `1e-300`, so every component is strictly
/// positive for any finite input — which is what the forward transform
/// needs. (At extreme `ξ` the dominant component can still round to exactly
/// 1; validating constructors elsewhere treat that as out of support, which
/// makes such proposals self-rejecting.)
pub fn logit_to_simplex<S: Scalar>(xi: &[S]) -> Vec<S> {
    let mut padded = Vec::with_capacity(xi.len() + 1);
    padded.extend_from_slice(xi);
    padded.push(S::zero());
    floor_simplex(softmax(&padded), S::from_f64(1e-300))
}

/// Log of the absolute Jacobian determinant of [`logit_to_simplex`] at `ξ`:
///
/// `Σ_j ξ_j - (p + 1) · ln(1 + Σ_j exp(ξ_j))`
///
/// The empty vector (1-simplex) gives 0.
pub fn log_jacobian_det<S: Scalar>(xi: &[S]) -> S {
    let p1 = S::from_f64((xi.len() + 1) as f64);
    let mut padded = Vec::with_capacity(xi.len() + 1);
    padded.extend_from_slice(xi);
    padded.push(S::zero());
    let log_denom = log_sum_exp(&padded);
    xi.iter().copied().sum::<S>() - p1 * log_denom
}

/// Logit of a (0, 1) scalar.
pub fn unit_to_logit<S: Scalar>(x: S) -> Result<S> {
    if !(x > S::zero() && x < S::one()) {
        return Err(Error::InvalidValue(format!(
            "logit transform needs a value strictly inside (0, 1), got {x}"
        )));
    }
    Ok((x / (S::one() - x)).ln())
}

/// Inverse logit (sigmoid), evaluated stably on both tails.
pub fn logit_to_unit<S: Scalar>(z: S) -> S {
    if z >= S::zero() {
        S::one() / (S::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (S::one() + e)
    }
}

/// Log-Jacobian of the sigmoid as a function of the *original* coordinate:
/// `ln x + ln(1 - x)`. `-inf` on the boundary, which makes boundary
/// proposals self-rejecting.
pub fn log_jacobian_unit<S: Scalar>(x: S) -> S {
    x.ln() + (S::one() - x).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn closed_form_jacobians() {
        // p = 1, ξ = 0: θ = (1/2, 1/2), Jacobian 1/4.
        assert_relative_eq!(log_jacobian_det(&[0.0f64]), 0.25f64.ln(), epsilon = 1e-14);
        // p = 2, ξ = (0, 0): θ uniform on 3 points, determinant 1/27.
        assert_relative_eq!(
            log_jacobian_det(&[0.0f64, 0.0]),
            (1.0f64 / 27.0).ln(),
            epsilon = 1e-14
        );
        // Degenerate simplex: empty ξ, zero log-Jacobian.
        assert_eq!(log_jacobian_det::<f64>(&[]), 0.0);
    }

    #[test]
    fn degenerate_simplex_round_trips() {
        assert_eq!(simplex_to_logit(&[1.0f64]).unwrap(), Vec::<f64>::new());
        assert_eq!(logit_to_simplex::<f64>(&[]), vec![1.0]);
    }

    #[test]
    fn boundary_points_are_rejected() {
        assert!(simplex_to_logit(&[0.0f64, 1.0]).is_err());
        assert!(unit_to_logit(0.0f64).is_err());
        assert!(unit_to_logit(1.0f64).is_err());
    }

    #[test]
    fn extreme_logits_stay_strictly_positive() {
        let theta = logit_to_simplex(&[800.0f64, -800.0]);
        assert!(theta.iter().all(|&t| t > 0.0));
        assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Still a valid input to the forward transform.
        assert!(simplex_to_logit(&theta).is_ok());
    }

    #[test]
    fn unit_logit_round_trips() {
        for &x in &[1e-12, 0.3, 0.5, 0.999_999] {
            let z = unit_to_logit(x).unwrap();
            assert_relative_eq!(logit_to_unit(z), x, max_relative = 1e-10);
        }
        // Tails saturate gracefully.
        assert!(logit_to_unit(-800.0f64) >= 0.0);
        assert!(logit_to_unit(800.0f64) <= 1.0);
    }

    proptest! {
        #[test]
        fn simplex_round_trip_is_tight(
            raw in proptest::collection::vec(0.01f64..1.0, 2..8)
        ) {
            let total: f64 = raw.iter().sum();
            let theta: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let xi = simplex_to_logit(&theta).unwrap();
            let back = logit_to_simplex(&xi);
            for (a, b) in theta.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn logit_round_trip_is_tight(
            xi in proptest::collection::vec(-20.0f64..20.0, 1..7)
        ) {
            let theta = logit_to_simplex(&xi);
            let back = simplex_to_logit(&theta).unwrap();
            for (a, b) in xi.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
            }
        }
    }
}
