//! The floating-point abstraction used throughout the crate.
//!
//! All model code is written against [`Scalar`] so the same likelihoods and
//! samplers run at `f64` (the default, and the precision at which the
//! validation suite pins its tolerances) or `f32`. The trait folds in the
//! handful of extras `num_traits::Float` lacks: the log-gamma function,
//! conversions, seeded random draws, and a per-type simplex tolerance.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, StandardUniform};

/// Floating-point scalar with the numerical surface the samplers need.
pub trait Scalar:
    Float + FloatConst + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Natural log of the gamma function, `ln Γ(x)` for `x > 0`.
    fn ln_gamma(self) -> Self;

    /// Conversion from `f64`, used for literal constants in generic code.
    fn from_f64(v: f64) -> Self;

    /// Widening conversion to `f64` for reporting.
    fn to_f64(self) -> f64;

    /// One draw from Uniform[0, 1).
    fn standard_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from Gamma(shape, scale = 1). Requires `shape > 0`.
    fn standard_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self;

    /// How far a probability vector's sum may drift from 1 and still count
    /// as a simplex. Wider for `f32`, where the accumulation error of a few
    /// hundred components is itself above `1e-12`.
    fn simplex_tolerance() -> Self;
}

/// Lanczos approximation to `ln Γ(x)` (g = 7, 9 terms), accurate to roughly
/// `1e-13` relative error over the positive reals. Arguments `x <= 0` are not
/// in this crate's domain and yield NaN.
fn ln_gamma_f64(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection; keeps full accuracy for small arguments.
        let sin_term = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI.ln() - sin_term.ln() - ln_gamma_f64(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = COEFFS[0];
        for (i, c) in COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

impl Scalar for f64 {
    fn ln_gamma(self) -> Self {
        ln_gamma_f64(self)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn standard_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardUniform.sample(rng)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn standard_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
        Gamma::new(shape, 1.0)
            .expect("gamma shape must be positive")
            .sample(rng)
    }

    fn simplex_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn ln_gamma(self) -> Self {
        ln_gamma_f64(self as f64) as f32
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn standard_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardUniform.sample(rng)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn standard_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
        Gamma::new(shape, 1.0f32)
            .expect("gamma shape must be positive")
            .sample(rng)
    }

    fn simplex_tolerance() -> Self {
        1e-5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ln_gamma_matches_reference_values() {
        // ln Γ at a few points with known closed forms.
        assert_relative_eq!(ln_gamma_f64(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma_f64(2.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            ln_gamma_f64(0.5),
            0.5 * std::f64::consts::PI.ln(),
            epsilon = 1e-13
        );
        // Γ(11) = 10!
        assert_relative_eq!(ln_gamma_f64(11.0), (3_628_800.0f64).ln(), epsilon = 1e-13);
    }

    #[test]
    fn ln_gamma_matches_statrs_over_a_grid() {
        // Independent implementation check across small, fractional, and
        // large arguments, including the reflection branch.
        for k in 1..400 {
            let x = 0.01 * k as f64;
            let ours = ln_gamma_f64(x);
            let theirs = statrs::function::gamma::ln_gamma(x);
            assert_relative_eq!(ours, theirs, epsilon = 1e-10, max_relative = 1e-12);
        }
        for &x in &[5.0, 17.3, 123.456, 1e4] {
            assert_relative_eq!(
                ln_gamma_f64(x),
                statrs::function::gamma::ln_gamma(x),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn ln_gamma_recurrence_holds() {
        // ln Γ(x + 1) = ln Γ(x) + ln x.
        for &x in &[0.1, 0.7, 1.5, 3.25, 9.0] {
            assert_relative_eq!(
                ln_gamma_f64(x + 1.0),
                ln_gamma_f64(x) + x.ln(),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn f32_path_agrees_with_f64() {
        for &x in &[0.25f32, 1.0, 4.5, 40.0] {
            let wide = ln_gamma_f64(x as f64) as f32;
            assert!((Scalar::ln_gamma(x) - wide).abs() <= f32::EPSILON * wide.abs().max(1.0));
        }
    }

    #[test]
    fn draws_land_in_expected_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let u: f64 = Scalar::standard_uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
            let g: f64 = Scalar::standard_gamma(2.5, &mut rng);
            assert!(g > 0.0);
            let z: f64 = Scalar::standard_normal(&mut rng);
            assert!(z.is_finite());
        }
    }

    #[test]
    fn gamma_draw_moments_are_plausible() {
        // Gamma(shape, 1) has mean = shape, var = shape.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let shape = 3.0f64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let g = f64::standard_gamma(shape, &mut rng);
            sum += g;
            sumsq += g * g;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        // 3-sigma Monte Carlo bands.
        let se_mean = (shape / n as f64).sqrt();
        assert!((mean - shape).abs() < 3.0 * se_mean, "mean {mean}");
        assert!((var - shape).abs() < 0.1, "var {var}");
    }
}
