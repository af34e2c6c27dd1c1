//! Metropolis–Hastings updates for the three block shapes the model uses:
//! simplex-valued blocks, (0, 1) scalars, and unconstrained real vectors.
//!
//! Every update takes the target log-density *in the block's original
//! coordinates* and handles the logit reparameterization (and its Jacobian)
//! internally. Proposals whose target is `-inf` or NaN are rejected, so
//! support constraints never need special-casing by callers.

use rand::Rng;

use crate::error::Result;
use crate::numeric::normal_logpdf;
use crate::sampler::optimize::maximize;
use crate::sampler::transform::{
    log_jacobian_det, log_jacobian_unit, logit_to_simplex, logit_to_unit, simplex_to_logit,
    unit_to_logit,
};
use crate::scalar::Scalar;

/// How a block proposes its next value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalStyle {
    /// Gaussian random walk in the unconstrained coordinates. The default.
    RandomWalk,
    /// Independence sampler: a Gaussian centered at the conditional mode
    /// (found by quasi-Newton ascent each update) with standard deviation
    /// `step`. The acceptance ratio includes the proposal density, keeping
    /// the update exact regardless of how well the mode is located.
    Independence,
}

/// Shared accept/reject decision. NaN ratios reject.
pub(crate) fn accept<S: Scalar, R: Rng + ?Sized>(log_ratio: S, rng: &mut R) -> bool {
    if log_ratio >= S::zero() {
        return true;
    }
    let u: S = S::standard_uniform(rng);
    u.ln() < log_ratio
}

/// One MH update of a simplex-valued block.
///
/// `log_target` is the unnormalized log-density of the block in simplex
/// coordinates (`-inf` outside the support). Returns the new value and
/// whether the proposal was accepted. A zero `step` proposes the current
/// point, which is always accepted. Blocks of dimension ≤ 1 have nothing to
/// sample and return immediately.
pub fn mh_update_simplex_block<S, R, F>(
    current: &[S],
    log_target: &F,
    style: ProposalStyle,
    step: S,
    rng: &mut R,
) -> Result<(Vec<S>, bool)>
where
    S: Scalar,
    R: Rng + ?Sized,
    F: Fn(&[S]) -> S,
{
    if current.len() <= 1 {
        return Ok((current.to_vec(), true));
    }
    let xi = simplex_to_logit(current)?;
    let target_xi = |z: &[S]| log_target(&logit_to_simplex(z)) + log_jacobian_det(z);

    let (xi_new, extra) = match style {
        ProposalStyle::RandomWalk => {
            let prop: Vec<S> = xi
                .iter()
                .map(|&z| z + step * S::standard_normal(rng))
                .collect();
            (prop, S::zero())
        }
        ProposalStyle::Independence => {
            let center = maximize(&target_xi, &xi, 60);
            let prop: Vec<S> = center
                .iter()
                .map(|&c| c + step * S::standard_normal(rng))
                .collect();
            let var = step * step;
            let log_q = |z: &[S]| -> S {
                z.iter()
                    .zip(&center)
                    .map(|(&zi, &ci)| normal_logpdf(zi, ci, var))
                    .sum()
            };
            // q(current) - q(proposal), added to the target ratio below.
            (prop.clone(), log_q(&xi) - log_q(&prop))
        }
    };

    let log_ratio = target_xi(&xi_new) - target_xi(&xi) + extra;
    if accept(log_ratio, rng) {
        Ok((logit_to_simplex(&xi_new), true))
    } else {
        Ok((current.to_vec(), false))
    }
}

/// One random-walk MH update of a scalar constrained to (0, 1), via a
/// Gaussian step on the logit scale. `log_target` is the log-density in the
/// original (0, 1) coordinate.
pub fn mh_update_unit_scalar<S, R, F>(
    current: S,
    log_target: &F,
    step: S,
    rng: &mut R,
) -> Result<(S, bool)>
where
    S: Scalar,
    R: Rng + ?Sized,
    F: Fn(S) -> S,
{
    let z = unit_to_logit(current)?;
    let z_new = z + step * S::standard_normal(rng);
    let x_new = logit_to_unit(z_new);
    let log_ratio = log_target(x_new) + log_jacobian_unit(x_new)
        - (log_target(current) + log_jacobian_unit(current));
    if accept(log_ratio, rng) {
        Ok((x_new, true))
    } else {
        Ok((current, false))
    }
}

/// One symmetric random-walk MH update of an unconstrained real vector.
/// No Jacobian is involved; `log_target` is evaluated directly.
pub fn mh_update_real_block<S, R, F>(
    current: &[S],
    log_target: &F,
    step: S,
    rng: &mut R,
) -> (Vec<S>, bool)
where
    S: Scalar,
    R: Rng + ?Sized,
    F: Fn(&[S]) -> S,
{
    let prop: Vec<S> = current
        .iter()
        .map(|&x| x + step * S::standard_normal(rng))
        .collect();
    let log_ratio = log_target(&prop) - log_target(current);
    if accept(log_ratio, rng) {
        (prop, true)
    } else {
        (current.to_vec(), false)
    }
}

/// Robbins–Monro step-size adaptation toward a 0.25–0.40 acceptance band.
///
/// Acceptance is tallied in windows; after each window the log step size
/// moves toward the band midpoint with a gain that decays as `1/√k` over
/// windows `k`, so adjustments settle. The chain driver only feeds this
/// during burn-in — the step is frozen afterwards, keeping the sampled
/// chain a genuine Markov chain.
#[derive(Debug, Clone)]
pub struct StepAdapter<S> {
    step: S,
    window: usize,
    accepted: usize,
    trials: usize,
    windows_done: usize,
}

/// Midpoint of the targeted acceptance band.
const TARGET_RATE: f64 = 0.325;

impl<S: Scalar> StepAdapter<S> {
    pub fn new(initial_step: S, window: usize) -> Self {
        StepAdapter {
            step: initial_step,
            window: window.max(1),
            accepted: 0,
            trials: 0,
            windows_done: 0,
        }
    }

    pub fn step(&self) -> S {
        self.step
    }

    /// Record one burn-in trial; adjusts the step at window boundaries.
    pub fn record(&mut self, accepted: bool) {
        self.trials += 1;
        if accepted {
            self.accepted += 1;
        }
        if self.trials == self.window {
            self.windows_done += 1;
            let rate = self.accepted as f64 / self.trials as f64;
            let gain = 2.0 / (self.windows_done as f64).sqrt();
            let factor = S::from_f64((gain * (rate - TARGET_RATE)).exp());
            self.step = (self.step * factor)
                .max(S::from_f64(1e-4))
                .min(S::from_f64(50.0));
            self.accepted = 0;
            self.trials = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dirichlet_logpdf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Standard error of a chain mean by batch means (30 batches).
    fn batch_se(xs: &[f64]) -> f64 {
        let b = 30usize;
        let len = xs.len() / b;
        let means: Vec<f64> = (0..b)
            .map(|i| xs[i * len..(i + 1) * len].iter().sum::<f64>() / len as f64)
            .collect();
        let grand = means.iter().sum::<f64>() / b as f64;
        let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
        (var / b as f64).sqrt()
    }

    #[test]
    fn unit_scalar_samples_beta_2_2() {
        // Target ∝ x(1-x): Beta(2,2), mean 1/2, variance 1/20.
        let target = |x: f64| x.ln() + (1.0 - x).ln();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut x = 0.3;
        let mut draws = Vec::with_capacity(30_000);
        for _ in 0..30_000 {
            (x, _) = mh_update_unit_scalar(x, &target, 1.2, &mut rng).unwrap();
            draws.push(x);
        }
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!(
            (mean - 0.5).abs() < 3.0 * batch_se(&draws),
            "mean {mean}, se {}",
            batch_se(&draws)
        );
        let var =
            draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((var - 0.05).abs() < 0.005, "var {var}");
    }

    #[test]
    fn real_block_samples_a_wide_normal() {
        // Target: Normal(0, 10).
        let target = |x: &[f64]| -x[0] * x[0] / 20.0;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = vec![0.0];
        let mut draws = Vec::with_capacity(40_000);
        for _ in 0..40_000 {
            let (nx, _) = mh_update_real_block(&x, &target, 6.0, &mut rng);
            x = nx;
            draws.push(x[0]);
        }
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 3.0 * batch_se(&draws), "mean {mean}");
        assert!((var - 10.0).abs() < 1.0, "var {var}");
    }

    #[test]
    fn log_scale_walk_samples_an_exponential() {
        // Sample τ ~ Exp(1) by walking z = ln τ; the Jacobian term +z makes
        // the z-space target e^z-weighted. Mean of τ should be 1.
        let target = |z: &[f64]| -z[0].exp() + z[0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut z = vec![0.0];
        let mut draws = Vec::with_capacity(40_000);
        for _ in 0..40_000 {
            let (nz, _) = mh_update_real_block(&z, &target, 1.5, &mut rng);
            z = nz;
            draws.push(z[0].exp());
        }
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 1.0).abs() < 4.0 * batch_se(&draws), "mean {mean}");
    }

    #[test]
    fn simplex_block_samples_a_dirichlet() {
        let params = [2.0f64, 3.0, 5.0];
        let target = |x: &[f64]| dirichlet_logpdf(x, &params);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = vec![1.0 / 3.0; 3];
        let n = 60_000;
        let mut comp: Vec<Vec<f64>> = vec![Vec::with_capacity(n); 3];
        for _ in 0..n {
            let (nx, _) =
                mh_update_simplex_block(&x, &target, ProposalStyle::RandomWalk, 0.5, &mut rng)
                    .unwrap();
            x = nx;
            for i in 0..3 {
                comp[i].push(x[i]);
            }
        }
        for i in 0..3 {
            let mean = comp[i].iter().sum::<f64>() / n as f64;
            let expect = params[i] / 10.0;
            let se = batch_se(&comp[i]);
            assert!(
                (mean - expect).abs() < 4.0 * se,
                "component {i}: mean {mean}, expected {expect}, se {se}"
            );
        }
    }

    #[test]
    fn independence_style_matches_and_mixes_fast() {
        let params = [2.0f64, 3.0, 5.0];
        let target = |x: &[f64]| dirichlet_logpdf(x, &params);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = vec![1.0 / 3.0; 3];
        let n = 20_000;
        let mut accepted = 0usize;
        let mut first = Vec::with_capacity(n);
        for _ in 0..n {
            let (nx, acc) =
                mh_update_simplex_block(&x, &target, ProposalStyle::Independence, 0.45, &mut rng)
                    .unwrap();
            x = nx;
            accepted += acc as usize;
            first.push(x[0]);
        }
        let mean = first.iter().sum::<f64>() / n as f64;
        assert!(
            (mean - 0.2).abs() < 4.0 * batch_se(&first),
            "mean {mean}"
        );
        // Mode-centered proposals with a reasonable scale accept often.
        let rate = accepted as f64 / n as f64;
        assert!(rate > 0.3, "acceptance {rate}");
    }

    #[test]
    fn zero_step_proposals_always_accept_in_place() {
        let target = |x: &[f64]| dirichlet_logpdf(x, &[2.0, 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = vec![0.4, 0.6];
        let (nx, acc) =
            mh_update_simplex_block(&x, &target, ProposalStyle::RandomWalk, 0.0, &mut rng)
                .unwrap();
        assert!(acc);
        for (a, b) in x.iter().zip(&nx) {
            assert!((a - b).abs() < 1e-12);
        }
        let (u, acc) = mh_update_unit_scalar(0.3, &|x: f64| x.ln(), 0.0, &mut rng).unwrap();
        assert!(acc && (u - 0.3).abs() < 1e-12);
    }

    #[test]
    fn degenerate_simplex_is_a_no_op() {
        let target = |_: &[f64]| 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (nx, acc) =
            mh_update_simplex_block(&[1.0], &target, ProposalStyle::RandomWalk, 0.5, &mut rng)
                .unwrap();
        assert!(acc);
        assert_eq!(nx, vec![1.0]);
    }

    #[test]
    fn unsupported_proposals_are_rejected() {
        // Target supported only below 0.5: proposals above it return -inf
        // and must never be accepted.
        let target = |x: f64| if x < 0.5 { 0.0 } else { f64::NEG_INFINITY };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut x = 0.25;
        for _ in 0..5000 {
            (x, _) = mh_update_unit_scalar(x, &target, 2.0, &mut rng).unwrap();
            assert!(x < 0.5, "accepted unsupported state {x}");
        }
    }

    #[test]
    fn detailed_balance_holds_on_a_coarse_partition() {
        // Beta(2,2) target, state space cut into thirds: across a long
        // stationary run, flows i→j and j→i must balance within noise.
        let target = |x: f64| x.ln() + (1.0 - x).ln();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut x = 0.5;
        // Warm up into stationarity.
        for _ in 0..2000 {
            (x, _) = mh_update_unit_scalar(x, &target, 1.0, &mut rng).unwrap();
        }
        let bin = |v: f64| if v < 1.0 / 3.0 { 0 } else if v < 2.0 / 3.0 { 1 } else { 2 };
        let mut flows = [[0u64; 3]; 3];
        let mut prev = bin(x);
        for _ in 0..400_000 {
            (x, _) = mh_update_unit_scalar(x, &target, 1.0, &mut rng).unwrap();
            let b = bin(x);
            flows[prev][b] += 1;
            prev = b;
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let fwd = flows[i][j] as f64;
                let back = flows[j][i] as f64;
                let scale = (fwd + back).sqrt();
                assert!(
                    (fwd - back).abs() < 4.0 * scale,
                    "flow imbalance {i}->{j}: {fwd} vs {back}"
                );
            }
        }
    }

    #[test]
    fn adapter_pulls_acceptance_into_the_band() {
        let target = |x: &[f64]| -x[0] * x[0] / 2.0;
        for bad_start in [0.001f64, 40.0] {
            let mut rng = ChaCha8Rng::seed_from_u64(10);
            let mut adapter = StepAdapter::new(bad_start, 50);
            let mut x = vec![0.0];
            for _ in 0..4000 {
                let (nx, acc) = mh_update_real_block(&x, &target, adapter.step(), &mut rng);
                x = nx;
                adapter.record(acc);
            }
            // Frozen step from here on; measure the realized rate.
            let step = adapter.step();
            let mut accepted = 0usize;
            for _ in 0..4000 {
                let (nx, acc) = mh_update_real_block(&x, &target, step, &mut rng);
                x = nx;
                accepted += acc as usize;
            }
            let rate = accepted as f64 / 4000.0;
            assert!(
                (0.15..=0.5).contains(&rate),
                "start {bad_start}: rate {rate} with step {step}"
            );
        }
    }
}
