//! Posterior summarization and model comparison.
//!
//! Summaries are per-parameter: mean, standard deviation, shortest 95% (or
//! any level) HPD interval, and — when ground truth is available — RMSE
//! against it. Model comparison offers the deviance information criterion
//! (DIC, with its `pD` effective-parameter penalty) and the log
//! pseudo-marginal likelihood (LPML) built from per-individual conditional
//! predictive ordinates. Both consume the per-draw log-likelihoods a
//! [`ChainOutput`](crate::sampler::ChainOutput) records, so no data pass is
//! needed beyond the single plug-in deviance evaluation DIC requires.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{data_loglik, ModelData, ModelState, PriorBlock};
use crate::numeric::{log_sum_exp, mean, population_variance};
use crate::sampler::ChainOutput;
use crate::scalar::Scalar;

/// Shortest interval over the sorted draws containing `⌈level·n⌉` of them
/// (the empirical HPD interval).
///
/// Needs at least one draw and `level ∈ (0, 1)`. With all draws equal the
/// interval has zero width.
pub fn hpd_interval<S: Scalar>(draws: &[S], level: S) -> Result<(S, S)> {
    if draws.is_empty() {
        return Err(Error::EmptyInput("HPD interval of no draws".into()));
    }
    if !(level > S::zero() && level < S::one()) {
        return Err(Error::InvalidValue(format!(
            "HPD level must lie strictly inside (0, 1), got {level}"
        )));
    }
    if draws.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidValue(
            "HPD interval needs finite draws".into(),
        ));
    }
    let n = draws.len();
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    // ⌈level·n⌉ draws must fall inside the window.
    let m = (level * S::from_f64(n as f64)).ceil().to_f64() as usize;
    let m = m.clamp(1, n);
    let mut best = (sorted[0], sorted[m - 1]);
    let mut best_width = best.1 - best.0;
    for i in 1..=(n - m) {
        let width = sorted[i + m - 1] - sorted[i];
        if width < best_width {
            best_width = width;
            best = (sorted[i], sorted[i + m - 1]);
        }
    }
    Ok(best)
}

/// Monte Carlo standard error of a chain mean by the batch-means method
/// (⌊√n⌋ batches). Needs at least 4 draws.
pub fn mcse_batch_means<S: Scalar>(draws: &[S]) -> Result<S> {
    if draws.len() < 4 {
        return Err(Error::EmptyInput(format!(
            "batch-means standard error needs at least 4 draws, got {}",
            draws.len()
        )));
    }
    let b = (draws.len() as f64).sqrt().floor() as usize;
    let len = draws.len() / b;
    let batch_means: Vec<S> = (0..b)
        .map(|i| mean(&draws[i * len..(i + 1) * len]))
        .collect();
    let grand = mean(&batch_means);
    let var = batch_means
        .iter()
        .map(|&m| (m - grand) * (m - grand))
        .sum::<S>()
        / S::from_f64((b - 1) as f64);
    Ok((var / S::from_f64(b as f64)).sqrt())
}

/// Split-chain potential scale reduction factor: the chain is halved and
/// the two halves compared. Values near 1 indicate the halves agree; a
/// constant chain returns exactly 1.
pub fn split_rhat<S: Scalar>(draws: &[S]) -> Result<S> {
    if draws.len() < 8 {
        return Err(Error::EmptyInput(format!(
            "split R-hat needs at least 8 draws, got {}",
            draws.len()
        )));
    }
    let m = draws.len() / 2;
    let halves = [&draws[..m], &draws[draws.len() - m..]];
    let nm = S::from_f64(m as f64);
    let chain_means: Vec<S> = halves.iter().map(|h| mean(h)).collect();
    let within = halves
        .iter()
        .map(|h| {
            let mu = mean(h);
            h.iter().map(|&x| (x - mu) * (x - mu)).sum::<S>() / (nm - S::one())
        })
        .sum::<S>()
        / S::from_f64(2.0);
    let grand = mean(&chain_means);
    let between = chain_means
        .iter()
        .map(|&c| (c - grand) * (c - grand))
        .sum::<S>()
        * nm;
    if within == S::zero() && between == S::zero() {
        return Ok(S::one());
    }
    let var_plus = (nm - S::one()) / nm * within + between / nm;
    Ok((var_plus / within).sqrt())
}

/// Posterior statistics of one scalar parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSummary<S> {
    pub name: String,
    pub mean: S,
    pub sd: S,
    pub hpd_lower: S,
    pub hpd_upper: S,
    /// Ground truth, when known.
    pub truth: Option<S>,
    /// `sqrt(mean over draws of (draw − truth)²)`, when truth is known.
    pub rmse: Option<S>,
}

impl<S: Scalar> ParameterSummary<S> {
    pub fn hpd_length(&self) -> S {
        self.hpd_upper - self.hpd_lower
    }
}

/// Per-parameter posterior summaries of one chain.
#[derive(Debug, Clone)]
pub struct PosteriorSummary<S> {
    /// The HPD mass level the intervals were computed at.
    pub level: S,
    pub n_draws: usize,
    pub parameters: Vec<ParameterSummary<S>>,
}

impl<S: Scalar> PosteriorSummary<S> {
    pub fn get(&self, name: &str) -> Option<&ParameterSummary<S>> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

/// Summarize every parameter of a chain: mean, SD (population variance over
/// the draws), HPD interval at `level`, and RMSE against any ground truth
/// supplied by name.
///
/// SD and RMSE use the same n-divisor moments, so the identity
/// `RMSE² = SD² + (mean − truth)²` holds for every parameter.
pub fn summarize<S: Scalar>(
    chain: &ChainOutput<S>,
    truth: Option<&BTreeMap<String, S>>,
    level: S,
) -> Result<PosteriorSummary<S>> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyInput("cannot summarize an empty chain".into()));
    }
    let mut parameters = Vec::with_capacity(chain.names.len());
    let mut column = vec![S::zero(); chain.n_draws()];
    for (idx, name) in chain.names.iter().enumerate() {
        for (d, draw) in chain.draws.iter().enumerate() {
            column[d] = draw[idx];
        }
        let mu = mean(&column);
        let sd = population_variance(&column).sqrt();
        let (hpd_lower, hpd_upper) = hpd_interval(&column, level)?;
        let truth_value = truth.and_then(|t| t.get(name)).copied();
        let rmse = truth_value.map(|t| {
            (column.iter().map(|&x| (x - t) * (x - t)).sum::<S>()
                / S::from_f64(column.len() as f64))
            .sqrt()
        });
        parameters.push(ParameterSummary {
            name: name.clone(),
            mean: mu,
            sd,
            hpd_lower,
            hpd_upper,
            truth: truth_value,
            rmse,
        });
    }
    Ok(PosteriorSummary {
        level,
        n_draws: chain.n_draws(),
        parameters,
    })
}

/// Deviance-based fit scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DicScore<S> {
    /// Mean posterior deviance `E[−2 ln L]`.
    pub dbar: S,
    /// Effective parameter count `Dbar − D(posterior means)`.
    pub pd: S,
    /// `Dbar + pD`.
    pub dic: S,
}

/// All the model-comparison scores reported together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelScore<S> {
    pub dbar: S,
    pub pd: S,
    pub dic: S,
    pub lpml: S,
}

/// Build the posterior-mean state of a chain, renormalizing each simplex
/// block (means of simplex draws can drift from summing to exactly 1 by
/// rounding). Emits a warning if any block needed more than a `1e-9`
/// adjustment, which would indicate corrupt draws rather than rounding.
fn posterior_mean_state<S: Scalar>(chain: &ChainOutput<S>) -> Result<ModelState<S>> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyInput("no draws to average".into()));
    }
    let n = S::from_f64(chain.draws.len() as f64);
    let mut means = vec![S::zero(); chain.names.len()];
    for draw in &chain.draws {
        for (m, &x) in means.iter_mut().zip(draw) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }

    // Simplex blocks within the flat layout: m, (phi under the
    // Dirichlet–Dirichlet family), and every allele-frequency row.
    let i = chain.n_sources;
    let mut blocks: Vec<(usize, usize)> = vec![(0, i)];
    use crate::priors::PriorKind;
    let mut pos = i + 1; // past m and omega
    match chain.kind {
        PriorKind::Uniform => {}
        PriorKind::DirichletDirichlet => {
            blocks.push((pos + 1, i)); // phi, after rho
            pos += 1 + i + chain.n_covariates + 1;
        }
        PriorKind::DirichletLognormal => {
            pos += 1 + i + chain.n_covariates + 1;
        }
    }
    for &a in &chain.alleles_per_locus {
        for _ in 0..i {
            blocks.push((pos, a));
            pos += a;
        }
    }
    for (start, len) in blocks {
        let total: S = means[start..start + len].iter().copied().sum();
        if (total - S::one()).abs() > S::from_f64(1e-9) {
            eprintln!(
                "warning: posterior-mean simplex block at offset {start} sums to {total}; renormalizing"
            );
        }
        for v in &mut means[start..start + len] {
            *v /= total;
        }
    }
    ModelState::from_flat(
        chain.n_sources,
        &chain.alleles_per_locus,
        chain.kind,
        chain.n_covariates,
        &means,
    )
}

/// Deviance information criterion from a chain's recorded log-likelihoods:
/// `Dbar` is the mean posterior deviance, `pD = Dbar − D(θ̄)` with `θ̄` the
/// (renormalized) posterior-mean parameters, and `DIC = Dbar + pD`.
///
/// The deviance drops data-only multiplicative constants, consistently for
/// every model fitted to the same data, so DIC *differences* are unaffected.
pub fn dic<S: Scalar>(chain: &ChainOutput<S>, data: &ModelData<S>) -> Result<DicScore<S>> {
    if chain.log_likelihoods.is_empty() {
        return Err(Error::EmptyInput("chain has no recorded log-likelihoods".into()));
    }
    let minus_two = S::from_f64(-2.0);
    let dbar = minus_two * mean(&chain.log_likelihoods);
    let mean_state = posterior_mean_state(chain)?;
    let d_hat = minus_two * data_loglik(&mean_state, data)?;
    let pd = dbar - d_hat;
    Ok(DicScore {
        dbar,
        pd,
        dic: dbar + pd,
    })
}

/// Log pseudo-marginal likelihood: `Σ_k ln CPO_k` over colony individuals,
/// where `CPO_k` is the harmonic mean over draws of individual `k`'s
/// likelihood. Computed in log space:
/// `ln CPO_k = ln S − logsumexp_s(−ℓ_{k,s})`.
///
/// Requires the chain to have recorded per-individual colony terms, i.e.
/// the fitted data must contain colony genotypes.
pub fn lpml<S: Scalar>(chain: &ChainOutput<S>) -> Result<S> {
    if chain.colony_logliks.is_empty() {
        return Err(Error::EmptyInput("chain has no recorded draws".into()));
    }
    let n_individuals = chain.colony_logliks[0].len();
    if n_individuals == 0 {
        return Err(Error::EmptyInput(
            "LPML needs colony individuals; the fitted data had none".into(),
        ));
    }
    let n_draws = S::from_f64(chain.colony_logliks.len() as f64);
    let mut total = S::zero();
    let mut neg = vec![S::zero(); chain.colony_logliks.len()];
    for k in 0..n_individuals {
        for (s, draw) in chain.colony_logliks.iter().enumerate() {
            neg[s] = -draw[k];
        }
        total += n_draws.ln() - log_sum_exp(&neg);
    }
    Ok(total)
}

/// DIC and LPML together, as reported in model-comparison tables.
pub fn model_score<S: Scalar>(
    chain: &ChainOutput<S>,
    data: &ModelData<S>,
) -> Result<ModelScore<S>> {
    let d = dic(chain, data)?;
    Ok(ModelScore {
        dbar: d.dbar,
        pd: d.pd,
        dic: d.dic,
        lpml: lpml(chain)?,
    })
}

/// The posterior-mean hyper block, occasionally useful for reporting; kept
/// here so the renormalization logic in [`posterior_mean_state`] has a
/// public consumer beyond [`dic`].
pub fn posterior_mean_block<S: Scalar>(chain: &ChainOutput<S>) -> Result<PriorBlock<S>> {
    Ok(posterior_mean_state(chain)?.prior_block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genetics::{AlleleCountTable, Genotype, GenotypeTable};
    use crate::priors::PriorSpec;
    use crate::sampler::{run_chain, ChainConfig};
    use approx::assert_relative_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Exhaustive O(n²) shortest-window search, the oracle for
    /// `hpd_interval`.
    fn hpd_oracle(draws: &[f64], level: f64) -> (f64, f64) {
        let mut sorted = draws.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        let m = ((level * n as f64).ceil() as usize).clamp(1, n);
        let mut best = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n {
            for j in i..n {
                if j - i + 1 >= m && sorted[j] - sorted[i] < best.1 - best.0 {
                    best = (sorted[i], sorted[j]);
                }
            }
        }
        best
    }

    #[test]
    fn hpd_matches_the_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..100 {
            let n = rng.random_range(2..=500);
            // Mix of smooth and clumpy draws to exercise ties.
            let draws: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_range(0.0..1.0) < 0.3 {
                        rng.random_range(0..5) as f64
                    } else {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * rng.random_range(0.1..3.0)
                    }
                })
                .collect();
            let level = rng.random_range(0.5..0.99);
            let (lo, hi) = hpd_interval(&draws, level).unwrap();
            let (olo, ohi) = hpd_oracle(&draws, level);
            // Multiple optimal windows can exist; widths must agree exactly.
            assert_eq!(hi - lo, ohi - olo, "trial {trial}: width mismatch");
        }
    }

    #[test]
    fn hpd_on_a_grid_has_known_width() {
        // Draws 1..=100, level 0.95 → 95 points → width 94.
        let draws: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let (lo, hi) = hpd_interval(&draws, 0.95).unwrap();
        assert_eq!(hi - lo, 94.0);
    }

    #[test]
    fn hpd_of_constant_draws_is_a_point() {
        let (lo, hi) = hpd_interval(&[2.5f64; 40], 0.95).unwrap();
        assert_eq!((lo, hi), (2.5, 2.5));
    }

    #[test]
    fn hpd_approximates_normal_quantiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws: Vec<f64> = (0..100_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let (lo, hi) = hpd_interval(&draws, 0.95).unwrap();
        assert!((lo + 1.96).abs() < 0.05, "lower {lo}");
        assert!((hi - 1.96).abs() < 0.05, "upper {hi}");
    }

    #[test]
    fn hpd_rejects_bad_input() {
        assert!(hpd_interval::<f64>(&[], 0.95).is_err());
        assert!(hpd_interval(&[1.0f64], 1.0).is_err());
        assert!(hpd_interval(&[1.0f64, f64::NAN], 0.9).is_err());
    }

    #[test]
    fn mcse_tracks_the_iid_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                2.0 * z
            })
            .collect();
        let se = mcse_batch_means(&draws).unwrap();
        let expect = 2.0 / (draws.len() as f64).sqrt();
        assert!(
            (se - expect).abs() < 0.5 * expect,
            "se {se}, expected ≈ {expect}"
        );
    }

    #[test]
    fn split_rhat_is_near_one_for_iid_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let draws: Vec<f64> = (0..5_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = split_rhat(&draws).unwrap();
        assert!((r - 1.0).abs() < 0.02, "rhat {r}");
    }

    #[test]
    fn split_rhat_flags_a_drifting_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws: Vec<f64> = (0..2_000)
            .map(|i| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z + if i < 1_000 { 0.0 } else { 3.0 }
            })
            .collect();
        let r = split_rhat(&draws).unwrap();
        assert!(r > 1.5, "rhat {r}");
    }

    #[test]
    fn split_rhat_of_a_constant_chain_is_one() {
        assert_eq!(split_rhat(&[1.0f64; 100]).unwrap(), 1.0);
    }

    fn tiny_chain(seed: u64) -> (ChainOutput<f64>, crate::model::ModelData<f64>) {
        let colony = GenotypeTable::new(
            vec![
                Genotype::new(vec![Some((0, 1))]),
                Genotype::new(vec![Some((0, 0))]),
                Genotype::new(vec![Some((1, 1))]),
                Genotype::new(vec![Some((0, 1))]),
            ],
            vec![2],
        )
        .unwrap();
        let counts =
            AlleleCountTable::new(vec![vec![vec![25, 15]], vec![vec![5, 35]]]).unwrap();
        let data = crate::model::ModelData::new(colony, counts, None).unwrap();
        let config = ChainConfig {
            iterations: 900,
            burnin: 300,
            thin: 3,
            seed,
            ..ChainConfig::default()
        };
        let chain = run_chain(&data, &PriorSpec::uniform(), &config).unwrap();
        (chain, data)
    }

    #[test]
    fn summaries_carry_truth_and_the_rmse_identity() {
        let (chain, _) = tiny_chain(11);
        let mut truth = BTreeMap::new();
        truth.insert("m[1]".to_string(), 0.6);
        truth.insert("omega".to_string(), 0.1);
        let summary = summarize(&chain, Some(&truth), 0.95).unwrap();
        assert_eq!(summary.n_draws, chain.n_draws());
        assert_eq!(summary.parameters.len(), chain.names.len());

        let m1 = summary.get("m[1]").unwrap();
        assert_eq!(m1.truth, Some(0.6));
        let rmse = m1.rmse.unwrap();
        let bias = m1.mean - 0.6;
        assert_relative_eq!(
            rmse * rmse,
            m1.sd * m1.sd + bias * bias,
            max_relative = 1e-12
        );
        assert!(m1.hpd_lower <= m1.mean && m1.mean <= m1.hpd_upper);

        // No truth supplied for p parameters: no RMSE either.
        let p = summary.get("p[1,1,1]").unwrap();
        assert_eq!(p.truth, None);
        assert_eq!(p.rmse, None);
    }

    #[test]
    fn rmse_identity_holds_on_every_parameter() {
        let (chain, _) = tiny_chain(12);
        let truth: BTreeMap<String, f64> = chain
            .names
            .iter()
            .map(|n| (n.clone(), 0.37))
            .collect();
        let summary = summarize(&chain, Some(&truth), 0.9).unwrap();
        for p in &summary.parameters {
            let rmse = p.rmse.unwrap();
            let bias = p.mean - 0.37;
            assert!(
                (rmse * rmse - (p.sd * p.sd + bias * bias)).abs() < 1e-12,
                "{}: rmse² {} vs sd²+bias² {}",
                p.name,
                rmse * rmse,
                p.sd * p.sd + bias * bias
            );
        }
    }

    #[test]
    fn dic_identity_and_plugin_deviance() {
        let (chain, data) = tiny_chain(13);
        let score = dic(&chain, &data).unwrap();
        assert!((score.dic - (score.dbar + score.pd)).abs() < 1e-9);
        // D(θ̄) must equal a direct evaluation at the renormalized mean.
        let mean_state = posterior_mean_state(&chain).unwrap();
        let d_hat = -2.0 * data_loglik(&mean_state, &data).unwrap();
        assert_relative_eq!(score.dbar - score.pd, d_hat, max_relative = 1e-12);
        // For a genuinely fitted chain the plug-in deviance should beat the
        // average deviance.
        assert!(score.pd > 0.0, "pD = {}", score.pd);
    }

    #[test]
    fn constant_chain_has_zero_pd() {
        let (mut chain, data) = tiny_chain(14);
        let first_draw = chain.draws[0].clone();
        let first_ll = chain.log_likelihoods[0];
        let first_colony = chain.colony_logliks[0].clone();
        for d in &mut chain.draws {
            *d = first_draw.clone();
        }
        for l in &mut chain.log_likelihoods {
            *l = first_ll;
        }
        for c in &mut chain.colony_logliks {
            *c = first_colony.clone();
        }
        let score = dic(&chain, &data).unwrap();
        assert!(score.pd.abs() < 1e-7, "pD {}", score.pd);
        assert_relative_eq!(score.dic, score.dbar, max_relative = 1e-9);

        // Single-draw LPML is just the summed log-likelihood of that draw.
        let expect: f64 = first_colony.iter().sum();
        assert_relative_eq!(lpml(&chain).unwrap(), expect, max_relative = 1e-10);
    }

    #[test]
    fn lpml_is_invariant_to_draw_duplication() {
        let (chain, _) = tiny_chain(15);
        let base = lpml(&chain).unwrap();
        let mut doubled = chain.clone();
        doubled.colony_logliks.extend(chain.colony_logliks.clone());
        assert_relative_eq!(lpml(&doubled).unwrap(), base, max_relative = 1e-10);
    }

    #[test]
    fn lpml_needs_colony_individuals() {
        let counts = AlleleCountTable::new(vec![vec![vec![3, 7]]]).unwrap();
        let colony = GenotypeTable::new(vec![], vec![2]).unwrap();
        let data = crate::model::ModelData::<f64>::new(colony, counts, None).unwrap();
        let config = ChainConfig {
            iterations: 60,
            burnin: 20,
            thin: 2,
            seed: 1,
            ..ChainConfig::default()
        };
        let chain = run_chain(&data, &PriorSpec::uniform(), &config).unwrap();
        assert!(matches!(lpml(&chain), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn mean_state_is_a_valid_renormalized_state() {
        let (chain, _) = tiny_chain(16);
        let state = posterior_mean_state(&chain).unwrap();
        let s: f64 = state.mix.as_slice().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        for l in 0..1 {
            for i in 0..2 {
                let s: f64 = state.freqs.row(l, i).iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(
            posterior_mean_block(&chain).unwrap(),
            PriorBlock::Uniform
        ));
    }
}
