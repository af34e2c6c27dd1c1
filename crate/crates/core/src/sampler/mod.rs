//! The Metropolis-within-Gibbs chain driver.
//!
//! [`run_chain`] sweeps the parameter blocks in a fixed order — every
//! allele-frequency row, then the mixture proportions, the assortative
//! weight, and the active prior family's hyper-parameters — updating each
//! with a Metropolis–Hastings step in unconstrained coordinates (see
//! [`transform`] and [`mh`]). Step sizes adapt toward a 0.25–0.40 acceptance
//! band during burn-in and freeze afterwards.
//!
//! The expensive part of every update is the colony likelihood, so the
//! driver maintains an incremental cache of per-(pair, individual) genotype
//! probability products: frequency-row proposals touch only the pairs
//! involving the updated source, and mixture/assortative proposals reuse all
//! of them and only reweight. Each recorded state also stores its data
//! log-likelihood and the per-individual colony terms, which is what the
//! deviance-based model scores in [`crate::diagnostics`] consume.

pub mod mh;
pub mod transform;

mod cache;
mod optimize;

use std::cell::RefCell;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genetics::{AlleleFrequencies, GenotypeTable, MixtureProportions};
use crate::model::{ModelData, ModelState, param_names};
use crate::numeric::{gamma_logpdf, normal_logpdf};
use crate::priors::{
    eta_from_covariates, log_prior_m_dirdir, log_prior_m_dirlognormal, log_prior_phi,
    log_prior_psi, CovariateMatrix, PriorKind, PriorSpec, RegressionCoefficients,
};
use crate::scalar::Scalar;
use cache::{ColonyCache, RowScratch};
use mh::{
    accept, mh_update_real_block, mh_update_simplex_block, mh_update_unit_scalar, ProposalStyle,
    StepAdapter,
};
use optimize::maximize;
use transform::{log_jacobian_det, logit_to_simplex, simplex_to_logit};

/// Proposal settings for one parameter block.
#[derive(Debug, Clone, Copy)]
pub struct BlockSettings<S> {
    /// Initial proposal scale in the block's unconstrained coordinates
    /// (adapted during burn-in).
    pub step: S,
    pub style: ProposalStyle,
}

impl<S: Scalar> BlockSettings<S> {
    fn walk(step: f64) -> Self {
        BlockSettings {
            step: S::from_f64(step),
            style: ProposalStyle::RandomWalk,
        }
    }
}

/// Everything that controls one MCMC run.
///
/// `iterations` counts full sweeps; the first `burnin` of them are discarded
/// (and are the only ones where step sizes adapt), after which every
/// `thin`-th sweep is recorded.
#[derive(Debug, Clone)]
pub struct ChainConfig<S> {
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
    /// Sweeps per step-size adaptation window during burn-in.
    pub adapt_window: usize,
    /// Settings for each allele-frequency row update.
    pub freq_rows: BlockSettings<S>,
    pub mix: BlockSettings<S>,
    pub omega: BlockSettings<S>,
    pub rho: BlockSettings<S>,
    pub phi: BlockSettings<S>,
    pub alpha: BlockSettings<S>,
    pub tau: BlockSettings<S>,
    pub psi: BlockSettings<S>,
}

impl<S: Scalar> Default for ChainConfig<S> {
    fn default() -> Self {
        ChainConfig {
            iterations: 30_000,
            burnin: 5_000,
            thin: 5,
            seed: 0,
            adapt_window: 50,
            freq_rows: BlockSettings::walk(0.25),
            mix: BlockSettings::walk(0.25),
            omega: BlockSettings::walk(0.5),
            rho: BlockSettings::walk(0.5),
            phi: BlockSettings::walk(0.25),
            alpha: BlockSettings::walk(0.25),
            tau: BlockSettings::walk(0.5),
            psi: BlockSettings::walk(0.25),
        }
    }
}

impl<S: Scalar> ChainConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidValue("iterations must be positive".into()));
        }
        if self.burnin >= self.iterations {
            return Err(Error::InvalidValue(format!(
                "burn-in ({}) must be shorter than the run ({})",
                self.burnin, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidValue("thinning interval must be positive".into()));
        }
        if self.adapt_window == 0 {
            return Err(Error::InvalidValue("adaptation window must be positive".into()));
        }
        for (name, b) in [
            ("freq_rows", &self.freq_rows),
            ("mix", &self.mix),
            ("omega", &self.omega),
            ("rho", &self.rho),
            ("phi", &self.phi),
            ("alpha", &self.alpha),
            ("tau", &self.tau),
            ("psi", &self.psi),
        ] {
            if !(b.step >= S::zero()) || !b.step.is_finite() {
                return Err(Error::InvalidValue(format!(
                    "{name} step must be a finite non-negative number"
                )));
            }
        }
        Ok(())
    }

    /// Number of sweeps that will be recorded.
    pub fn n_draws(&self) -> usize {
        (self.iterations - self.burnin).div_ceil(self.thin)
    }
}

/// A finished chain: recorded draws in the canonical flat parameter order,
/// their data log-likelihoods, and bookkeeping about the run.
#[derive(Debug, Clone)]
pub struct ChainOutput<S> {
    pub n_sources: usize,
    pub alleles_per_locus: Vec<usize>,
    pub kind: PriorKind,
    pub n_covariates: usize,
    /// Parameter names, in the order of each row of `draws` (see
    /// [`param_names`]).
    pub names: Vec<String>,
    /// One flat parameter vector per recorded sweep.
    pub draws: Vec<Vec<S>>,
    /// The sweep index each draw was recorded at.
    pub draw_iterations: Vec<usize>,
    /// Data log-likelihood (source counts + colony) of each recorded draw.
    pub log_likelihoods: Vec<S>,
    /// Per-individual colony log-likelihood terms of each recorded draw
    /// (empty inner vectors when there is no colony data).
    pub colony_logliks: Vec<Vec<S>>,
    /// Post-burn-in acceptance rate of every adapted block.
    pub acceptance: BTreeMap<String, f64>,
    /// Step size of every adapted block after burn-in freezing.
    pub final_steps: BTreeMap<String, f64>,
    pub seed: u64,
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
}

impl<S: Scalar> ChainOutput<S> {
    pub fn n_draws(&self) -> usize {
        self.draws.len()
    }

    /// The recorded values of one named parameter.
    pub fn column(&self, name: &str) -> Option<Vec<S>> {
        let idx = self.names.iter().position(|n| n == name)?;
        Some(self.draws.iter().map(|d| d[idx]).collect())
    }

    /// Rebuild the full model state of one recorded draw.
    pub fn state_at(&self, draw: usize) -> Result<ModelState<S>> {
        ModelState::from_flat(
            self.n_sources,
            &self.alleles_per_locus,
            self.kind,
            self.n_covariates,
            &self.draws[draw],
        )
    }
}

/// Log-likelihood of one (source, locus) count row at frequency `row`,
/// dropping the multinomial constant. `-inf` when an observed allele has
/// zero frequency.
fn source_row_loglik<S: Scalar>(counts: &[u32], row: &[S]) -> S {
    let mut ll = S::zero();
    for (&n, &p) in counts.iter().zip(row) {
        if n > 0 {
            if !(p > S::zero()) {
                return S::neg_infinity();
            }
            ll += S::from_f64(n as f64) * p.ln();
        }
    }
    ll
}

fn or_neg_inf<S: Scalar>(r: Result<S>) -> S {
    r.unwrap_or(S::neg_infinity())
}

/// Bound on the log-scale coordinates used for ψ and τ updates, far outside
/// any plausible posterior but safely inside `exp` range.
const MAX_LOG_SCALE: f64 = 300.0;

/// Acceptance bookkeeping for one block: Robbins–Monro adaptation during
/// burn-in, a plain tally afterwards.
struct Tracker<S> {
    adapter: StepAdapter<S>,
    accepted: u64,
    trials: u64,
}

impl<S: Scalar> Tracker<S> {
    fn new(step: S, window: usize) -> Self {
        Tracker {
            adapter: StepAdapter::new(step, window),
            accepted: 0,
            trials: 0,
        }
    }

    fn step(&self) -> S {
        self.adapter.step()
    }

    fn record(&mut self, accepted: bool, adapting: bool) {
        if adapting {
            self.adapter.record(accepted);
        } else {
            self.trials += 1;
            self.accepted += u64::from(accepted);
        }
    }

    fn rate(&self) -> f64 {
        self.accepted as f64 / self.trials.max(1) as f64
    }
}

/// One MH update of a single allele-frequency row, evaluated through the
/// incremental colony cache. Maintains `freqs`, the cache, and the cached
/// source-row / colony log-likelihood terms in place; returns whether the
/// proposal was accepted.
#[allow(clippy::too_many_arguments)]
fn update_freq_row<S: Scalar, R: Rng + ?Sized>(
    colony: &GenotypeTable,
    counts: &[u32],
    freqs: &mut AlleleFrequencies<S>,
    cache: &mut ColonyCache<S>,
    scratch: &mut RowScratch<S>,
    weights: &[S],
    colony_ll: &mut S,
    src_ll: &mut S,
    locus: usize,
    source: usize,
    style: ProposalStyle,
    step: S,
    rng: &mut R,
) -> Result<bool> {
    let xi = simplex_to_logit(freqs.row(locus, source))?;
    let scratch_cell = RefCell::new(std::mem::take(scratch));

    // Log-target in logit coordinates. Each call leaves the proposal's
    // recomputed cache factors in `scratch_cell`, so the *last* evaluation
    // before the accept decision is the one that can be committed.
    let target = |z: &[S]| -> S {
        let row = logit_to_simplex(z);
        let src = source_row_loglik(counts, &row);
        let col = cache.loglik_with_row(
            colony,
            freqs,
            locus,
            source,
            &row,
            weights,
            &mut scratch_cell.borrow_mut(),
        );
        src + col + log_jacobian_det(z)
    };

    let current_total = *src_ll + *colony_ll + log_jacobian_det(&xi);
    let (z_new, extra) = match style {
        ProposalStyle::RandomWalk => {
            let prop: Vec<S> = xi
                .iter()
                .map(|&z| z + step * S::standard_normal(rng))
                .collect();
            (prop, S::zero())
        }
        ProposalStyle::Independence => {
            let center = maximize(&target, &xi, 30);
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
            let extra = log_q(&xi) - log_q(&prop);
            (prop, extra)
        }
    };

    let total_new = target(&z_new);
    let accepted = accept(total_new - current_total + extra, rng);
    if accepted {
        let row_new = logit_to_simplex(&z_new);
        let src_new = source_row_loglik(counts, &row_new);
        let col_new = total_new - src_new - log_jacobian_det(&z_new);
        freqs.set_row(locus, source, row_new);
        cache.commit_row(locus, source, &mut scratch_cell.borrow_mut());
        *src_ll = src_new;
        *colony_ll = col_new;
    }
    *scratch = scratch_cell.into_inner();
    Ok(accepted)
}

/// The hyper-parameters the driver tracks for whichever family is active.
/// Inactive fields simply stay at their initial values and are never
/// recorded.
struct HyperState<S> {
    rho: S,
    phi: Vec<S>,
    tau: S,
    psi: Vec<S>,
    alpha: Vec<S>,
    /// Dirichlet–Dirichlet concentrations `η(α)`, kept in sync with `alpha`.
    eta: Vec<S>,
}

/// Run one Metropolis-within-Gibbs chain.
///
/// Covariate-regression priors require `data` to carry covariates. The
/// colony table may be empty, in which case the chain samples the model's
/// prior predictive for `m` and `ω` given the source counts — useful for
/// validating the sampler itself.
pub fn run_chain<S: Scalar>(
    data: &ModelData<S>,
    prior: &PriorSpec<S>,
    config: &ChainConfig<S>,
) -> Result<ChainOutput<S>> {
    config.validate()?;
    prior.validate()?;
    let covariates = data.covariates();
    if prior.kind != PriorKind::Uniform && covariates.is_none() {
        return Err(Error::ModelSetup(format!(
            "the {} prior needs per-source covariates",
            prior.kind
        )));
    }

    let n_sources = data.n_sources();
    let n_loci = data.n_loci();
    let alleles_per_locus = data.alleles_per_locus().to_vec();
    let n_covariates = covariates.map_or(0, CovariateMatrix::n_covariates);
    let colony = data.colony();
    let counts = data.source_counts();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Initialize allele frequencies at the add-one-smoothed count
    // proportions, everything else at neutral central values.
    let mut rows = Vec::with_capacity(n_loci);
    for (l, &a) in alleles_per_locus.iter().enumerate() {
        let mut per_locus = Vec::with_capacity(n_sources);
        for i in 0..n_sources {
            let total = counts.total(i, l) as f64 + a as f64;
            per_locus.push(
                counts
                    .row(i, l)
                    .iter()
                    .map(|&n| S::from_f64((n as f64 + 1.0) / total))
                    .collect::<Vec<S>>(),
            );
        }
        rows.push(per_locus);
    }
    let mut freqs = AlleleFrequencies::new(rows)?;
    let mut mix = vec![S::one() / S::from_f64(n_sources as f64); n_sources];
    let mut omega = S::from_f64(0.5);
    let mut hyper = HyperState {
        rho: S::from_f64(0.5),
        phi: mix.clone(),
        tau: S::one(),
        psi: vec![S::one(); n_sources],
        alpha: vec![S::zero(); n_covariates + 1],
        eta: Vec::new(),
    };
    if prior.kind == PriorKind::DirichletDirichlet {
        let rc = RegressionCoefficients::from_vec(&hyper.alpha)?;
        hyper.eta = eta_from_covariates(&rc, covariates.unwrap())?;
    }

    let mut cache = ColonyCache::new(colony, &freqs);
    let mut weights = cache.pair_weights(&mix, omega);
    let mut scratch = RowScratch::default();
    let mut src_ll = vec![vec![S::zero(); n_sources]; n_loci];
    for l in 0..n_loci {
        for i in 0..n_sources {
            src_ll[l][i] = source_row_loglik(counts.row(i, l), freqs.row(l, i));
        }
    }

    // One tracker per genuinely sampled block; degenerate blocks
    // (single-allele rows, a single-source mixture) are skipped entirely.
    let window = config.adapt_window;
    let mut row_trackers: Vec<Option<Tracker<S>>> = Vec::with_capacity(n_loci * n_sources);
    for &a in &alleles_per_locus {
        for _ in 0..n_sources {
            row_trackers.push((a > 1).then(|| Tracker::new(config.freq_rows.step, window)));
        }
    }
    let mut mix_tracker = (n_sources > 1).then(|| Tracker::new(config.mix.step, window));
    let mut omega_tracker = Tracker::new(config.omega.step, window);
    let mut rho_tracker = Tracker::new(config.rho.step, window);
    let mut phi_tracker = Tracker::new(config.phi.step, window);
    let mut alpha_tracker = Tracker::new(config.alpha.step, window);
    let mut tau_tracker = Tracker::new(config.tau.step, window);
    let mut psi_tracker = Tracker::new(config.psi.step, window);

    let names = param_names(n_sources, &alleles_per_locus, prior.kind, n_covariates);
    let mut draws = Vec::with_capacity(config.n_draws());
    let mut draw_iterations = Vec::with_capacity(config.n_draws());
    let mut log_likelihoods = Vec::with_capacity(config.n_draws());
    let mut colony_logliks = Vec::with_capacity(config.n_draws());

    for t in 0..config.iterations {
        let adapting = t < config.burnin;
        // Incremental products drift slowly over many commits; rebuild them
        // from the exact factors now and then.
        if t > 0 && t % 1024 == 0 {
            cache.rebuild_products();
        }
        let mut colony_ll = cache.loglik(&weights);

        // --- allele-frequency rows ---
        for l in 0..n_loci {
            for i in 0..n_sources {
                let Some(tracker) = row_trackers[l * n_sources + i].as_mut() else {
                    continue;
                };
                let accepted = update_freq_row(
                    colony,
                    counts.row(i, l),
                    &mut freqs,
                    &mut cache,
                    &mut scratch,
                    &weights,
                    &mut colony_ll,
                    &mut src_ll[l][i],
                    l,
                    i,
                    config.freq_rows.style,
                    tracker.step(),
                    &mut rng,
                )?;
                tracker.record(accepted, adapting);
            }
        }

        // --- mixture proportions ---
        if let Some(tracker) = mix_tracker.as_mut() {
            let target = |m: &[S]| -> S {
                let prior_term = match prior.kind {
                    PriorKind::Uniform => S::zero(),
                    PriorKind::DirichletDirichlet => or_neg_inf(
                        MixtureProportions::new(m.to_vec()).and_then(|mm| {
                            let phi = MixtureProportions::new(hyper.phi.clone())?;
                            log_prior_m_dirdir(&mm, hyper.rho, &phi)
                        }),
                    ),
                    PriorKind::DirichletLognormal => or_neg_inf(
                        MixtureProportions::new(m.to_vec())
                            .and_then(|mm| log_prior_m_dirlognormal(&mm, &hyper.psi)),
                    ),
                };
                prior_term + cache.loglik(&cache.pair_weights(m, omega))
            };
            let (new_mix, accepted) = mh_update_simplex_block(
                &mix,
                &target,
                config.mix.style,
                tracker.step(),
                &mut rng,
            )?;
            tracker.record(accepted, adapting);
            if accepted {
                mix = new_mix;
                weights = cache.pair_weights(&mix, omega);
                colony_ll = cache.loglik(&weights);
            }
        }

        // --- assortative weight ---
        {
            let target = |w: S| -> S { cache.loglik(&cache.pair_weights(&mix, w)) };
            let (new_omega, accepted) =
                mh_update_unit_scalar(omega, &target, omega_tracker.step(), &mut rng)?;
            omega_tracker.record(accepted, adapting);
            if accepted {
                omega = new_omega;
                weights = cache.pair_weights(&mix, omega);
                colony_ll = cache.loglik(&weights);
            }
        }

        // --- hyper-parameters ---
        match prior.kind {
            PriorKind::Uniform => {}
            PriorKind::DirichletDirichlet => {
                let g = covariates.unwrap();
                let mix_mp = MixtureProportions::new(mix.clone())?;

                let target = |r: S| -> S {
                    or_neg_inf(
                        MixtureProportions::new(hyper.phi.clone())
                            .and_then(|phi| log_prior_m_dirdir(&mix_mp, r, &phi)),
                    )
                };
                let (new_rho, accepted) =
                    mh_update_unit_scalar(hyper.rho, &target, rho_tracker.step(), &mut rng)?;
                rho_tracker.record(accepted, adapting);
                if accepted {
                    hyper.rho = new_rho;
                }

                let target = |f: &[S]| -> S {
                    or_neg_inf(MixtureProportions::new(f.to_vec()).and_then(|phi| {
                        Ok(log_prior_m_dirdir(&mix_mp, hyper.rho, &phi)?
                            + log_prior_phi(&phi, &hyper.eta)?)
                    }))
                };
                let (new_phi, accepted) = mh_update_simplex_block(
                    &hyper.phi,
                    &target,
                    config.phi.style,
                    phi_tracker.step(),
                    &mut rng,
                )?;
                phi_tracker.record(accepted, adapting);
                if accepted {
                    hyper.phi = new_phi;
                }

                let phi_mp = MixtureProportions::new(hyper.phi.clone())?;
                let target = |a: &[S]| -> S {
                    let rc = RegressionCoefficients::from_vec(a).expect("non-empty");
                    let eta = match eta_from_covariates(&rc, g) {
                        Ok(e) => e,
                        Err(_) => return S::neg_infinity(),
                    };
                    let mut lp = or_neg_inf(log_prior_phi(&phi_mp, &eta));
                    for &ar in a {
                        lp += normal_logpdf(ar, S::zero(), prior.alpha_variance);
                    }
                    lp
                };
                let (new_alpha, accepted) =
                    mh_update_real_block(&hyper.alpha, &target, alpha_tracker.step(), &mut rng);
                alpha_tracker.record(accepted, adapting);
                if accepted {
                    hyper.alpha = new_alpha;
                    let rc = RegressionCoefficients::from_vec(&hyper.alpha)?;
                    hyper.eta = eta_from_covariates(&rc, g)
                        .expect("accepted α implies valid concentrations");
                }
            }
            PriorKind::DirichletLognormal => {
                let g = covariates.unwrap();
                let mix_mp = MixtureProportions::new(mix.clone())?;
                let alpha_rc = RegressionCoefficients::from_vec(&hyper.alpha)?;

                // ψ is updated in log coordinates, with the +Σ ln ψ change
                // of variables folded into the target.
                let zeta: Vec<S> = hyper.psi.iter().map(|&p| p.ln()).collect();
                let target = |z: &[S]| -> S {
                    if z.iter().any(|&x| x.abs() > S::from_f64(MAX_LOG_SCALE)) {
                        return S::neg_infinity();
                    }
                    let psi: Vec<S> = z.iter().map(|&x| x.exp()).collect();
                    or_neg_inf(log_prior_m_dirlognormal(&mix_mp, &psi))
                        + or_neg_inf(log_prior_psi(&psi, &alpha_rc, hyper.tau, g))
                        + z.iter().copied().sum::<S>()
                };
                let (new_zeta, accepted) =
                    mh_update_real_block(&zeta, &target, psi_tracker.step(), &mut rng);
                psi_tracker.record(accepted, adapting);
                if accepted {
                    hyper.psi = new_zeta.iter().map(|&x| x.exp()).collect();
                }

                // τ likewise walks on the log scale.
                let target = |z: &[S]| -> S {
                    let lt = z[0];
                    if lt.abs() > S::from_f64(MAX_LOG_SCALE) {
                        return S::neg_infinity();
                    }
                    let tau = lt.exp();
                    or_neg_inf(log_prior_psi(&hyper.psi, &alpha_rc, tau, g))
                        + gamma_logpdf(tau, prior.tau_shape, prior.tau_rate)
                        + lt
                };
                let (new_lt, accepted) = mh_update_real_block(
                    &[hyper.tau.ln()],
                    &target,
                    tau_tracker.step(),
                    &mut rng,
                );
                tau_tracker.record(accepted, adapting);
                if accepted {
                    hyper.tau = new_lt[0].exp();
                }

                let target = |a: &[S]| -> S {
                    let rc = RegressionCoefficients::from_vec(a).expect("non-empty");
                    let mut lp = or_neg_inf(log_prior_psi(&hyper.psi, &rc, hyper.tau, g));
                    for &ar in a {
                        lp += normal_logpdf(ar, S::zero(), prior.alpha_variance);
                    }
                    lp
                };
                let (new_alpha, accepted) =
                    mh_update_real_block(&hyper.alpha, &target, alpha_tracker.step(), &mut rng);
                alpha_tracker.record(accepted, adapting);
                if accepted {
                    hyper.alpha = new_alpha;
                }
            }
        }

        // --- record ---
        if t >= config.burnin && (t - config.burnin) % config.thin == 0 {
            let mut flat = Vec::with_capacity(names.len());
            flat.extend_from_slice(&mix);
            flat.push(omega);
            match prior.kind {
                PriorKind::Uniform => {}
                PriorKind::DirichletDirichlet => {
                    flat.push(hyper.rho);
                    flat.extend_from_slice(&hyper.phi);
                    flat.extend_from_slice(&hyper.alpha);
                }
                PriorKind::DirichletLognormal => {
                    flat.push(hyper.tau);
                    flat.extend_from_slice(&hyper.psi);
                    flat.extend_from_slice(&hyper.alpha);
                }
            }
            for l in 0..n_loci {
                for i in 0..n_sources {
                    flat.extend_from_slice(freqs.row(l, i));
                }
            }
            debug_assert_eq!(flat.len(), names.len());
            draws.push(flat);
            draw_iterations.push(t);
            let src_total = src_ll.iter().flatten().copied().sum::<S>();
            log_likelihoods.push(src_total + colony_ll);
            colony_logliks.push(cache.individual_logliks(&weights));
        }
    }

    let mut acceptance = BTreeMap::new();
    let mut final_steps = BTreeMap::new();
    let mut publish = |name: String, tracker: &Tracker<S>| {
        acceptance.insert(name.clone(), tracker.rate());
        final_steps.insert(name, tracker.step().to_f64());
    };
    for l in 0..n_loci {
        for i in 0..n_sources {
            if let Some(tr) = &row_trackers[l * n_sources + i] {
                publish(format!("p[{},{}]", l + 1, i + 1), tr);
            }
        }
    }
    if let Some(tr) = &mix_tracker {
        publish("m".into(), tr);
    }
    publish("omega".into(), &omega_tracker);
    match prior.kind {
        PriorKind::Uniform => {}
        PriorKind::DirichletDirichlet => {
            publish("rho".into(), &rho_tracker);
            publish("phi".into(), &phi_tracker);
            publish("alpha".into(), &alpha_tracker);
        }
        PriorKind::DirichletLognormal => {
            publish("psi".into(), &psi_tracker);
            publish("tau".into(), &tau_tracker);
            publish("alpha".into(), &alpha_tracker);
        }
    }

    Ok(ChainOutput {
        n_sources,
        alleles_per_locus,
        kind: prior.kind,
        n_covariates,
        names,
        draws,
        draw_iterations,
        log_likelihoods,
        colony_logliks,
        acceptance,
        final_steps,
        seed: config.seed,
        iterations: config.iterations,
        burnin: config.burnin,
        thin: config.thin,
    })
}
