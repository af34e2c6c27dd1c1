//! The joint model: parameter state, observed data, and the log-posterior.
//!
//! A [`ModelState`] collects every sampled quantity — source allele
//! frequencies `P`, mixture proportions `m`, assortative weight `ω`, and the
//! active prior family's hyper-parameters. [`joint_log_posterior`] evaluates
//! the full unnormalized posterior in the original (constrained)
//! coordinates; the sampler adds reparameterization Jacobians separately for
//! whichever block it is updating.

use crate::error::{Error, Result};
use crate::genetics::{
    colony_loglik, source_loglik, AlleleCountTable, AlleleFrequencies, AssortativeCoefficient,
    GenotypeTable, MixtureProportions,
};
use crate::priors::{
    eta_from_covariates, log_prior_m_dirdir, log_prior_m_dirlognormal, log_prior_phi,
    log_prior_psi, log_prior_scalars, CovariateMatrix, DirichletDirichletHyper,
    DirichletLognormalHyper, PriorKind, PriorSpec, RegressionCoefficients, ScalarHyper,
};
use crate::scalar::Scalar;

/// Everything the model observes: colony genotypes, reference allele
/// counts, and (for the covariate prior families) per-source covariates.
#[derive(Debug, Clone)]
pub struct ModelData<S> {
    colony: GenotypeTable,
    source_counts: AlleleCountTable,
    covariates: Option<CovariateMatrix<S>>,
}

impl<S: Scalar> ModelData<S> {
    /// Bundle the observations, checking that all pieces describe the same
    /// sources and loci. An empty colony table is allowed — the posterior
    /// then has no colony term, which is how prior-only runs are expressed.
    pub fn new(
        colony: GenotypeTable,
        source_counts: AlleleCountTable,
        covariates: Option<CovariateMatrix<S>>,
    ) -> Result<Self> {
        if colony.alleles_per_locus() != source_counts.alleles_per_locus() {
            return Err(Error::DimensionMismatch(
                "colony and source counts disagree on loci/alleles".into(),
            ));
        }
        if let Some(g) = &covariates {
            if g.n_sources() != source_counts.n_sources() {
                return Err(Error::DimensionMismatch(format!(
                    "covariates describe {} sources, counts describe {}",
                    g.n_sources(),
                    source_counts.n_sources()
                )));
            }
        }
        Ok(ModelData {
            colony,
            source_counts,
            covariates,
        })
    }

    pub fn colony(&self) -> &GenotypeTable {
        &self.colony
    }

    pub fn source_counts(&self) -> &AlleleCountTable {
        &self.source_counts
    }

    pub fn covariates(&self) -> Option<&CovariateMatrix<S>> {
        self.covariates.as_ref()
    }

    pub fn n_sources(&self) -> usize {
        self.source_counts.n_sources()
    }

    pub fn n_loci(&self) -> usize {
        self.source_counts.n_loci()
    }

    pub fn alleles_per_locus(&self) -> &[usize] {
        self.source_counts.alleles_per_locus()
    }
}

/// The sampled hyper-parameters of whichever prior family is active.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorBlock<S> {
    Uniform,
    DirichletDirichlet(DirichletDirichletHyper<S>),
    DirichletLognormal(DirichletLognormalHyper<S>),
}

impl<S> PriorBlock<S> {
    pub fn kind(&self) -> PriorKind {
        match self {
            PriorBlock::Uniform => PriorKind::Uniform,
            PriorBlock::DirichletDirichlet(_) => PriorKind::DirichletDirichlet,
            PriorBlock::DirichletLognormal(_) => PriorKind::DirichletLognormal,
        }
    }
}

/// One full point in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState<S> {
    pub freqs: AlleleFrequencies<S>,
    pub mix: MixtureProportions<S>,
    pub assortative: AssortativeCoefficient<S>,
    pub prior_block: PriorBlock<S>,
}

/// Log-likelihood of the data alone (colony plus source counts), the
/// quantity the deviance-based model scores are built on. An empty colony
/// contributes nothing.
pub fn data_loglik<S: Scalar>(state: &ModelState<S>, data: &ModelData<S>) -> Result<S> {
    let mut ll = source_loglik(data.source_counts(), &state.freqs)?;
    if !data.colony().is_empty() {
        ll += colony_loglik(
            data.colony(),
            &state.assortative,
            &state.freqs,
            &state.mix,
        )?;
    }
    Ok(ll)
}

/// The joint unnormalized log-posterior in original coordinates:
/// data log-likelihood plus every prior term, including the flat
/// Dirichlet(1) priors on each allele-frequency row (constants, but kept so
/// the value is a genuine joint density).
///
/// States outside the prior support yield `-inf`; structural mismatches
/// (prior family disagreeing with the state's hyper block, covariate priors
/// without covariates) are errors.
pub fn joint_log_posterior<S: Scalar>(
    state: &ModelState<S>,
    data: &ModelData<S>,
    prior: &PriorSpec<S>,
) -> Result<S> {
    prior.validate()?;
    if state.prior_block.kind() != prior.kind {
        return Err(Error::ModelSetup(format!(
            "state carries {} hyper-parameters but the prior is {}",
            state.prior_block.kind(),
            prior.kind
        )));
    }
    if state.mix.len() != data.n_sources() {
        return Err(Error::DimensionMismatch(format!(
            "mixture has {} sources, data has {}",
            state.mix.len(),
            data.n_sources()
        )));
    }

    let mut lp = data_loglik(state, data)?;

    // Flat Dirichlet(1, …, 1) on every (locus, source) frequency row:
    // log-density ln Γ(A_l) each.
    for &a in data.alleles_per_locus() {
        lp += S::from_f64(data.n_sources() as f64) * S::from_f64(a as f64).ln_gamma();
    }

    match &state.prior_block {
        PriorBlock::Uniform => {
            // Flat Dirichlet on m...
            lp += S::from_f64(state.mix.len() as f64).ln_gamma();
            // ...and uniform ω.
            lp += log_prior_scalars(state.assortative.value(), ScalarHyper::None, None);
        }
        PriorBlock::DirichletDirichlet(h) => {
            let g = data.covariates().ok_or_else(|| {
                Error::ModelSetup(
                    "Dirichlet–Dirichlet prior needs per-source covariates".into(),
                )
            })?;
            let eta = eta_from_covariates(&h.alpha, g)?;
            lp += log_prior_m_dirdir(&state.mix, h.rho, &h.phi)?;
            lp += log_prior_phi(&h.phi, &eta)?;
            lp += log_prior_scalars(
                state.assortative.value(),
                ScalarHyper::Rho(h.rho),
                Some((&h.alpha, prior.alpha_variance)),
            );
        }
        PriorBlock::DirichletLognormal(h) => {
            let g = data.covariates().ok_or_else(|| {
                Error::ModelSetup(
                    "Dirichlet–lognormal prior needs per-source covariates".into(),
                )
            })?;
            lp += log_prior_m_dirlognormal(&state.mix, &h.psi)?;
            lp += log_prior_psi(&h.psi, &h.alpha, h.tau, g)?;
            lp += log_prior_scalars(
                state.assortative.value(),
                ScalarHyper::Tau {
                    value: h.tau,
                    shape: prior.tau_shape,
                    rate: prior.tau_rate,
                },
                Some((&h.alpha, prior.alpha_variance)),
            );
        }
    }
    Ok(lp)
}

/// Canonical flat ordering of the sampled parameters, used by chain files,
/// posterior summaries, and ground-truth comparisons. One-based indices:
///
/// `m[1..I], omega, <hyper block>, p[l,i,j] for l, i, j in row-major order`
///
/// where the hyper block is `rho, phi[1..I], alpha[0..R]` for the
/// Dirichlet–Dirichlet family, `tau, psi[1..I], alpha[0..R]` for the
/// Dirichlet–lognormal family (with `alpha[0]` the intercept), and empty
/// for the uniform prior.
pub fn param_names(
    n_sources: usize,
    alleles_per_locus: &[usize],
    kind: PriorKind,
    n_covariates: usize,
) -> Vec<String> {
    let mut names = Vec::new();
    for i in 1..=n_sources {
        names.push(format!("m[{i}]"));
    }
    names.push("omega".to_string());
    match kind {
        PriorKind::Uniform => {}
        PriorKind::DirichletDirichlet => {
            names.push("rho".to_string());
            for i in 1..=n_sources {
                names.push(format!("phi[{i}]"));
            }
            for r in 0..=n_covariates {
                names.push(format!("alpha[{r}]"));
            }
        }
        PriorKind::DirichletLognormal => {
            names.push("tau".to_string());
            for i in 1..=n_sources {
                names.push(format!("psi[{i}]"));
            }
            for r in 0..=n_covariates {
                names.push(format!("alpha[{r}]"));
            }
        }
    }
    for (l, &a) in alleles_per_locus.iter().enumerate() {
        for i in 1..=n_sources {
            for j in 1..=a {
                names.push(format!("p[{},{i},{j}]", l + 1));
            }
        }
    }
    names
}

impl<S: Scalar> ModelState<S> {
    /// Values in the order of [`param_names`].
    pub fn flatten(&self) -> Vec<S> {
        let mut out = Vec::new();
        out.extend_from_slice(self.mix.as_slice());
        out.push(self.assortative.value());
        match &self.prior_block {
            PriorBlock::Uniform => {}
            PriorBlock::DirichletDirichlet(h) => {
                out.push(h.rho);
                out.extend_from_slice(h.phi.as_slice());
                out.extend(h.alpha.to_vec());
            }
            PriorBlock::DirichletLognormal(h) => {
                out.push(h.tau);
                out.extend_from_slice(&h.psi);
                out.extend(h.alpha.to_vec());
            }
        }
        for l in 0..self.freqs.n_loci() {
            for i in 0..self.freqs.n_sources() {
                out.extend_from_slice(self.freqs.row(l, i));
            }
        }
        out
    }

    /// Rebuild a state from a flat vector in the order of [`param_names`].
    /// Values pass through the validating constructors, so a corrupt vector
    /// is rejected rather than silently accepted.
    pub fn from_flat(
        n_sources: usize,
        alleles_per_locus: &[usize],
        kind: PriorKind,
        n_covariates: usize,
        values: &[S],
    ) -> Result<Self> {
        let expected = param_names(n_sources, alleles_per_locus, kind, n_covariates).len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "flat state has {} values, layout expects {expected}",
                values.len()
            )));
        }
        let mut pos = 0usize;
        let mut take = |n: usize| {
            let slice = &values[pos..pos + n];
            pos += n;
            slice
        };

        let mix = MixtureProportions::new(take(n_sources).to_vec())?;
        let assortative = AssortativeCoefficient::new(take(1)[0])?;
        let prior_block = match kind {
            PriorKind::Uniform => PriorBlock::Uniform,
            PriorKind::DirichletDirichlet => {
                let rho = take(1)[0];
                let phi = MixtureProportions::new(take(n_sources).to_vec())?;
                let alpha = RegressionCoefficients::from_vec(take(n_covariates + 1))?;
                PriorBlock::DirichletDirichlet(DirichletDirichletHyper::new(rho, phi, alpha)?)
            }
            PriorKind::DirichletLognormal => {
                let tau = take(1)[0];
                let psi = take(n_sources).to_vec();
                let alpha = RegressionCoefficients::from_vec(take(n_covariates + 1))?;
                PriorBlock::DirichletLognormal(DirichletLognormalHyper::new(psi, tau, alpha)?)
            }
        };
        let mut rows = Vec::with_capacity(alleles_per_locus.len());
        for &a in alleles_per_locus {
            let mut per_locus = Vec::with_capacity(n_sources);
            for _ in 0..n_sources {
                per_locus.push(take(a).to_vec());
            }
            rows.push(per_locus);
        }
        let freqs = AlleleFrequencies::new(rows)?;
        Ok(ModelState {
            freqs,
            mix,
            assortative,
            prior_block,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genetics::Genotype;
    use approx::assert_relative_eq;

    fn tiny_data() -> ModelData<f64> {
        let colony = GenotypeTable::new(
            vec![
                Genotype::new(vec![Some((0, 1))]),
                Genotype::new(vec![Some((1, 1))]),
            ],
            vec![2],
        )
        .unwrap();
        let counts = AlleleCountTable::new(vec![vec![vec![7, 3]], vec![vec![2, 8]]]).unwrap();
        let covariates = CovariateMatrix::new(vec!["x".into()], vec![vec![-1.0, 1.0]]).unwrap();
        ModelData::new(colony, counts, Some(covariates)).unwrap()
    }

    fn uniform_state(m: Vec<f64>) -> ModelState<f64> {
        ModelState {
            freqs: AlleleFrequencies::new(vec![vec![vec![0.6, 0.4], vec![0.3, 0.7]]]).unwrap(),
            mix: MixtureProportions::new(m).unwrap(),
            assortative: AssortativeCoefficient::new(0.2).unwrap(),
            prior_block: PriorBlock::Uniform,
        }
    }

    #[test]
    fn joint_decomposes_into_named_terms() {
        let data = tiny_data();
        let state = uniform_state(vec![0.5, 0.5]);
        let joint = joint_log_posterior(&state, &data, &PriorSpec::uniform()).unwrap();
        let colony =
            colony_loglik(data.colony(), &state.assortative, &state.freqs, &state.mix).unwrap();
        let source = source_loglik(data.source_counts(), &state.freqs).unwrap();
        // Flat priors: ln Γ(2) per frequency row (both zero here since
        // A = 2 ⇒ ln Γ(2) = 0) and ln Γ(2) = 0 for m; ω uniform adds 0.
        assert_relative_eq!(joint, colony + source, epsilon = 1e-12);
    }

    #[test]
    fn joint_differences_track_the_likelihood_under_flat_priors() {
        let data = tiny_data();
        let a = uniform_state(vec![0.5, 0.5]);
        let b = uniform_state(vec![0.8, 0.2]);
        let spec = PriorSpec::uniform();
        let d_joint = joint_log_posterior(&b, &data, &spec).unwrap()
            - joint_log_posterior(&a, &data, &spec).unwrap();
        let d_colony =
            colony_loglik(data.colony(), &b.assortative, &b.freqs, &b.mix).unwrap()
                - colony_loglik(data.colony(), &a.assortative, &a.freqs, &a.mix).unwrap();
        assert_relative_eq!(d_joint, d_colony, epsilon = 1e-12);
    }

    #[test]
    fn joint_includes_dirdir_prior_terms() {
        let data = tiny_data();
        let phi = MixtureProportions::new(vec![0.4, 0.6]).unwrap();
        let alpha = RegressionCoefficients::new(0.1, vec![0.3]);
        let state = ModelState {
            prior_block: PriorBlock::DirichletDirichlet(
                DirichletDirichletHyper::new(0.3, phi.clone(), alpha.clone()).unwrap(),
            ),
            ..uniform_state(vec![0.5, 0.5])
        };
        let spec = PriorSpec::dirichlet_dirichlet();
        let joint = joint_log_posterior(&state, &data, &spec).unwrap();

        let g = data.covariates().unwrap();
        let eta = eta_from_covariates(&alpha, g).unwrap();
        let expected = data_loglik(&state, &data).unwrap()
            + log_prior_m_dirdir(&state.mix, 0.3, &phi).unwrap()
            + log_prior_phi(&phi, &eta).unwrap()
            + log_prior_scalars(0.2, ScalarHyper::Rho(0.3), Some((&alpha, 10.0)));
        assert_relative_eq!(joint, expected, epsilon = 1e-12);
    }

    #[test]
    fn joint_rejects_mismatched_prior_blocks() {
        let data = tiny_data();
        let state = uniform_state(vec![0.5, 0.5]);
        assert!(matches!(
            joint_log_posterior(&state, &data, &PriorSpec::dirichlet_dirichlet()),
            Err(Error::ModelSetup(_))
        ));
    }

    #[test]
    fn covariate_priors_require_covariates() {
        let colony = GenotypeTable::new(vec![], vec![2]).unwrap();
        let counts = AlleleCountTable::new(vec![vec![vec![1, 1]], vec![vec![1, 1]]]).unwrap();
        let data = ModelData::new(colony, counts, None).unwrap();
        let state = ModelState {
            prior_block: PriorBlock::DirichletDirichlet(
                DirichletDirichletHyper::new(
                    0.5,
                    MixtureProportions::new(vec![0.5, 0.5]).unwrap(),
                    RegressionCoefficients::zeros(0),
                )
                .unwrap(),
            ),
            ..uniform_state(vec![0.5, 0.5])
        };
        assert!(matches!(
            joint_log_posterior(&state, &data, &PriorSpec::dirichlet_dirichlet()),
            Err(Error::ModelSetup(_))
        ));
    }

    #[test]
    fn empty_colony_drops_the_colony_term() {
        let colony = GenotypeTable::new(vec![], vec![2]).unwrap();
        let counts = AlleleCountTable::new(vec![vec![vec![7, 3]], vec![vec![2, 8]]]).unwrap();
        let data = ModelData::new(colony, counts, None).unwrap();
        let state = uniform_state(vec![0.5, 0.5]);
        let joint = joint_log_posterior(&state, &data, &PriorSpec::uniform()).unwrap();
        let source = source_loglik(data.source_counts(), &state.freqs).unwrap();
        assert_relative_eq!(joint, source, epsilon = 1e-12);
    }

    #[test]
    fn param_names_follow_the_documented_layout() {
        let names = param_names(2, &[2, 3], PriorKind::DirichletDirichlet, 2);
        assert_eq!(names[0], "m[1]");
        assert_eq!(names[2], "omega");
        assert_eq!(names[3], "rho");
        assert_eq!(names[4], "phi[1]");
        assert_eq!(names[6], "alpha[0]");
        assert_eq!(names[9], "p[1,1,1]");
        assert_eq!(*names.last().unwrap(), "p[2,2,3]");
        // m(2) + omega + rho + phi(2) + alpha(3) + p(2*2 + 2*3).
        assert_eq!(names.len(), 2 + 1 + 1 + 2 + 3 + 10);
    }

    #[test]
    fn flatten_round_trips_through_from_flat() {
        let phi = MixtureProportions::new(vec![0.4, 0.6]).unwrap();
        let alpha = RegressionCoefficients::new(0.1, vec![0.3]);
        for state in [
            uniform_state(vec![0.25, 0.75]),
            ModelState {
                prior_block: PriorBlock::DirichletDirichlet(
                    DirichletDirichletHyper::new(0.3, phi.clone(), alpha.clone()).unwrap(),
                ),
                ..uniform_state(vec![0.25, 0.75])
            },
            ModelState {
                prior_block: PriorBlock::DirichletLognormal(
                    DirichletLognormalHyper::new(vec![1.5, 0.7], 2.0, alpha.clone()).unwrap(),
                ),
                ..uniform_state(vec![0.25, 0.75])
            },
        ] {
            let flat = state.flatten();
            let names = param_names(2, &[2], state.prior_block.kind(), 1);
            assert_eq!(flat.len(), names.len());
            let back =
                ModelState::from_flat(2, &[2], state.prior_block.kind(), 1, &flat).unwrap();
            assert_eq!(back, state);
        }
    }
}
