//! Priors on the mixture proportions, with optional source-level covariates.
//!
//! Three prior families are supported for the mixture vector `m`:
//!
//! * **Uniform** — a flat Dirichlet(1, …, 1); no covariates involved.
//! * **Dirichlet–Dirichlet** — `m ~ Dirichlet(c φ)` with `c = (1 - ρ)/ρ`,
//!   and `φ ~ Dirichlet(η)` where `log η_i` is a linear regression on the
//!   source covariates. Under this parameterization `E[m_i] = φ_i` and
//!   `Var(m_i) = ρ φ_i (1 - φ_i)`, so `ρ` reads directly as a dispersion:
//!   `ρ → 0` pins `m` at `φ`, `ρ → 1` is maximally diffuse.
//! * **Dirichlet–lognormal** — `m ~ Dirichlet(ψ)` with independent
//!   `log ψ_i ~ Normal(μ_i, 1/τ)`, `μ_i` again a linear regression on the
//!   covariates. Both scale and composition of `ψ` are free, which makes
//!   this family more weakly identified than the Dirichlet–Dirichlet one.
//!
//! In both regression families the coefficient vector `α` (intercept plus
//! one slope per covariate) gets independent Normal(0, σ²) priors, and the
//! softmax identity `E[m_i | α] ≈ exp(α·G_i) / Σ_k exp(α·G_k)` links fitted
//! coefficients back to expected mixture shares.

use rand::Rng;

use crate::error::{Error, Result};
use crate::genetics::MixtureProportions;
use crate::numeric::{dirichlet_logpdf, floor_simplex, gamma_logpdf, normal_logpdf, softmax};
use crate::scalar::Scalar;

/// The largest magnitude allowed for `log η`; beyond this `exp` would
/// overflow `f64` and the regression is declared out of range.
const MAX_LOG_ETA: f64 = 700.0;

/// Per-source covariates, held both raw and standardized.
///
/// All regression structure operates on the standardized values (each
/// covariate centered to mean 0 and scaled to sample standard deviation 1,
/// `n - 1` convention), so coefficient scales are comparable across
/// covariates regardless of the units supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateMatrix<S> {
    names: Vec<String>,
    /// Indexed `[covariate][source]`.
    raw: Vec<Vec<S>>,
    standardized: Vec<Vec<S>>,
}

impl<S: Scalar> CovariateMatrix<S> {
    /// Build from raw values indexed `[covariate][source]`.
    ///
    /// Needs at least one covariate and two sources, and every covariate
    /// must actually vary across sources (a constant column cannot be
    /// standardized and carries no information anyway).
    pub fn new(names: Vec<String>, raw: Vec<Vec<S>>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput("no covariates supplied".into()));
        }
        if names.len() != raw.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate names for {} covariate rows",
                names.len(),
                raw.len()
            )));
        }
        let n_sources = raw[0].len();
        if n_sources < 2 {
            return Err(Error::InvalidValue(
                "covariates need at least two sources".into(),
            ));
        }
        let mut standardized = Vec::with_capacity(raw.len());
        for (r, row) in raw.iter().enumerate() {
            if row.len() != n_sources {
                return Err(Error::DimensionMismatch(format!(
                    "covariate '{}' has {} values, expected {n_sources}",
                    names[r],
                    row.len()
                )));
            }
            let n = S::from_f64(n_sources as f64);
            let mean = row.iter().copied().sum::<S>() / n;
            let ss = row.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>();
            let sd = (ss / (n - S::one())).sqrt();
            if !(sd > S::zero()) {
                return Err(Error::InvalidValue(format!(
                    "covariate '{}' is constant across sources",
                    names[r]
                )));
            }
            standardized.push(row.iter().map(|&x| (x - mean) / sd).collect());
        }
        Ok(CovariateMatrix {
            names,
            raw,
            standardized,
        })
    }

    pub fn n_covariates(&self) -> usize {
        self.raw.len()
    }

    pub fn n_sources(&self) -> usize {
        self.raw[0].len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Raw (as-supplied) value of covariate `r` for source `i`.
    pub fn raw(&self, r: usize, i: usize) -> S {
        self.raw[r][i]
    }

    /// Standardized value of covariate `r` for source `i`.
    pub fn standardized(&self, r: usize, i: usize) -> S {
        self.standardized[r][i]
    }
}

/// Regression coefficients: an intercept plus one slope per covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionCoefficients<S> {
    pub intercept: S,
    pub slopes: Vec<S>,
}

impl<S: Scalar> RegressionCoefficients<S> {
    pub fn new(intercept: S, slopes: Vec<S>) -> Self {
        RegressionCoefficients { intercept, slopes }
    }

    /// All-zero coefficients for `n_covariates` slopes.
    pub fn zeros(n_covariates: usize) -> Self {
        RegressionCoefficients {
            intercept: S::zero(),
            slopes: vec![S::zero(); n_covariates],
        }
    }

    pub fn n_slopes(&self) -> usize {
        self.slopes.len()
    }

    /// Coefficients as a flat vector, intercept first.
    pub fn to_vec(&self) -> Vec<S> {
        let mut v = Vec::with_capacity(1 + self.slopes.len());
        v.push(self.intercept);
        v.extend_from_slice(&self.slopes);
        v
    }

    /// Inverse of [`Self::to_vec`].
    pub fn from_vec(values: &[S]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput(
                "regression coefficients need at least an intercept".into(),
            ));
        }
        Ok(RegressionCoefficients {
            intercept: values[0],
            slopes: values[1..].to_vec(),
        })
    }
}

/// The per-source linear predictor `α_0 + Σ_r α_r G_{r,i}` on standardized
/// covariates.
pub fn linear_predictor<S: Scalar>(
    alpha: &RegressionCoefficients<S>,
    covariates: &CovariateMatrix<S>,
) -> Result<Vec<S>> {
    if alpha.n_slopes() != covariates.n_covariates() {
        return Err(Error::DimensionMismatch(format!(
            "{} slopes for {} covariates",
            alpha.n_slopes(),
            covariates.n_covariates()
        )));
    }
    let mut out = Vec::with_capacity(covariates.n_sources());
    for i in 0..covariates.n_sources() {
        let mut lp = alpha.intercept;
        for (r, &slope) in alpha.slopes.iter().enumerate() {
            lp += slope * covariates.standardized(r, i);
        }
        out.push(lp);
    }
    Ok(out)
}

/// Dirichlet concentrations `η_i = exp(α_0 + Σ_r α_r G_{r,i})` for the
/// Dirichlet–Dirichlet hyper-prior on `φ`.
///
/// Errors if any `|log η_i|` exceeds 700, where `exp` leaves `f64` range.
pub fn eta_from_covariates<S: Scalar>(
    alpha: &RegressionCoefficients<S>,
    covariates: &CovariateMatrix<S>,
) -> Result<Vec<S>> {
    let lp = linear_predictor(alpha, covariates)?;
    let cap = S::from_f64(MAX_LOG_ETA);
    for &x in &lp {
        if x.abs() > cap {
            return Err(Error::InvalidValue(format!(
                "log concentration {x} out of range (|log η| must stay below {MAX_LOG_ETA})"
            )));
        }
    }
    Ok(lp.into_iter().map(|x| x.exp()).collect())
}

/// Expected mixture proportions implied by regression coefficients:
/// `softmax(α·G)` over sources. Invariant to the intercept.
///
/// The result is always a valid open-simplex mixture: components that
/// underflow under extreme coefficients are floored at `1e-12`.
pub fn expected_m_given_alpha<S: Scalar>(
    alpha: &RegressionCoefficients<S>,
    covariates: &CovariateMatrix<S>,
) -> Result<MixtureProportions<S>> {
    let lp = linear_predictor(alpha, covariates)?;
    MixtureProportions::new(floor_simplex(softmax(&lp), S::from_f64(1e-12)))
}

/// Log-density of `m ~ Dirichlet(((1 - ρ)/ρ) φ)`.
///
/// `ρ` must lie strictly inside (0, 1); `m` on the simplex boundary gives
/// `-inf`.
pub fn log_prior_m_dirdir<S: Scalar>(
    m: &MixtureProportions<S>,
    rho: S,
    phi: &MixtureProportions<S>,
) -> Result<S> {
    if !(rho > S::zero() && rho < S::one()) {
        return Err(Error::InvalidValue(format!(
            "dispersion ρ must lie strictly inside (0, 1), got {rho}"
        )));
    }
    if m.len() != phi.len() {
        return Err(Error::DimensionMismatch(format!(
            "mixture has {} sources, φ has {}",
            m.len(),
            phi.len()
        )));
    }
    let c = (S::one() - rho) / rho;
    let params: Vec<S> = phi.as_slice().iter().map(|&p| c * p).collect();
    if params.iter().any(|&a| !(a > S::zero())) {
        return Err(Error::InvalidValue(
            "Dirichlet concentration must be strictly positive".into(),
        ));
    }
    Ok(dirichlet_logpdf(m.as_slice(), &params))
}

/// Log-density of `φ ~ Dirichlet(η)`. Boundary `φ` gives `-inf`; `η` must be
/// strictly positive.
pub fn log_prior_phi<S: Scalar>(phi: &MixtureProportions<S>, eta: &[S]) -> Result<S> {
    if phi.len() != eta.len() {
        return Err(Error::DimensionMismatch(format!(
            "φ has {} sources, η has {}",
            phi.len(),
            eta.len()
        )));
    }
    if eta.iter().any(|&e| !(e > S::zero())) {
        return Err(Error::InvalidValue(
            "Dirichlet concentration must be strictly positive".into(),
        ));
    }
    Ok(dirichlet_logpdf(phi.as_slice(), eta))
}

/// Log-density of `m ~ Dirichlet(ψ)` for the Dirichlet–lognormal family.
pub fn log_prior_m_dirlognormal<S: Scalar>(m: &MixtureProportions<S>, psi: &[S]) -> Result<S> {
    if m.len() != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "mixture has {} sources, ψ has {}",
            m.len(),
            psi.len()
        )));
    }
    if psi.iter().any(|&p| !(p > S::zero())) {
        return Err(Error::InvalidValue(
            "Dirichlet concentration must be strictly positive".into(),
        ));
    }
    Ok(dirichlet_logpdf(m.as_slice(), psi))
}

/// Log-density of independent `log ψ_i ~ Normal(μ_i, 1/τ)` — i.e. the
/// lognormal density of `ψ` itself, Jacobian included. `μ` is the covariate
/// regression `α·G`. `ψ` outside the positive orthant gives `-inf`.
pub fn log_prior_psi<S: Scalar>(
    psi: &[S],
    alpha: &RegressionCoefficients<S>,
    tau: S,
    covariates: &CovariateMatrix<S>,
) -> Result<S> {
    if !(tau > S::zero()) {
        return Err(Error::InvalidValue(format!(
            "precision τ must be positive, got {tau}"
        )));
    }
    let mu = linear_predictor(alpha, covariates)?;
    if psi.len() != mu.len() {
        return Err(Error::DimensionMismatch(format!(
            "ψ has {} components, covariates describe {} sources",
            psi.len(),
            mu.len()
        )));
    }
    let variance = S::one() / tau;
    let mut acc = S::zero();
    for (&p, &m) in psi.iter().zip(&mu) {
        if !(p > S::zero()) {
            return Ok(S::neg_infinity());
        }
        let lp = p.ln();
        acc += normal_logpdf(lp, m, variance) - lp;
    }
    Ok(acc)
}

/// The scalar hyper-parameter accompanying each prior family.
#[derive(Debug, Clone, Copy)]
pub enum ScalarHyper<S> {
    /// Uniform prior: no scalar hyper-parameter.
    None,
    /// Dirichlet–Dirichlet dispersion, uniform on (0, 1).
    Rho(S),
    /// Dirichlet–lognormal precision with its Gamma(shape, rate) prior.
    Tau { value: S, shape: S, rate: S },
}

/// Joint log-density of the scalar-ish prior components: the assortative
/// weight `ω` (uniform on (0, 1)), the family's scalar hyper-parameter, and
/// the regression coefficients (independent Normal(0, `alpha_variance`)).
///
/// Uniform components contribute 0 on their support; anything outside its
/// support makes the result `-inf`.
pub fn log_prior_scalars<S: Scalar>(
    omega: S,
    hyper: ScalarHyper<S>,
    alpha: Option<(&RegressionCoefficients<S>, S)>,
) -> S {
    let mut acc = S::zero();
    if !(omega > S::zero() && omega < S::one()) {
        return S::neg_infinity();
    }
    match hyper {
        ScalarHyper::None => {}
        ScalarHyper::Rho(rho) => {
            if !(rho > S::zero() && rho < S::one()) {
                return S::neg_infinity();
            }
        }
        ScalarHyper::Tau { value, shape, rate } => {
            if !(value > S::zero()) {
                return S::neg_infinity();
            }
            acc += gamma_logpdf(value, shape, rate);
        }
    }
    if let Some((coeffs, variance)) = alpha {
        acc += normal_logpdf(coeffs.intercept, S::zero(), variance);
        for &a in &coeffs.slopes {
            acc += normal_logpdf(a, S::zero(), variance);
        }
    }
    acc
}

/// Which prior family a fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Uniform,
    DirichletDirichlet,
    DirichletLognormal,
}

impl PriorKind {
    /// Stable identifier used in CLI flags and chain metadata.
    pub fn name(&self) -> &'static str {
        match self {
            PriorKind::Uniform => "uniform",
            PriorKind::DirichletDirichlet => "dirichlet-dirichlet",
            PriorKind::DirichletLognormal => "dirichlet-lognormal",
        }
    }
}

impl std::fmt::Display for PriorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A prior family together with its fixed hyper-constants.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec<S> {
    pub kind: PriorKind,
    /// Variance of the Normal(0, ·) prior on each regression coefficient.
    pub alpha_variance: S,
    /// Shape of the Gamma prior on the lognormal precision τ.
    pub tau_shape: S,
    /// Rate of the Gamma prior on τ.
    pub tau_rate: S,
}

impl<S: Scalar> PriorSpec<S> {
    fn with_kind(kind: PriorKind) -> Self {
        PriorSpec {
            kind,
            alpha_variance: S::from_f64(10.0),
            tau_shape: S::one(),
            tau_rate: S::one(),
        }
    }

    pub fn uniform() -> Self {
        Self::with_kind(PriorKind::Uniform)
    }

    pub fn dirichlet_dirichlet() -> Self {
        Self::with_kind(PriorKind::DirichletDirichlet)
    }

    pub fn dirichlet_lognormal() -> Self {
        Self::with_kind(PriorKind::DirichletLognormal)
    }

    pub fn of_kind(kind: PriorKind) -> Self {
        Self::with_kind(kind)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_variance > S::zero()) {
            return Err(Error::InvalidValue(format!(
                "coefficient prior variance must be positive, got {}",
                self.alpha_variance
            )));
        }
        if !(self.tau_shape > S::zero()) || !(self.tau_rate > S::zero()) {
            return Err(Error::InvalidValue(format!(
                "τ prior needs positive shape and rate, got shape {} rate {}",
                self.tau_shape, self.tau_rate
            )));
        }
        Ok(())
    }
}

/// Hyper-parameters of the Dirichlet–Dirichlet family.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletDirichletHyper<S> {
    pub rho: S,
    pub phi: MixtureProportions<S>,
    pub alpha: RegressionCoefficients<S>,
}

impl<S: Scalar> DirichletDirichletHyper<S> {
    pub fn new(rho: S, phi: MixtureProportions<S>, alpha: RegressionCoefficients<S>) -> Result<Self> {
        if !(rho > S::zero() && rho < S::one()) {
            return Err(Error::InvalidValue(format!(
                "dispersion ρ must lie strictly inside (0, 1), got {rho}"
            )));
        }
        Ok(DirichletDirichletHyper { rho, phi, alpha })
    }
}

/// Hyper-parameters of the Dirichlet–lognormal family.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletLognormalHyper<S> {
    pub psi: Vec<S>,
    pub tau: S,
    pub alpha: RegressionCoefficients<S>,
}

impl<S: Scalar> DirichletLognormalHyper<S> {
    pub fn new(psi: Vec<S>, tau: S, alpha: RegressionCoefficients<S>) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::EmptyInput("ψ must have at least one component".into()));
        }
        if psi.iter().any(|&p| !(p > S::zero())) {
            return Err(Error::InvalidValue(
                "ψ components must be strictly positive".into(),
            ));
        }
        if !(tau > S::zero()) {
            return Err(Error::InvalidValue(format!(
                "precision τ must be positive, got {tau}"
            )));
        }
        Ok(DirichletLognormalHyper { psi, tau, alpha })
    }
}

/// One draw from Dirichlet(params) via normalized Gamma(shape, 1) draws.
///
/// To keep results inside the open simplex even for very small
/// concentrations (whose Gamma draws can underflow to exact zero in
/// floating point), components are floored at `1e-12` and renormalized;
/// the distortion is far below Monte Carlo resolution.
pub fn sample_dirichlet<S: Scalar, R: Rng + ?Sized>(params: &[S], rng: &mut R) -> Vec<S> {
    let floor = S::from_f64(1e-12);
    let mut draws: Vec<S> = params
        .iter()
        .map(|&a| S::standard_gamma(a, rng))
        .collect();
    let total: S = draws.iter().copied().sum();
    if params.len() == 1 {
        return vec![S::one()];
    }
    for d in &mut draws {
        *d = (*d / total).max(floor);
    }
    let total: S = draws.iter().copied().sum();
    for d in &mut draws {
        *d /= total;
    }
    draws
}
