//! Bayesian mixed-stock analysis for colonies of mixed origin.
//!
//! A mixed colony is a collection of individuals drawn from several source
//! populations in unknown proportions. Given multilocus genotypes for the
//! colony, allele counts sampled from each candidate source, and (optionally)
//! per-source covariates, this crate estimates the mixture proportions, the
//! degree of assortative (within-source) mating, and the source allele
//! frequencies in one joint hierarchical model fitted by
//! Metropolis-within-Gibbs MCMC.
//!
//! The pieces:
//!
//! * [`genetics`] — data containers and the genotype/count likelihoods;
//! * [`priors`] — covariate-informed priors on the mixture proportions
//!   (Dirichlet–Dirichlet and Dirichlet–lognormal regression structures);
//! * [`model`] — the joint state and log-posterior;
//! * [`sampler`] — logit-space Metropolis–Hastings updates and the full chain
//!   driver;
//! * [`simulator`] — synthetic-data generation and a replicated simulation
//!   study harness;
//! * [`diagnostics`] — posterior summaries (means, HPD intervals, RMSE),
//!   model scores (DIC, LPML), and convergence checks.
//!
//! Numerical code is generic over the floating-point scalar through the
//! [`scalar::Scalar`] trait; the crate root re-exports `f64` aliases
//! ([`Real`] and friends) which are what most callers want.

pub mod diagnostics;
pub mod error;
pub mod genetics;
pub mod model;
pub mod numeric;
pub mod priors;
pub mod sampler;
pub mod scalar;
pub mod seeding;
pub mod simulator;

pub use error::{Error, Result};

/// Default scalar type for everything in this crate.
pub type Real = f64;

/// [`genetics::AlleleFrequencies`] at the default scalar.
pub type AlleleFrequencies = genetics::AlleleFrequencies<Real>;
/// [`genetics::MixtureProportions`] at the default scalar.
pub type MixtureProportions = genetics::MixtureProportions<Real>;
/// [`genetics::AssortativeCoefficient`] at the default scalar.
pub type AssortativeCoefficient = genetics::AssortativeCoefficient<Real>;
/// [`priors::CovariateMatrix`] at the default scalar.
pub type CovariateMatrix = priors::CovariateMatrix<Real>;
/// [`priors::RegressionCoefficients`] at the default scalar.
pub type RegressionCoefficients = priors::RegressionCoefficients<Real>;
/// [`priors::PriorSpec`] at the default scalar.
pub type PriorSpec = priors::PriorSpec<Real>;
/// [`model::ModelState`] at the default scalar.
pub type ModelState = model::ModelState<Real>;
/// [`model::ModelData`] at the default scalar.
pub type ModelData = model::ModelData<Real>;
/// [`sampler::ChainConfig`] at the default scalar.
pub type ChainConfig = sampler::ChainConfig<Real>;
/// [`sampler::ChainOutput`] at the default scalar.
pub type ChainOutput = sampler::ChainOutput<Real>;
/// [`simulator::SimulationConfig`] at the default scalar.
pub type SimulationConfig = simulator::SimulationConfig<Real>;
/// [`simulator::SimulatedDataset`] at the default scalar.
pub type SimulatedDataset = simulator::SimulatedDataset<Real>;
/// [`diagnostics::PosteriorSummary`] at the default scalar.
pub type PosteriorSummary = diagnostics::PosteriorSummary<Real>;
