//! Flat key=value config files and their merge with command-line flags.
//!
//! A config file supplies defaults for the run-control settings; any flag
//! given on the command line wins over the file. Lines are `key = value`
//! (whitespace around `=` optional); blank lines and `#` comments are
//! ignored; unknown or repeated keys are errors so typos fail loudly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mixstock_core::priors::PriorKind;
use mixstock_core::simulator::Scenario;
use mixstock_core::{ChainConfig, PriorSpec};

use crate::CliError;

/// Settings a config file may supply. Every field is optional; the
/// resolved value is flag > file > built-in default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub prior: Option<String>,
    pub iterations: Option<usize>,
    pub burnin: Option<usize>,
    pub thin: Option<usize>,
    pub seed: Option<u64>,
    pub scenario: Option<String>,
    pub replicates: Option<usize>,
    pub out: Option<PathBuf>,
    pub truth: Option<PathBuf>,
}

impl RunConfig {
    /// Parse a config file's text. `origin` names the file in errors.
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut config = RunConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "{}:{}: expected 'key = value', found '{line}'",
                    origin.display(),
                    idx + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(first) = seen.insert(
                match key {
                    "prior" => "prior",
                    "iterations" => "iterations",
                    "burnin" => "burnin",
                    "thin" => "thin",
                    "seed" => "seed",
                    "scenario" => "scenario",
                    "replicates" => "replicates",
                    "out" => "out",
                    "truth" => "truth",
                    other => {
                        return Err(CliError::Usage(format!(
                            "{}:{}: unknown key '{other}'",
                            origin.display(),
                            idx + 1
                        )))
                    }
                },
                idx + 1,
            ) {
                return Err(CliError::Usage(format!(
                    "{}:{}: key '{key}' already set on line {first}",
                    origin.display(),
                    idx + 1
                )));
            }
            let bad = |what: &str| {
                CliError::Usage(format!(
                    "{}:{}: {what} '{value}' is not valid for key '{key}'",
                    origin.display(),
                    idx + 1
                ))
            };
            match key {
                "prior" => config.prior = Some(value.to_string()),
                "iterations" => {
                    config.iterations = Some(value.parse().map_err(|_| bad("count"))?)
                }
                "burnin" => config.burnin = Some(value.parse().map_err(|_| bad("count"))?),
                "thin" => config.thin = Some(value.parse().map_err(|_| bad("count"))?),
                "seed" => config.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "scenario" => config.scenario = Some(value.to_string()),
                "replicates" => {
                    config.replicates = Some(value.parse().map_err(|_| bad("count"))?)
                }
                "out" => config.out = Some(PathBuf::from(value)),
                "truth" => config.truth = Some(PathBuf::from(value)),
                _ => unreachable!("key was just validated"),
            }
        }
        Ok(config)
    }

    /// Load a config file if a path was given; empty defaults otherwise.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                RunConfig::parse(&text, path)
            }
        }
    }
}

/// Look up a prior family by its command-line name.
pub fn prior_by_name(name: &str) -> Result<PriorSpec, CliError> {
    match name {
        "uniform" => Ok(PriorSpec::uniform()),
        "dirichlet-dirichlet" => Ok(PriorSpec::dirichlet_dirichlet()),
        "dirichlet-lognormal" => Ok(PriorSpec::dirichlet_lognormal()),
        other => Err(CliError::Usage(format!(
            "unknown prior '{other}' (expected uniform, dirichlet-dirichlet, \
             or dirichlet-lognormal)"
        ))),
    }
}

/// Look up a simulation scenario by its command-line name.
pub fn scenario_by_name(name: &str) -> Result<Scenario, CliError> {
    Scenario::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Scenario::ALL.iter().map(Scenario::name).collect();
        CliError::Usage(format!(
            "unknown scenario '{name}' (expected one of: {})",
            known.join(", ")
        ))
    })
}

/// Resolved chain settings for `fit`: flag > config file > defaults
/// (30000 iterations, 5000 burn-in, thin 5, seed 0, uniform prior).
#[derive(Debug)]
pub struct FitSettings {
    pub prior_name: String,
    pub prior: PriorSpec,
    pub chain: ChainConfig,
}

pub fn resolve_fit(
    file: &RunConfig,
    prior: Option<&str>,
    iterations: Option<usize>,
    burnin: Option<usize>,
    thin: Option<usize>,
    seed: Option<u64>,
) -> Result<FitSettings, CliError> {
    let defaults = ChainConfig::default();
    let prior_name = prior
        .map(str::to_string)
        .or_else(|| file.prior.clone())
        .unwrap_or_else(|| PriorKind::Uniform.name().to_string());
    let chain = ChainConfig {
        iterations: iterations.or(file.iterations).unwrap_or(defaults.iterations),
        burnin: burnin.or(file.burnin).unwrap_or(defaults.burnin),
        thin: thin.or(file.thin).unwrap_or(defaults.thin),
        seed: seed.or(file.seed).unwrap_or(defaults.seed),
        ..defaults
    };
    chain.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(FitSettings {
        prior: prior_by_name(&prior_name)?,
        prior_name,
        chain,
    })
}
