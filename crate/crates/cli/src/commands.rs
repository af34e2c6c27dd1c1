//! The four subcommands: simulate, fit, summarize, compare.
//!
//! Each prints a human-readable table (or progress lines) to stdout and
//! optionally writes a full-precision TSV next to it. All randomness
//! flows from the single `--seed` value, so a rerun with the same inputs
//! reproduces every output file byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mixstock_core::diagnostics::{model_score, summarize};
use mixstock_core::priors::PriorKind;
use mixstock_core::sampler::run_chain;
use mixstock_core::seeding::derive_seed;
use mixstock_core::simulator::simulate;
use mixstock_core::{ChainOutput, ModelData, PosteriorSummary};

use crate::config::{resolve_fit, scenario_by_name, RunConfig};
use crate::formats::{
    load_bundle, read_chain, read_truth, simulated_labels, write_bundle, write_chain,
};
use crate::CliError;

/// Credible level for every reported HPD interval.
const HPD_LEVEL: f64 = 0.95;

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Render rows as fixed-width columns: first column left-aligned, the
/// rest right-aligned.
fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let n_cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    let mut emit = |cells: &[String]| {
        for (c, cell) in cells.iter().enumerate() {
            if c > 0 {
                out.push_str("  ");
            }
            if c == 0 {
                let _ = write!(out, "{cell:<width$}", width = widths[c]);
            } else {
                let _ = write!(out, "{cell:>width$}", width = widths[c]);
            }
        }
        // Trailing spaces from the last pad are noise; trim them.
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };
    emit(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    for row in rows {
        emit(row);
    }
    let _ = n_cols;
    out
}

fn show(value: f64) -> String {
    format!("{value:.4}")
}

fn show_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), show)
}

/// Write a TSV table (full-precision cells) to `path`.
fn write_tsv(path: &Path, headers: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut text = headers.join("\t");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join("\t"));
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// `simulate`: draw one dataset (or several replicate datasets) from a
/// named scenario and write each as a data bundle with a truth sidecar.
pub fn cmd_simulate(
    config_path: Option<&Path>,
    scenario: Option<&str>,
    seed: Option<u64>,
    replicates: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = RunConfig::load(config_path)?;
    let scenario_name = scenario
        .map(str::to_string)
        .or_else(|| file.scenario.clone())
        .ok_or_else(|| CliError::Usage("no scenario given (use --scenario)".into()))?;
    let scenario = scenario_by_name(&scenario_name)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let replicates = replicates.or(file.replicates).unwrap_or(1);
    if replicates == 0 {
        return Err(CliError::Usage("replicates must be at least 1".into()));
    }
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| file.out.clone())
        .ok_or_else(|| CliError::Usage("no output directory given (use --out)".into()))?;

    for r in 0..replicates {
        // One replicate inherits the seed directly; several get distinct
        // per-replicate streams derived from it.
        let replicate_seed = if replicates == 1 {
            seed
        } else {
            derive_seed(seed, r as u64)
        };
        let config = scenario.config::<f64>(replicate_seed);
        let dataset = simulate(&config).map_err(runtime)?;
        let labels = simulated_labels(
            config.n_sources,
            dataset.source_counts.alleles_per_locus(),
            dataset.colony.len(),
        );
        let data = dataset.model_data().map_err(runtime)?;
        let dir = if replicates == 1 {
            out.clone()
        } else {
            out.join(format!("replicate-{:02}", r + 1))
        };
        write_bundle(&dir, &data, &labels, Some(&dataset.truth_map()))?;
        println!(
            "wrote {} ({} scenario, seed {replicate_seed})",
            dir.display(),
            scenario.name()
        );
    }
    Ok(())
}

/// `fit`: run one MCMC chain on a data bundle and write the chain
/// artifact into the output directory.
pub fn cmd_fit(
    data_dir: &Path,
    config_path: Option<&Path>,
    prior: Option<&str>,
    iterations: Option<usize>,
    burnin: Option<usize>,
    thin: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = RunConfig::load(config_path)?;
    let settings = resolve_fit(&file, prior, iterations, burnin, thin, seed)?;
    let out = out
        .map(Path::to_path_buf)
        .or_else(|| file.out.clone())
        .ok_or_else(|| CliError::Usage("no output directory given (use --out)".into()))?;
    let bundle = load_bundle(data_dir)?;
    if settings.prior.kind != PriorKind::Uniform && bundle.data.covariates().is_none() {
        return Err(CliError::Usage(format!(
            "the {} prior needs per-source covariates, but {} has no {}",
            settings.prior_name,
            data_dir.display(),
            crate::formats::COVARIATES_FILE
        )));
    }
    let chain = run_chain(&bundle.data, &settings.prior, &settings.chain).map_err(runtime)?;
    write_chain(&out, &chain, &bundle.sha256)?;
    println!(
        "fitted {} prior: {} draws ({} iterations, burn-in {}, thin {}, seed {})",
        settings.prior_name,
        chain.n_draws(),
        chain.iterations,
        chain.burnin,
        chain.thin,
        chain.seed
    );
    println!("wrote {}", out.display());
    Ok(())
}

/// Shared loader: read each run directory into a chain plus its recorded
/// data hash.
fn load_runs(runs: &[PathBuf]) -> Result<Vec<(ChainOutput, String)>, CliError> {
    runs.iter().map(|dir| read_chain(dir)).collect()
}

fn summary_for(
    chain: &ChainOutput,
    truth: Option<&BTreeMap<String, f64>>,
    dir: &Path,
) -> Result<PosteriorSummary, CliError> {
    summarize(chain, truth, HPD_LEVEL)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))
}

/// `summarize`: posterior summaries for one run, or replicate-averaged
/// summaries across several runs of the same model.
pub fn cmd_summarize(
    runs: &[PathBuf],
    config_path: Option<&Path>,
    truth_path: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let file = RunConfig::load(config_path)?;
    let truth_path = truth_path.map(Path::to_path_buf).or_else(|| file.truth.clone());
    let out = out.map(Path::to_path_buf).or_else(|| file.out.clone());
    let truth = truth_path.as_deref().map(read_truth).transpose()?;
    let chains = load_runs(runs)?;

    let (headers, rows) = if chains.len() == 1 {
        let (chain, _) = &chains[0];
        let summary = summary_for(chain, truth.as_ref(), &runs[0])?;
        println!(
            "{} prior, {} draws, {:.0}% HPD",
            chain.kind.name(),
            summary.n_draws,
            HPD_LEVEL * 100.0
        );
        let mut headers = vec!["parameter", "mean", "sd", "hpd_lower", "hpd_upper"];
        if truth.is_some() {
            headers.extend(["truth", "rmse"]);
        }
        let rows: Vec<Vec<String>> = summary
            .parameters
            .iter()
            .map(|p| {
                let mut row = vec![
                    p.name.clone(),
                    show(p.mean),
                    show(p.sd),
                    show(p.hpd_lower),
                    show(p.hpd_upper),
                ];
                if truth.is_some() {
                    row.push(show_opt(p.truth));
                    row.push(show_opt(p.rmse));
                }
                row
            })
            .collect();
        let full: Vec<Vec<String>> = summary
            .parameters
            .iter()
            .map(|p| {
                let mut row = vec![
                    p.name.clone(),
                    p.mean.to_string(),
                    p.sd.to_string(),
                    p.hpd_lower.to_string(),
                    p.hpd_upper.to_string(),
                ];
                if truth.is_some() {
                    row.push(p.truth.map_or_else(|| "-".into(), |v| v.to_string()));
                    row.push(p.rmse.map_or_else(|| "-".into(), |v| v.to_string()));
                }
                row
            })
            .collect();
        if let Some(out) = &out {
            write_tsv(out, &headers, &full)?;
        }
        (headers, rows)
    } else {
        // Replicate average: every run must fit the same model shape.
        let (first, _) = &chains[0];
        for ((chain, _), dir) in chains.iter().zip(runs) {
            if chain.names != first.names || chain.kind != first.kind {
                return Err(CliError::Usage(format!(
                    "{}: parameter set differs from {}; replicate averages need \
                     runs of the same model",
                    dir.display(),
                    runs[0].display()
                )));
            }
        }
        let summaries: Vec<PosteriorSummary> = chains
            .iter()
            .zip(runs)
            .map(|((chain, _), dir)| summary_for(chain, truth.as_ref(), dir))
            .collect::<Result<_, _>>()?;
        println!(
            "{} prior, {} runs averaged, {:.0}% HPD",
            first.kind.name(),
            chains.len(),
            HPD_LEVEL * 100.0
        );
        let n = chains.len() as f64;
        let mut headers = vec!["parameter"];
        if truth.is_some() {
            headers.push("truth");
        }
        headers.extend(["mean", "sd", "hpd_length"]);
        if truth.is_some() {
            headers.push("rmse");
        }
        let mut rows = Vec::new();
        let mut full = Vec::new();
        for (idx, name) in first.names.iter().enumerate() {
            let stat = |f: &dyn Fn(&PosteriorSummary) -> f64| {
                summaries.iter().map(f).sum::<f64>() / n
            };
            let mean = stat(&|s| s.parameters[idx].mean);
            let sd = stat(&|s| s.parameters[idx].sd);
            let hpd_length = stat(&|s| s.parameters[idx].hpd_length());
            let truth_value = summaries[0].parameters[idx].truth;
            let rmse = if summaries.iter().all(|s| s.parameters[idx].rmse.is_some()) {
                Some(stat(&|s| s.parameters[idx].rmse.unwrap()))
            } else {
                None
            };
            let mut row = vec![name.clone()];
            let mut full_row = vec![name.clone()];
            if truth.is_some() {
                row.push(show_opt(truth_value));
                full_row.push(truth_value.map_or_else(|| "-".into(), |v| v.to_string()));
            }
            row.extend([show(mean), show(sd), show(hpd_length)]);
            full_row.extend([mean.to_string(), sd.to_string(), hpd_length.to_string()]);
            if truth.is_some() {
                row.push(show_opt(rmse));
                full_row.push(rmse.map_or_else(|| "-".into(), |v| v.to_string()));
            }
            rows.push(row);
            full.push(full_row);
        }
        if let Some(out) = &out {
            write_tsv(out, &headers, &full)?;
        }
        (headers, rows)
    };

    print!("{}", render_table(&headers, &rows));
    Ok(())
}

/// `compare`: score one or more fitted chains against the bundle they
/// were fitted to (DIC and LPML); refuses chains whose recorded data
/// hash does not match the bundle.
pub fn cmd_compare(
    data_dir: &Path,
    runs: &[PathBuf],
    out: Option<&Path>,
) -> Result<(), CliError> {
    let bundle = load_bundle(data_dir)?;
    let chains = load_runs(runs)?;
    for ((_, hash), dir) in chains.iter().zip(runs) {
        if *hash != bundle.sha256 {
            return Err(CliError::Usage(format!(
                "{}: chain was fitted to different data than {} (hash mismatch)",
                dir.display(),
                data_dir.display()
            )));
        }
    }
    let headers = ["run", "prior", "dbar", "pd", "dic", "lpml"];
    let mut rows = Vec::new();
    let mut full = Vec::new();
    for ((chain, _), dir) in chains.iter().zip(runs) {
        let score = score_chain(chain, &bundle.data)?;
        let name = dir.display().to_string();
        let prior = chain.kind.name().to_string();
        rows.push(vec![
            name.clone(),
            prior.clone(),
            show(score.dbar),
            show(score.pd),
            show(score.dic),
            show(score.lpml),
        ]);
        full.push(vec![
            name,
            prior,
            score.dbar.to_string(),
            score.pd.to_string(),
            score.dic.to_string(),
            score.lpml.to_string(),
        ]);
    }
    if let Some(out) = out {
        write_tsv(out, &headers, &full)?;
    }
    print!("{}", render_table(&headers, &rows));
    Ok(())
}

fn score_chain(
    chain: &ChainOutput,
    data: &ModelData,
) -> Result<mixstock_core::diagnostics::ModelScore<f64>, CliError> {
    model_score(chain, data).map_err(runtime)
}
