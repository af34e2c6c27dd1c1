//! `mixstock` — mixed-stock analysis from the command line.
//!
//! Four subcommands cover the whole workflow:
//!
//! * `simulate` writes synthetic data bundles from a named scenario;
//! * `fit` runs the MCMC sampler on a bundle and stores the chain;
//! * `summarize` turns one or more chains into posterior tables;
//! * `compare` scores chains fitted to the same bundle by DIC and LPML.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 for
//! usage and validation problems (bad flags, malformed files, mismatched
//! inputs), 2 for runtime failures (sampler errors, unwritable output).

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use mixstock_cli::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "mixstock",
    version,
    about = "Bayesian mixed-stock analysis: estimate source contributions \
             to a mixed colony from genetic markers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate data bundles from a named study scenario.
    Simulate {
        /// Config file with key=value defaults (flags win).
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Scenario name: paper-1, paper-2, or paper-3.
        #[arg(long)]
        scenario: Option<String>,
        /// Base seed; replicates derive their own streams from it.
        #[arg(long)]
        seed: Option<u64>,
        /// How many replicate datasets to draw (default 1).
        #[arg(long)]
        replicates: Option<usize>,
        /// Output directory (one bundle, or replicate-NN subdirectories).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Fit the model to a data bundle with MCMC.
    Fit {
        /// Data bundle directory (source_counts.tsv, colony.tsv, ...).
        #[arg(value_name = "DATA")]
        data: PathBuf,
        /// Config file with key=value defaults (flags win).
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Prior family: uniform, dirichlet-dirichlet, or
        /// dirichlet-lognormal (default uniform).
        #[arg(long)]
        prior: Option<String>,
        /// Total MCMC sweeps (default 30000).
        #[arg(long)]
        iterations: Option<usize>,
        /// Sweeps to discard before recording (default 5000).
        #[arg(long)]
        burnin: Option<usize>,
        /// Record every thin-th sweep after burn-in (default 5).
        #[arg(long)]
        thin: Option<usize>,
        /// Chain seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Run directory to write (chain.tsv, colony_loglik.tsv, meta.tsv).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Summarize one run, or average summaries across replicate runs.
    Summarize {
        /// Run directories written by fit.
        #[arg(value_name = "RUN", required = true)]
        runs: Vec<PathBuf>,
        /// Config file with key=value defaults (flags win).
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Truth sidecar (parameter/value TSV) for truth and RMSE columns.
        #[arg(long, value_name = "FILE")]
        truth: Option<PathBuf>,
        /// Also write the table as full-precision TSV to this file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Score fitted chains against their data bundle by DIC and LPML.
    Compare {
        /// Data bundle directory the chains were fitted to.
        #[arg(value_name = "DATA")]
        data: PathBuf,
        /// Run directories written by fit.
        #[arg(value_name = "RUN", required = true)]
        runs: Vec<PathBuf>,
        /// Also write the table as full-precision TSV to this file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            scenario,
            seed,
            replicates,
            out,
        } => commands::cmd_simulate(
            config.as_deref(),
            scenario.as_deref(),
            seed,
            replicates,
            out.as_deref(),
        ),
        Command::Fit {
            data,
            config,
            prior,
            iterations,
            burnin,
            thin,
            seed,
            out,
        } => commands::cmd_fit(
            &data,
            config.as_deref(),
            prior.as_deref(),
            iterations,
            burnin,
            thin,
            seed,
            out.as_deref(),
        ),
        Command::Summarize {
            runs,
            config,
            truth,
            out,
        } => commands::cmd_summarize(&runs, config.as_deref(), truth.as_deref(), out.as_deref()),
        Command::Compare { data, runs, out } => {
            commands::cmd_compare(&data, &runs, out.as_deref())
        }
    }
}

fn run() -> i32 {
    // clap exits 2 on bad arguments by default; this tool reserves 2 for
    // runtime failures, so parse errors are remapped to 1 here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            1
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn main() {
    std::process::exit(run());
}
