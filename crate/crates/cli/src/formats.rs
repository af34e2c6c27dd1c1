//! File formats: long-form TSV tables for data bundles, chain artifacts,
//! and ground truth.
//!
//! A *data bundle* is a directory with `source_counts.tsv` (rows
//! `source, locus, allele, count`), `colony.tsv` (rows
//! `individual, locus, allele1, allele2`, missing loci omitted), and an
//! optional `covariates.tsv` (rows `source, covariate, value`). Header
//! lines are mandatory. Labels are arbitrary strings; their first
//! appearance fixes the index order, so files round-trip losslessly.
//!
//! A *run directory* holds one fitted chain: `chain.tsv` (one row per
//! recorded draw), `colony_loglik.tsv` (per-draw per-individual colony
//! log-likelihood terms), and `meta.tsv` (key-value metadata including a
//! hash of the fitted data). All numbers are written in Rust's shortest
//! round-trip notation, so reruns with the same seed are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mixstock_core::genetics::{AlleleCountTable, Genotype, GenotypeTable};
use mixstock_core::model::param_names;
use mixstock_core::priors::PriorKind;
use mixstock_core::{ChainOutput, CovariateMatrix, ModelData};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const COUNTS_FILE: &str = "source_counts.tsv";
pub const COLONY_FILE: &str = "colony.tsv";
pub const COVARIATES_FILE: &str = "covariates.tsv";
pub const TRUTH_FILE: &str = "truth.tsv";
pub const CHAIN_FILE: &str = "chain.tsv";
pub const COLONY_LOGLIK_FILE: &str = "colony_loglik.tsv";
pub const META_FILE: &str = "meta.tsv";

/// A parsed data bundle: the model-ready tables plus the label registry
/// that maps every index back to the names used in the files.
#[derive(Debug, Clone)]
pub struct DataBundle {
    pub data: ModelData,
    pub labels: LabelRegistry,
    /// SHA-256 over the bundle files, for validating later comparisons.
    pub sha256: String,
}

/// String labels behind the numeric indices, in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRegistry {
    pub sources: Vec<String>,
    pub loci: Vec<String>,
    /// Per-locus allele labels.
    pub alleles: Vec<Vec<String>>,
    pub individuals: Vec<String>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Split a TSV file into non-empty rows of fields, checking the header
/// and attaching 1-based line numbers.
fn tsv_rows<'a>(
    path: &Path,
    contents: &'a str,
    header: &[&str],
) -> Result<Vec<(usize, Vec<&'a str>)>, CliError> {
    let mut lines = contents.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| usage(format!("{}: empty file (header line missing)", path.display())))?;
    let expected = header.join("\t");
    if first.trim_end_matches('\r') != expected {
        return Err(usage(format!(
            "{}:1: expected header '{expected}', found '{first}'",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != header.len() {
            return Err(usage(format!(
                "{}:{}: expected {} tab-separated fields, found {}",
                path.display(),
                idx + 1,
                header.len(),
                fields.len()
            )));
        }
        rows.push((idx + 1, fields));
    }
    Ok(rows)
}

/// Index of `label` in `registry`, appending it if new.
fn intern(registry: &mut Vec<String>, label: &str) -> usize {
    match registry.iter().position(|x| x == label) {
        Some(i) => i,
        None => {
            registry.push(label.to_string());
            registry.len() - 1
        }
    }
}

/// Load and validate a data bundle directory.
///
/// Sources, loci, and alleles are indexed by first appearance in the
/// counts file; colony-only alleles are appended to their locus with
/// zero counts in every source (and a warning), because an allele absent
/// from a finite reference sample is rare, not impossible. A colony row
/// naming a locus the reference sample lacks is an error.
pub fn load_bundle(dir: &Path) -> Result<DataBundle, CliError> {
    let counts_path = dir.join(COUNTS_FILE);
    let colony_path = dir.join(COLONY_FILE);
    let covariates_path = dir.join(COVARIATES_FILE);

    let counts_text = read_to_string(&counts_path)?;
    let colony_text = read_to_string(&colony_path)?;
    let covariates_text = if covariates_path.exists() {
        Some(read_to_string(&covariates_path)?)
    } else {
        None
    };

    let mut sources: Vec<String> = Vec::new();
    let mut loci: Vec<String> = Vec::new();
    let mut alleles: Vec<Vec<String>> = Vec::new();
    let mut count_cells: BTreeMap<(usize, usize, usize), u32> = BTreeMap::new();

    for (line, fields) in tsv_rows(&counts_path, &counts_text, &["source", "locus", "allele", "count"])? {
        let s = intern(&mut sources, fields[0]);
        let l = intern(&mut loci, fields[1]);
        if alleles.len() <= l {
            alleles.push(Vec::new());
        }
        let a = intern(&mut alleles[l], fields[2]);
        let count: u32 = fields[3].parse().map_err(|_| {
            usage(format!(
                "{}:{line}: count '{}' is not a non-negative integer",
                counts_path.display(),
                fields[3]
            ))
        })?;
        if count_cells.insert((s, l, a), count).is_some() {
            return Err(usage(format!(
                "{}:{line}: duplicate row for source '{}', locus '{}', allele '{}'",
                counts_path.display(),
                fields[0],
                fields[1],
                fields[2]
            )));
        }
    }
    if sources.is_empty() {
        return Err(usage(format!(
            "{}: no count rows found",
            counts_path.display()
        )));
    }

    // Colony genotypes; may extend allele registries, never locus or source.
    let mut individuals: Vec<String> = Vec::new();
    let mut genotype_cells: BTreeMap<(usize, usize), (u16, u16)> = BTreeMap::new();
    for (line, fields) in
        tsv_rows(&colony_path, &colony_text, &["individual", "locus", "allele1", "allele2"])?
    {
        let k = intern(&mut individuals, fields[0]);
        let l = loci.iter().position(|x| x == fields[1]).ok_or_else(|| {
            usage(format!(
                "{}:{line}: locus '{}' does not appear in the reference sample",
                colony_path.display(),
                fields[1]
            ))
        })?;
        let mut pair = [0u16; 2];
        for (slot, &field) in pair.iter_mut().zip(&fields[2..4]) {
            let a = match alleles[l].iter().position(|x| x == field) {
                Some(a) => a,
                None => {
                    eprintln!(
                        "warning: {}:{line}: allele '{field}' at locus '{}' is absent from \
                         every reference sample; padding it with zero counts",
                        colony_path.display(),
                        fields[1]
                    );
                    intern(&mut alleles[l], field)
                }
            };
            *slot = u16::try_from(a).map_err(|_| {
                usage(format!(
                    "{}:{line}: more than {} alleles at one locus",
                    colony_path.display(),
                    u16::MAX
                ))
            })?;
        }
        if genotype_cells.insert((k, l), (pair[0], pair[1])).is_some() {
            return Err(usage(format!(
                "{}:{line}: duplicate genotype for individual '{}' at locus '{}'",
                colony_path.display(),
                fields[0],
                fields[1]
            )));
        }
    }

    let alleles_per_locus: Vec<usize> = alleles.iter().map(Vec::len).collect();
    let counts_table = {
        let mut table = vec![Vec::with_capacity(loci.len()); sources.len()];
        for (s, per_source) in table.iter_mut().enumerate() {
            for (l, &a_count) in alleles_per_locus.iter().enumerate() {
                let mut row = vec![0u32; a_count];
                for (a, cell) in row.iter_mut().enumerate() {
                    if let Some(&c) = count_cells.get(&(s, l, a)) {
                        *cell = c;
                    }
                }
                per_source.push(row);
            }
        }
        AlleleCountTable::new(table)
            .map_err(|e| usage(format!("{}: {e}", counts_path.display())))?
    };

    let colony_table = {
        let genotypes: Vec<Genotype> = (0..individuals.len())
            .map(|k| {
                Genotype::new(
                    (0..loci.len())
                        .map(|l| genotype_cells.get(&(k, l)).copied())
                        .collect(),
                )
            })
            .collect();
        GenotypeTable::new(genotypes, alleles_per_locus)
            .map_err(|e| usage(format!("{}: {e}", colony_path.display())))?
    };

    // Covariates: optional; an absent or header-only file means none.
    let covariates = match &covariates_text {
        None => None,
        Some(text) => {
            let rows = tsv_rows(&covariates_path, text, &["source", "covariate", "value"])?;
            if rows.is_empty() {
                None
            } else {
                let mut names: Vec<String> = Vec::new();
                let mut cells: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                for (line, fields) in rows {
                    let s = sources.iter().position(|x| x == fields[0]).ok_or_else(|| {
                        usage(format!(
                            "{}:{line}: source '{}' does not appear in the reference sample",
                            covariates_path.display(),
                            fields[0]
                        ))
                    })?;
                    let r = intern(&mut names, fields[1]);
                    let value: f64 = fields[2].parse().map_err(|_| {
                        usage(format!(
                            "{}:{line}: value '{}' is not a number",
                            covariates_path.display(),
                            fields[2]
                        ))
                    })?;
                    if cells.insert((r, s), value).is_some() {
                        return Err(usage(format!(
                            "{}:{line}: duplicate value for covariate '{}', source '{}'",
                            covariates_path.display(),
                            fields[1],
                            fields[0]
                        )));
                    }
                }
                let mut raw = Vec::with_capacity(names.len());
                for (r, name) in names.iter().enumerate() {
                    let mut row = Vec::with_capacity(sources.len());
                    for (s, source) in sources.iter().enumerate() {
                        row.push(*cells.get(&(r, s)).ok_or_else(|| {
                            usage(format!(
                                "{}: covariate '{name}' has no value for source '{source}'",
                                covariates_path.display()
                            ))
                        })?);
                    }
                    raw.push(row);
                }
                Some(
                    CovariateMatrix::new(names, raw)
                        .map_err(|e| usage(format!("{}: {e}", covariates_path.display())))?,
                )
            }
        }
    };

    let data = ModelData::new(colony_table, counts_table, covariates)
        .map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let sha256 = bundle_sha256(&counts_text, &colony_text, covariates_text.as_deref());
    Ok(DataBundle {
        data,
        labels: LabelRegistry {
            sources,
            loci,
            alleles,
            individuals,
        },
        sha256,
    })
}

/// Hash the bundle's file contents (hex SHA-256). Chains record this so
/// `compare` can refuse to score chains against data they were not
/// fitted to.
fn bundle_sha256(counts: &str, colony: &str, covariates: Option<&str>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(counts.as_bytes());
    hasher.update([0u8]);
    hasher.update(colony.as_bytes());
    hasher.update([0u8]);
    hasher.update(covariates.unwrap_or("").as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Write a data bundle (and optional truth sidecar) into `dir`, creating
/// it if needed. Zero counts are written explicitly so the allele
/// registry survives a round trip. Returns the paths written.
pub fn write_bundle(
    dir: &Path,
    data: &ModelData,
    labels: &LabelRegistry,
    truth: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();

    let mut counts = String::from("source\tlocus\tallele\tcount\n");
    for (s, source) in labels.sources.iter().enumerate() {
        for (l, locus) in labels.loci.iter().enumerate() {
            let row = data.source_counts().row(s, l);
            for (a, allele) in labels.alleles[l].iter().enumerate() {
                let _ = writeln!(counts, "{source}\t{locus}\t{allele}\t{}", row[a]);
            }
        }
    }
    let path = dir.join(COUNTS_FILE);
    write_file(&path, &counts)?;
    written.push(path);

    let mut colony = String::from("individual\tlocus\tallele1\tallele2\n");
    for (k, individual) in labels.individuals.iter().enumerate() {
        let genotype = data.colony().genotype(k);
        for (l, locus) in labels.loci.iter().enumerate() {
            if let Some((a1, a2)) = genotype.pair(l) {
                let _ = writeln!(
                    colony,
                    "{individual}\t{locus}\t{}\t{}",
                    labels.alleles[l][a1 as usize], labels.alleles[l][a2 as usize]
                );
            }
        }
    }
    let path = dir.join(COLONY_FILE);
    write_file(&path, &colony)?;
    written.push(path);

    if let Some(matrix) = data.covariates() {
        let mut covariates = String::from("source\tcovariate\tvalue\n");
        for (r, name) in matrix.names().iter().enumerate() {
            for (s, source) in labels.sources.iter().enumerate() {
                let _ = writeln!(covariates, "{source}\t{name}\t{}", matrix.raw(r, s));
            }
        }
        let path = dir.join(COVARIATES_FILE);
        write_file(&path, &covariates)?;
        written.push(path);
    }

    if let Some(truth) = truth {
        let mut text = String::from("parameter\tvalue\n");
        for (name, value) in truth {
            let _ = writeln!(text, "{name}\t{value}");
        }
        let path = dir.join(TRUTH_FILE);
        write_file(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

/// Read a truth sidecar (`parameter\tvalue` rows) into a map.
pub fn read_truth(path: &Path) -> Result<BTreeMap<String, f64>, CliError> {
    let text = read_to_string(path)?;
    let mut truth = BTreeMap::new();
    for (line, fields) in tsv_rows(path, &text, &["parameter", "value"])? {
        let value: f64 = fields[1].parse().map_err(|_| {
            usage(format!(
                "{}:{line}: value '{}' is not a number",
                path.display(),
                fields[1]
            ))
        })?;
        truth.insert(fields[0].to_string(), value);
    }
    Ok(truth)
}

/// Standard label set for simulated bundles: `source-1…`, `locus-1…`,
/// `allele-1…`, `ind-1…`.
pub fn simulated_labels(
    n_sources: usize,
    alleles_per_locus: &[usize],
    n_individuals: usize,
) -> LabelRegistry {
    LabelRegistry {
        sources: (1..=n_sources).map(|i| format!("source-{i}")).collect(),
        loci: (1..=alleles_per_locus.len()).map(|l| format!("locus-{l}")).collect(),
        alleles: alleles_per_locus
            .iter()
            .map(|&a| (1..=a).map(|j| format!("allele-{j}")).collect())
            .collect(),
        individuals: (1..=n_individuals).map(|k| format!("ind-{k}")).collect(),
    }
}

/// Write a fitted chain into a run directory: draws, per-individual
/// colony terms, and metadata (including `data_sha256` of the fitted
/// bundle). Deterministic content for deterministic chains.
pub fn write_chain(dir: &Path, chain: &ChainOutput, data_sha256: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;

    let mut text = String::from("iteration\tlog_likelihood");
    for name in &chain.names {
        let _ = write!(text, "\t{name}");
    }
    text.push('\n');
    for (d, draw) in chain.draws.iter().enumerate() {
        let _ = write!(text, "{}\t{}", chain.draw_iterations[d], chain.log_likelihoods[d]);
        for value in draw {
            let _ = write!(text, "\t{value}");
        }
        text.push('\n');
    }
    write_file(&dir.join(CHAIN_FILE), &text)?;

    let n_individuals = chain.colony_logliks.first().map_or(0, Vec::len);
    let mut text = String::from("iteration");
    for k in 1..=n_individuals {
        let _ = write!(text, "\tind_{k}");
    }
    text.push('\n');
    for (d, row) in chain.colony_logliks.iter().enumerate() {
        let _ = write!(text, "{}", chain.draw_iterations[d]);
        for value in row {
            let _ = write!(text, "\t{value}");
        }
        text.push('\n');
    }
    write_file(&dir.join(COLONY_LOGLIK_FILE), &text)?;

    let mut text = String::from("key\tvalue\n");
    let apl: Vec<String> = chain.alleles_per_locus.iter().map(usize::to_string).collect();
    let scalar_rows = [
        ("format".to_string(), "mixstock-chain-1".to_string()),
        ("prior".to_string(), chain.kind.name().to_string()),
        ("seed".to_string(), chain.seed.to_string()),
        ("iterations".to_string(), chain.iterations.to_string()),
        ("burnin".to_string(), chain.burnin.to_string()),
        ("thin".to_string(), chain.thin.to_string()),
        ("n_draws".to_string(), chain.n_draws().to_string()),
        ("n_sources".to_string(), chain.n_sources.to_string()),
        ("alleles_per_locus".to_string(), apl.join(",")),
        ("n_covariates".to_string(), chain.n_covariates.to_string()),
        ("data_sha256".to_string(), data_sha256.to_string()),
    ];
    for (key, value) in scalar_rows {
        let _ = writeln!(text, "{key}\t{value}");
    }
    for (name, rate) in &chain.acceptance {
        let _ = writeln!(text, "acceptance.{name}\t{rate}");
    }
    for (name, step) in &chain.final_steps {
        let _ = writeln!(text, "step.{name}\t{step}");
    }
    write_file(&dir.join(META_FILE), &text)
}

fn meta_get<'a>(
    meta: &'a BTreeMap<String, String>,
    key: &str,
    path: &Path,
) -> Result<&'a str, CliError> {
    meta.get(key)
        .map(String::as_str)
        .ok_or_else(|| usage(format!("{}: missing key '{key}'", path.display())))
}

fn meta_parse<T: std::str::FromStr>(
    meta: &BTreeMap<String, String>,
    key: &str,
    path: &Path,
) -> Result<T, CliError> {
    meta_get(meta, key, path)?.parse().map_err(|_| {
        usage(format!(
            "{}: key '{key}' has malformed value '{}'",
            path.display(),
            meta[key]
        ))
    })
}

/// Read a run directory back into a chain, cross-checking the chain
/// against its metadata (parameter names, draw counts, dimensions).
/// Returns the chain and the recorded data hash.
pub fn read_chain(dir: &Path) -> Result<(ChainOutput, String), CliError> {
    let meta_path = dir.join(META_FILE);
    let meta_text = read_to_string(&meta_path)?;
    let mut meta: BTreeMap<String, String> = BTreeMap::new();
    for (line, fields) in tsv_rows(&meta_path, &meta_text, &["key", "value"])? {
        if meta.insert(fields[0].to_string(), fields[1].to_string()).is_some() {
            return Err(usage(format!(
                "{}:{line}: duplicate key '{}'",
                meta_path.display(),
                fields[0]
            )));
        }
    }
    if meta_get(&meta, "format", &meta_path)? != "mixstock-chain-1" {
        return Err(usage(format!(
            "{}: unrecognized chain format '{}'",
            meta_path.display(),
            meta["format"]
        )));
    }
    let prior_name = meta_get(&meta, "prior", &meta_path)?;
    let kind = [
        PriorKind::Uniform,
        PriorKind::DirichletDirichlet,
        PriorKind::DirichletLognormal,
    ]
    .into_iter()
    .find(|k| k.name() == prior_name)
    .ok_or_else(|| usage(format!("{}: unknown prior '{prior_name}'", meta_path.display())))?;
    let n_sources: usize = meta_parse(&meta, "n_sources", &meta_path)?;
    let n_covariates: usize = meta_parse(&meta, "n_covariates", &meta_path)?;
    let alleles_per_locus: Vec<usize> = meta_get(&meta, "alleles_per_locus", &meta_path)?
        .split(',')
        .map(|x| x.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            usage(format!(
                "{}: key 'alleles_per_locus' has malformed value",
                meta_path.display()
            ))
        })?;
    let n_draws: usize = meta_parse(&meta, "n_draws", &meta_path)?;
    let data_sha256 = meta_get(&meta, "data_sha256", &meta_path)?.to_string();

    let expected_names = param_names(n_sources, &alleles_per_locus, kind, n_covariates);

    let chain_path = dir.join(CHAIN_FILE);
    let chain_text = read_to_string(&chain_path)?;
    let mut header = vec!["iteration", "log_likelihood"];
    header.extend(expected_names.iter().map(String::as_str));
    let rows = tsv_rows(&chain_path, &chain_text, &header)?;
    if rows.is_empty() {
        return Err(usage(format!(
            "{}: chain has no recorded draws",
            chain_path.display()
        )));
    }
    if rows.len() != n_draws {
        return Err(usage(format!(
            "{}: {} draws on disk, metadata says {n_draws}",
            chain_path.display(),
            rows.len()
        )));
    }
    let mut draw_iterations = Vec::with_capacity(rows.len());
    let mut log_likelihoods = Vec::with_capacity(rows.len());
    let mut draws = Vec::with_capacity(rows.len());
    for (line, fields) in rows {
        let bad_number = |what: &str, value: &str| {
            usage(format!(
                "{}:{line}: {what} '{value}' is not a number",
                chain_path.display()
            ))
        };
        draw_iterations.push(
            fields[0]
                .parse::<usize>()
                .map_err(|_| bad_number("iteration", fields[0]))?,
        );
        log_likelihoods.push(
            fields[1]
                .parse::<f64>()
                .map_err(|_| bad_number("log-likelihood", fields[1]))?,
        );
        let draw: Vec<f64> = fields[2..]
            .iter()
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad_number("parameter value", "row"))?;
        draws.push(draw);
    }

    let loglik_path = dir.join(COLONY_LOGLIK_FILE);
    let loglik_text = read_to_string(&loglik_path)?;
    let first_line = loglik_text.lines().next().unwrap_or("");
    let n_individuals = if first_line.trim_end_matches('\r') == "iteration" {
        0
    } else {
        first_line.trim_end_matches('\r').split('\t').count().saturating_sub(1)
    };
    let ind_headers: Vec<String> = (1..=n_individuals).map(|k| format!("ind_{k}")).collect();
    let mut header = vec!["iteration"];
    header.extend(ind_headers.iter().map(String::as_str));
    let rows = tsv_rows(&loglik_path, &loglik_text, &header)?;
    if rows.len() != draws.len() {
        return Err(usage(format!(
            "{}: {} rows for {} chain draws",
            loglik_path.display(),
            rows.len(),
            draws.len()
        )));
    }
    let mut colony_logliks = Vec::with_capacity(rows.len());
    for (line, fields) in rows {
        if fields[0].parse::<usize>().ok() != draw_iterations.get(colony_logliks.len()).copied() {
            return Err(usage(format!(
                "{}:{line}: iteration column disagrees with {}",
                loglik_path.display(),
                CHAIN_FILE
            )));
        }
        let row: Vec<f64> = fields[1..]
            .iter()
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                usage(format!(
                    "{}:{line}: malformed log-likelihood value",
                    loglik_path.display()
                ))
            })?;
        colony_logliks.push(row);
    }

    let mut acceptance = BTreeMap::new();
    let mut final_steps = BTreeMap::new();
    for (key, value) in &meta {
        let target = if let Some(name) = key.strip_prefix("acceptance.") {
            Some((&mut acceptance, name))
        } else {
            key.strip_prefix("step.").map(|name| (&mut final_steps, name))
        };
        if let Some((map, name)) = target {
            let parsed: f64 = value.parse().map_err(|_| {
                usage(format!(
                    "{}: key '{key}' has malformed value '{value}'",
                    meta_path.display()
                ))
            })?;
            map.insert(name.to_string(), parsed);
        }
    }

    Ok((
        ChainOutput {
            n_sources,
            alleles_per_locus,
            kind,
            n_covariates,
            names: expected_names,
            draws,
            draw_iterations,
            log_likelihoods,
            colony_logliks,
            acceptance,
            final_steps,
            seed: meta_parse(&meta, "seed", &meta_path)?,
            iterations: meta_parse(&meta, "iterations", &meta_path)?,
            burnin: meta_parse(&meta, "burnin", &meta_path)?,
            thin: meta_parse(&meta, "thin", &meta_path)?,
        },
        data_sha256,
    ))
}
