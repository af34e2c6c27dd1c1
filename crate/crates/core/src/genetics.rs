//! Genetic data containers and the mixed-colony likelihood.
//!
//! The model observes two things. First, reference allele counts drawn from
//! each candidate source population, assumed to follow independent
//! multinomials with the (unknown) source allele frequencies. Second,
//! multilocus genotypes from the mixed colony, where each individual's two
//! parents either both come from one source (with probability `ω`, the
//! assortative-mating weight) or are drawn independently from the mixture.
//! Within a parental-origin pair, loci are independent and genotypes follow
//! Hardy–Weinberg-style products of the parental allele frequencies.
//!
//! All likelihoods are computed in log space; sums over parental origins go
//! through [`crate::numeric::log_sum_exp`].

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::scalar::Scalar;

/// One individual's multilocus genotype. Alleles are 0-based indices into
/// each locus's allele list; `None` marks a locus that failed to type.
///
/// Genotypes are unordered pairs: the constructor canonicalizes each pair as
/// `(min, max)`, so `(2, 0)` and `(0, 2)` construct equal values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genotype {
    pairs: Vec<Option<(u16, u16)>>,
}

impl Genotype {
    /// Build a genotype from per-locus allele pairs, canonicalizing order.
    pub fn new(pairs: Vec<Option<(u16, u16)>>) -> Self {
        let pairs = pairs
            .into_iter()
            .map(|p| p.map(|(a, b)| if a <= b { (a, b) } else { (b, a) }))
            .collect();
        Genotype { pairs }
    }

    /// Number of loci (typed or not).
    pub fn n_loci(&self) -> usize {
        self.pairs.len()
    }

    /// The canonical allele pair at locus `l`, or `None` if untyped.
    pub fn pair(&self, l: usize) -> Option<(u16, u16)> {
        self.pairs[l]
    }

    /// Iterate over the per-locus pairs.
    pub fn pairs(&self) -> impl Iterator<Item = Option<(u16, u16)>> + '_ {
        self.pairs.iter().copied()
    }
}

/// The colony sample: genotypes that all share one locus layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenotypeTable {
    genotypes: Vec<Genotype>,
    alleles_per_locus: Vec<usize>,
}

impl GenotypeTable {
    /// Validate that every genotype covers the same loci and that every
    /// typed allele index is in range for its locus.
    ///
    /// An empty genotype list is allowed (it represents "no colony data",
    /// which the sampler uses for prior-only runs); an empty locus layout is
    /// not.
    pub fn new(genotypes: Vec<Genotype>, alleles_per_locus: Vec<usize>) -> Result<Self> {
        if alleles_per_locus.is_empty() {
            return Err(Error::EmptyInput("locus layout has no loci".into()));
        }
        if let Some(l) = alleles_per_locus.iter().position(|&a| a == 0) {
            return Err(Error::InvalidValue(format!("locus {l} has zero alleles")));
        }
        for (k, g) in genotypes.iter().enumerate() {
            if g.n_loci() != alleles_per_locus.len() {
                return Err(Error::DimensionMismatch(format!(
                    "individual {k} has {} loci, layout has {}",
                    g.n_loci(),
                    alleles_per_locus.len()
                )));
            }
            for (l, pair) in g.pairs().enumerate() {
                if let Some((a, b)) = pair {
                    let n = alleles_per_locus[l];
                    if a as usize >= n || b as usize >= n {
                        return Err(Error::InvalidValue(format!(
                            "individual {k}, locus {l}: allele index out of range (have \
                             {n} alleles, saw pair ({a}, {b}))"
                        )));
                    }
                }
            }
        }
        Ok(GenotypeTable {
            genotypes,
            alleles_per_locus,
        })
    }

    pub fn len(&self) -> usize {
        self.genotypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genotypes.is_empty()
    }

    pub fn n_loci(&self) -> usize {
        self.alleles_per_locus.len()
    }

    pub fn alleles_per_locus(&self) -> &[usize] {
        &self.alleles_per_locus
    }

    pub fn genotype(&self, k: usize) -> &Genotype {
        &self.genotypes[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Genotype> {
        self.genotypes.iter()
    }
}

/// Reference allele counts: `count(i, l, j)` is how many copies of allele
/// `j` were observed at locus `l` in the sample from source `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlleleCountTable {
    /// Indexed `[source][locus][allele]`.
    counts: Vec<Vec<Vec<u32>>>,
    alleles_per_locus: Vec<usize>,
}

impl AlleleCountTable {
    /// Build from counts indexed `[source][locus][allele]`, checking that
    /// every source covers the same loci with the same allele lists.
    pub fn new(counts: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput("no sources in count table".into()));
        }
        if counts[0].is_empty() {
            return Err(Error::EmptyInput("no loci in count table".into()));
        }
        let alleles_per_locus: Vec<usize> = counts[0].iter().map(|row| row.len()).collect();
        if let Some(l) = alleles_per_locus.iter().position(|&a| a == 0) {
            return Err(Error::InvalidValue(format!("locus {l} has zero alleles")));
        }
        for (i, per_source) in counts.iter().enumerate() {
            if per_source.len() != alleles_per_locus.len() {
                return Err(Error::DimensionMismatch(format!(
                    "source {i} has {} loci, source 0 has {}",
                    per_source.len(),
                    alleles_per_locus.len()
                )));
            }
            for (l, row) in per_source.iter().enumerate() {
                if row.len() != alleles_per_locus[l] {
                    return Err(Error::DimensionMismatch(format!(
                        "source {i}, locus {l}: {} alleles, expected {}",
                        row.len(),
                        alleles_per_locus[l]
                    )));
                }
            }
        }
        Ok(AlleleCountTable {
            counts,
            alleles_per_locus,
        })
    }

    pub fn n_sources(&self) -> usize {
        self.counts.len()
    }

    pub fn n_loci(&self) -> usize {
        self.alleles_per_locus.len()
    }

    pub fn alleles_per_locus(&self) -> &[usize] {
        &self.alleles_per_locus
    }

    pub fn count(&self, source: usize, locus: usize, allele: usize) -> u32 {
        self.counts[source][locus][allele]
    }

    /// All allele counts for one (source, locus) cell.
    pub fn row(&self, source: usize, locus: usize) -> &[u32] {
        &self.counts[source][locus]
    }

    /// Total count in one (source, locus) cell.
    pub fn total(&self, source: usize, locus: usize) -> u32 {
        self.counts[source][locus].iter().sum()
    }
}

/// Per-source allele frequencies: one probability simplex per
/// (locus, source) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AlleleFrequencies<S> {
    /// Indexed `[locus][source][allele]`.
    rows: Vec<Vec<Vec<S>>>,
}

/// Check one probability vector: strictly interior and summing to 1 within
/// the scalar's tolerance. A single-component vector must be exactly the
/// point mass (1).
fn check_simplex<S: Scalar>(row: &[S], what: &str) -> Result<()> {
    if row.is_empty() {
        return Err(Error::EmptyInput(format!("{what}: empty probability vector")));
    }
    let tol = S::simplex_tolerance();
    let sum: S = row.iter().copied().sum();
    if (sum - S::one()).abs() > tol {
        return Err(Error::InvalidValue(format!(
            "{what}: probabilities sum to {sum}, not 1"
        )));
    }
    if row.len() == 1 {
        return Ok(());
    }
    if row.iter().any(|&p| p <= S::zero() || p >= S::one()) {
        return Err(Error::InvalidValue(format!(
            "{what}: probabilities must lie strictly inside (0, 1)"
        )));
    }
    Ok(())
}

impl<S: Scalar> AlleleFrequencies<S> {
    /// Build from frequencies indexed `[locus][source][allele]`, validating
    /// that each (locus, source) row is a strictly interior simplex and that
    /// all loci cover the same sources.
    pub fn new(rows: Vec<Vec<Vec<S>>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("no loci in frequency table".into()));
        }
        let n_sources = rows[0].len();
        if n_sources == 0 {
            return Err(Error::EmptyInput("no sources in frequency table".into()));
        }
        for (l, per_locus) in rows.iter().enumerate() {
            if per_locus.len() != n_sources {
                return Err(Error::DimensionMismatch(format!(
                    "locus {l} has {} sources, locus 0 has {n_sources}",
                    per_locus.len()
                )));
            }
            let n_alleles = per_locus[0].len();
            for (i, row) in per_locus.iter().enumerate() {
                if row.len() != n_alleles {
                    return Err(Error::DimensionMismatch(format!(
                        "locus {l}: source {i} has {} alleles, source 0 has {n_alleles}",
                        row.len()
                    )));
                }
                check_simplex(row, &format!("allele frequencies at locus {l}, source {i}"))?;
            }
        }
        Ok(AlleleFrequencies { rows })
    }

    /// Build without validation. Intended for tests and internal call sites
    /// that need boundary values (exact zeros, degenerate simplexes) the
    /// checked constructor rejects; the likelihood functions handle such
    /// rows by returning `-inf` where appropriate.
    pub fn from_rows_unchecked(rows: Vec<Vec<Vec<S>>>) -> Self {
        AlleleFrequencies { rows }
    }

    pub fn n_loci(&self) -> usize {
        self.rows.len()
    }

    pub fn n_sources(&self) -> usize {
        self.rows[0].len()
    }

    pub fn n_alleles(&self, locus: usize) -> usize {
        self.rows[locus][0].len()
    }

    pub fn alleles_per_locus(&self) -> Vec<usize> {
        self.rows.iter().map(|per_locus| per_locus[0].len()).collect()
    }

    /// The frequency simplex for one (locus, source) cell.
    pub fn row(&self, locus: usize, source: usize) -> &[S] {
        &self.rows[locus][source]
    }

    /// Replace one (locus, source) row. The sampler uses this for accepted
    /// proposals, which are valid simplexes by construction.
    pub(crate) fn set_row(&mut self, locus: usize, source: usize, row: Vec<S>) {
        self.rows[locus][source] = row;
    }
}

/// Mixture proportions over sources: a strictly interior probability
/// simplex (a single-source mixture is the point mass (1)).
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureProportions<S>(Vec<S>);

impl<S: Scalar> MixtureProportions<S> {
    pub fn new(m: Vec<S>) -> Result<Self> {
        check_simplex(&m, "mixture proportions")?;
        Ok(MixtureProportions(m))
    }

    /// Equal weight on every source.
    pub fn uniform(n_sources: usize) -> Result<Self> {
        if n_sources == 0 {
            return Err(Error::EmptyInput("mixture needs at least one source".into()));
        }
        let w = S::one() / S::from_f64(n_sources as f64);
        Ok(MixtureProportions(vec![w; n_sources]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> S {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

/// The probability that an individual's parents both come from a single
/// source chosen by the mixture, rather than independently. Strictly inside
/// (0, 1); the likelihood itself degrades gracefully at the endpoints, which
/// [`AssortativeCoefficient::new_unchecked`] exposes for boundary analyses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssortativeCoefficient<S>(S);

impl<S: Scalar> AssortativeCoefficient<S> {
    pub fn new(omega: S) -> Result<Self> {
        if !(omega > S::zero() && omega < S::one()) {
            return Err(Error::InvalidValue(format!(
                "assortative coefficient must lie strictly inside (0, 1), got {omega}"
            )));
        }
        Ok(AssortativeCoefficient(omega))
    }

    /// Skip the open-interval check (for limiting cases like `ω = 1`).
    pub fn new_unchecked(omega: S) -> Self {
        AssortativeCoefficient(omega)
    }

    pub fn value(&self) -> S {
        self.0
    }
}

/// Probability of the unordered genotype `(a1, a2)` at one locus when one
/// parental allele is drawn from frequencies `p_first` and the other from
/// `p_second`.
///
/// For a homozygote this is `p_first[a] * p_second[a]`; for a heterozygote
/// both assignments of the two alleles to the two parents contribute. With
/// `p_first == p_second` it reduces to the Hardy–Weinberg genotype
/// probability (including the factor 2 for heterozygotes).
pub fn locus_genotype_prob<S: Scalar>(a1: u16, a2: u16, p_first: &[S], p_second: &[S]) -> S {
    let (a1, a2) = (a1 as usize, a2 as usize);
    if a1 == a2 {
        p_first[a1] * p_second[a1]
    } else {
        p_first[a1] * p_second[a2] + p_first[a2] * p_second[a1]
    }
}

fn check_genotype_dims<S: Scalar>(y: &Genotype, freqs: &AlleleFrequencies<S>) -> Result<()> {
    if y.n_loci() != freqs.n_loci() {
        return Err(Error::DimensionMismatch(format!(
            "genotype covers {} loci, frequencies cover {}",
            y.n_loci(),
            freqs.n_loci()
        )));
    }
    for (l, pair) in y.pairs().enumerate() {
        if let Some((a, b)) = pair {
            let n = freqs.n_alleles(l);
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidValue(format!(
                    "locus {l}: allele pair ({a}, {b}) out of range for {n} alleles"
                )));
            }
        }
    }
    Ok(())
}

fn check_source<S: Scalar>(source: usize, freqs: &AlleleFrequencies<S>) -> Result<()> {
    if source >= freqs.n_sources() {
        return Err(Error::InvalidValue(format!(
            "source index {source} out of range for {} sources",
            freqs.n_sources()
        )));
    }
    Ok(())
}

/// Log-probability of genotype `y` when both parents come from `source`,
/// multiplying Hardy–Weinberg genotype probabilities across typed loci.
/// Untyped loci are skipped.
pub fn genotype_logprob_same_source<S: Scalar>(
    y: &Genotype,
    source: usize,
    freqs: &AlleleFrequencies<S>,
) -> Result<S> {
    check_genotype_dims(y, freqs)?;
    check_source(source, freqs)?;
    let mut acc = S::zero();
    for (l, pair) in y.pairs().enumerate() {
        if let Some((a1, a2)) = pair {
            let p = freqs.row(l, source);
            acc += locus_genotype_prob(a1, a2, p, p).ln();
        }
    }
    Ok(acc)
}

/// Log-probability of genotype `y` when one parent comes from `source_a` and
/// the other from `source_b` (which must differ; for the same-source case
/// use [`genotype_logprob_same_source`]). Symmetric in the two sources.
pub fn genotype_logprob_cross_source<S: Scalar>(
    y: &Genotype,
    source_a: usize,
    source_b: usize,
    freqs: &AlleleFrequencies<S>,
) -> Result<S> {
    if source_a == source_b {
        return Err(Error::InvalidValue(format!(
            "cross-source genotype probability needs two distinct sources, got \
             {source_a} twice"
        )));
    }
    check_genotype_dims(y, freqs)?;
    check_source(source_a, freqs)?;
    check_source(source_b, freqs)?;
    let mut acc = S::zero();
    for (l, pair) in y.pairs().enumerate() {
        if let Some((a1, a2)) = pair {
            acc += locus_genotype_prob(a1, a2, freqs.row(l, source_a), freqs.row(l, source_b))
                .ln();
        }
    }
    Ok(acc)
}

/// Log-likelihood of one colony genotype under the mating mixture:
///
/// `ω Σ_i m_i P(y | i,i) + (1-ω) Σ_i Σ_j m_i m_j P(y | i,j)`
///
/// where the first sum is the assortative branch (one source draws both
/// parents) and the second lets the two parents' sources be drawn
/// independently. Evaluated entirely in log space via log-sum-exp, pairing
/// the symmetric `(i,j)`/`(j,i)` terms.
pub fn colony_individual_loglik<S: Scalar>(
    y: &Genotype,
    omega: &AssortativeCoefficient<S>,
    freqs: &AlleleFrequencies<S>,
    mix: &MixtureProportions<S>,
) -> Result<S> {
    check_genotype_dims(y, freqs)?;
    let n_sources = freqs.n_sources();
    if mix.len() != n_sources {
        return Err(Error::DimensionMismatch(format!(
            "mixture has {} sources, frequencies have {n_sources}",
            mix.len()
        )));
    }

    let w = omega.value();
    let ln_w = w.ln();
    let ln_1mw = (S::one() - w).ln();
    let ln_2 = S::from_f64(2.0).ln();
    let ln_m: Vec<S> = mix.as_slice().iter().map(|&m| m.ln()).collect();

    let mut same = Vec::with_capacity(n_sources);
    for i in 0..n_sources {
        same.push(genotype_logprob_same_source(y, i, freqs)?);
    }

    let mut terms = Vec::with_capacity(2 * n_sources + n_sources * (n_sources - 1) / 2);
    for i in 0..n_sources {
        terms.push(ln_w + ln_m[i] + same[i]);
        terms.push(ln_1mw + ln_m[i] + ln_m[i] + same[i]);
    }
    for i in 0..n_sources {
        for j in (i + 1)..n_sources {
            let cross = genotype_logprob_cross_source(y, i, j, freqs)?;
            terms.push(ln_1mw + ln_2 + ln_m[i] + ln_m[j] + cross);
        }
    }
    Ok(log_sum_exp(&terms))
}

/// Total colony log-likelihood: the sum of [`colony_individual_loglik`] over
/// all individuals. Errors on an empty table — "no data" and "log-likelihood
/// zero" are different statements.
pub fn colony_loglik<S: Scalar>(
    colony: &GenotypeTable,
    omega: &AssortativeCoefficient<S>,
    freqs: &AlleleFrequencies<S>,
    mix: &MixtureProportions<S>,
) -> Result<S> {
    if colony.is_empty() {
        return Err(Error::EmptyInput("colony has no individuals".into()));
    }
    let mut acc = S::zero();
    for y in colony.iter() {
        acc += colony_individual_loglik(y, omega, freqs, mix)?;
    }
    Ok(acc)
}

/// Log-likelihood of the reference allele counts: independent multinomials
/// per (source, locus) cell, so `Σ_i Σ_l Σ_j N_ilj ln p_ilj` up to the
/// multinomial coefficient, which is constant in the parameters and omitted
/// throughout (all downstream uses — MCMC ratios, deviances, CPO — are
/// invariant to it).
///
/// Zero counts contribute nothing even where the frequency is zero; a
/// positive count on a zero-frequency allele makes the data impossible and
/// the result `-inf`.
pub fn source_loglik<S: Scalar>(
    counts: &AlleleCountTable,
    freqs: &AlleleFrequencies<S>,
) -> Result<S> {
    if counts.n_loci() != freqs.n_loci()
        || counts.n_sources() != freqs.n_sources()
        || counts.alleles_per_locus() != freqs.alleles_per_locus().as_slice()
    {
        return Err(Error::DimensionMismatch(
            "allele counts and frequencies disagree on sources/loci/alleles".into(),
        ));
    }
    let mut acc = S::zero();
    for i in 0..counts.n_sources() {
        for l in 0..counts.n_loci() {
            let p = freqs.row(l, i);
            for (j, &n) in counts.row(i, l).iter().enumerate() {
                if n == 0 {
                    continue;
                }
                if p[j] <= S::zero() {
                    return Ok(S::neg_infinity());
                }
                acc += S::from_f64(n as f64) * p[j].ln();
            }
        }
    }
    Ok(acc)
}
