//! Incremental evaluation of the colony log-likelihood.
//!
//! The colony term is a sum over individuals of a log of a weighted sum over
//! parental-origin pairs, where each pair's contribution is a product of
//! per-locus genotype probabilities:
//!
//! `Σ_k ln Σ_q w_q · Π_l f_{l,q,k}`
//!
//! with `q` ranging over unordered source pairs (diagonal = same-source) and
//! the weights `w_q` carrying the mixture/assortative structure. The sweep
//! engine evaluates this once per proposal, so this cache keeps the per-pair
//! products `Π_l f` materialized: a mixture/assortative proposal only needs
//! new weights, and an allele-frequency row proposal only needs the factors
//! of the pairs that involve the updated source at the updated locus.
//!
//! Products are stored in linear space with a per-individual log offset.
//! Factors are single-locus genotype probabilities, so products stay well
//! above `f64` underflow for realistic locus counts; the offset is adjusted
//! defensively whenever a product row drifts below `1e-100` anyway. The
//! public log-space likelihood in [`crate::genetics`] is the reference
//! implementation this engine is validated against.

use crate::genetics::{locus_genotype_prob, AlleleFrequencies, GenotypeTable};
use crate::scalar::Scalar;

/// Rescale threshold: when the largest product for an individual falls
/// below this, the row is renormalized into its log offset.
const RESCALE_FLOOR: f64 = 1e-100;

#[derive(Debug)]
pub(crate) struct ColonyCache<S> {
    /// Unordered source pairs in canonical row-major upper-triangle order:
    /// (0,0), (0,1), …, (0,I-1), (1,1), …
    pairs: Vec<(usize, usize)>,
    /// For each source, the indices of the pairs that involve it.
    affected: Vec<Vec<usize>>,
    /// `aff_pos[i][q]`: position of pair `q` within `affected[i]`, or
    /// `usize::MAX` if the pair does not involve source `i`.
    aff_pos: Vec<Vec<usize>>,
    /// Per-locus per-pair per-individual genotype probability factors.
    factors: Vec<Vec<Vec<S>>>,
    /// Per-pair per-individual running products over loci, rescaled by
    /// `exp(-offsets[k])`.
    products: Vec<Vec<S>>,
    /// Per-individual log rescaling applied to all of its products.
    offsets: Vec<S>,
    n_individuals: usize,
}

/// Workspace for one pending frequency-row proposal: the recomputed factors
/// and products of the affected pairs.
#[derive(Debug)]
pub(crate) struct RowScratch<S> {
    new_factors: Vec<Vec<S>>,
    new_products: Vec<Vec<S>>,
}

impl<S> Default for RowScratch<S> {
    fn default() -> Self {
        RowScratch {
            new_factors: Vec::new(),
            new_products: Vec::new(),
        }
    }
}

impl<S: Scalar> ColonyCache<S> {
    pub(crate) fn new(colony: &GenotypeTable, freqs: &AlleleFrequencies<S>) -> Self {
        let n_sources = freqs.n_sources();
        let n_individuals = colony.len();
        let mut pairs = Vec::new();
        for i in 0..n_sources {
            for j in i..n_sources {
                pairs.push((i, j));
            }
        }
        let mut affected = vec![Vec::new(); n_sources];
        let mut aff_pos = vec![vec![usize::MAX; pairs.len()]; n_sources];
        for (q, &(i, j)) in pairs.iter().enumerate() {
            aff_pos[i][q] = affected[i].len();
            affected[i].push(q);
            if j != i {
                aff_pos[j][q] = affected[j].len();
                affected[j].push(q);
            }
        }

        let mut factors = Vec::with_capacity(freqs.n_loci());
        for l in 0..freqs.n_loci() {
            let mut per_pair = Vec::with_capacity(pairs.len());
            for &(i, j) in &pairs {
                let pi = freqs.row(l, i);
                let pj = freqs.row(l, j);
                let mut col = Vec::with_capacity(n_individuals);
                for y in colony.iter() {
                    col.push(match y.pair(l) {
                        Some((a1, a2)) => locus_genotype_prob(a1, a2, pi, pj),
                        None => S::one(),
                    });
                }
                per_pair.push(col);
            }
            factors.push(per_pair);
        }

        let mut products = vec![vec![S::one(); n_individuals]; pairs.len()];
        for per_pair in &factors {
            for (q, col) in per_pair.iter().enumerate() {
                for (k, &f) in col.iter().enumerate() {
                    products[q][k] *= f;
                }
            }
        }

        let mut cache = ColonyCache {
            pairs,
            affected,
            aff_pos,
            factors,
            products,
            offsets: vec![S::zero(); n_individuals],
            n_individuals,
        };
        for k in 0..n_individuals {
            cache.rescale_individual(k);
        }
        cache
    }

    /// Mixture/assortative weights for each pair, in pair order:
    /// `ω m_i + (1-ω) m_i²` on the diagonal, `(1-ω) 2 m_i m_j` off it.
    pub(crate) fn pair_weights(&self, mix: &[S], omega: S) -> Vec<S> {
        let two = S::from_f64(2.0);
        self.pairs
            .iter()
            .map(|&(i, j)| {
                if i == j {
                    omega * mix[i] + (S::one() - omega) * mix[i] * mix[i]
                } else {
                    (S::one() - omega) * two * mix[i] * mix[j]
                }
            })
            .collect()
    }

    /// Colony log-likelihood at the cached frequencies with the given pair
    /// weights. Zero for an empty colony.
    pub(crate) fn loglik(&self, weights: &[S]) -> S {
        let mut total = S::zero();
        for k in 0..self.n_individuals {
            let mut s = S::zero();
            for (q, w) in weights.iter().enumerate() {
                s += *w * self.products[q][k];
            }
            total += self.offsets[k] + s.ln();
        }
        total
    }

    /// Per-individual colony log-likelihood terms, in colony order.
    pub(crate) fn individual_logliks(&self, weights: &[S]) -> Vec<S> {
        (0..self.n_individuals)
            .map(|k| {
                let mut s = S::zero();
                for (q, w) in weights.iter().enumerate() {
                    s += *w * self.products[q][k];
                }
                self.offsets[k] + s.ln()
            })
            .collect()
    }

    /// Recompute every product from the stored factors, discarding the
    /// rounding drift that accumulates over many incremental commits. The
    /// factors themselves are always exact (recomputed on each commit), so
    /// this restores full precision.
    pub(crate) fn rebuild_products(&mut self) {
        for col in &mut self.products {
            for v in col.iter_mut() {
                *v = S::one();
            }
        }
        for per_pair in &self.factors {
            for (q, col) in per_pair.iter().enumerate() {
                for (k, &f) in col.iter().enumerate() {
                    self.products[q][k] *= f;
                }
            }
        }
        for v in self.offsets.iter_mut() {
            *v = S::zero();
        }
        for k in 0..self.n_individuals {
            self.rescale_individual(k);
        }
    }

    /// Colony log-likelihood with the (locus, source) frequency row replaced
    /// by `new_row`, leaving the cache untouched. The recomputed factors and
    /// products land in `scratch` so an accepted proposal can be committed
    /// without re-evaluation.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn loglik_with_row(
        &self,
        colony: &GenotypeTable,
        freqs: &AlleleFrequencies<S>,
        locus: usize,
        source: usize,
        new_row: &[S],
        weights: &[S],
        scratch: &mut RowScratch<S>,
    ) -> S {
        let aff = &self.affected[source];
        scratch.new_factors.resize(aff.len(), Vec::new());
        scratch.new_products.resize(aff.len(), Vec::new());

        for (idx, &q) in aff.iter().enumerate() {
            let (i, j) = self.pairs[q];
            let pi: &[S] = if i == source { new_row } else { freqs.row(locus, i) };
            let pj: &[S] = if j == source { new_row } else { freqs.row(locus, j) };
            let old = &self.factors[locus][q];
            let nf = &mut scratch.new_factors[idx];
            let np = &mut scratch.new_products[idx];
            nf.clear();
            np.clear();
            nf.reserve(self.n_individuals);
            np.reserve(self.n_individuals);
            for (k, y) in colony.iter().enumerate() {
                let f = match y.pair(locus) {
                    Some((a1, a2)) => locus_genotype_prob(a1, a2, pi, pj),
                    None => S::one(),
                };
                nf.push(f);
                // Factors lie in (0, 1], so products / old_factor ≤ 1 and
                // this never overflows.
                np.push(self.products[q][k] / old[k] * f);
            }
        }

        let pos = &self.aff_pos[source];
        let mut total = S::zero();
        for k in 0..self.n_individuals {
            let mut s = S::zero();
            for (q, w) in weights.iter().enumerate() {
                let v = if pos[q] != usize::MAX {
                    scratch.new_products[pos[q]][k]
                } else {
                    self.products[q][k]
                };
                s += *w * v;
            }
            total += self.offsets[k] + s.ln();
        }
        total
    }

    /// Install a previously proposed frequency row from `scratch`.
    pub(crate) fn commit_row(&mut self, locus: usize, source: usize, scratch: &mut RowScratch<S>) {
        for (idx, &q) in self.affected[source].iter().enumerate() {
            std::mem::swap(&mut self.factors[locus][q], &mut scratch.new_factors[idx]);
            std::mem::swap(&mut self.products[q], &mut scratch.new_products[idx]);
        }
        for k in 0..self.n_individuals {
            self.rescale_individual(k);
        }
    }

    /// Fold an under-flowing product row into the individual's log offset.
    fn rescale_individual(&mut self, k: usize) {
        let mut max = S::zero();
        for q in 0..self.pairs.len() {
            let v = self.products[q][k];
            if v > max {
                max = v;
            }
        }
        if max > S::zero() && max < S::from_f64(RESCALE_FLOOR) {
            for q in 0..self.pairs.len() {
                self.products[q][k] /= max;
            }
            self.offsets[k] += max.ln();
        }
    }
}
