//! Target distributions over partitions.
//!
//! A [`PartitionModel`] exposes the unnormalized leave-out weights used by Gibbs sweeps and
//! an exact unnormalized log-p.m.f. that factors as a count term times per-block terms.

mod coloring;
mod dpmm;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Candidate, Clustering, Partition};
use crate::Real;

pub use coloring::{greedy_coloring, ColoringModel, Graph};
pub use dpmm::{crp_prior_logpmf, CacheMode, ClusterPosterior, DpmmModel};

/// A distribution over partitions of a fixed item set.
///
/// `log pmf(π) = count_term(|π|) + Σ_A block_term(A)` up to a constant; `-inf` marks
/// infeasible partitions.
pub trait PartitionModel: Send + Sync {
    type Scalar: Real;
    /// Per-chain state kept in sync with a [`Clustering`], indexed by slot.
    type Cache: Clone + Debug + Send;

    fn n_items(&self) -> usize;

    fn build_cache(&self, clustering: &Clustering) -> Result<Self::Cache>;

    /// Called after `item` left `slot`.
    fn on_remove(&self, cache: &mut Self::Cache, item: usize, slot: usize, emptied: bool);

    /// Called after `item` entered `slot`.
    fn on_insert(&self, cache: &mut Self::Cache, item: usize, slot: usize);

    /// Unnormalized log weights of inserting the left-out `item` at each candidate.
    fn log_weights(
        &self,
        cache: &Self::Cache,
        clustering: &Clustering,
        item: usize,
        candidates: &[Candidate],
    ) -> Vec<Self::Scalar>;

    fn log_count_term(&self, n_blocks: usize) -> Self::Scalar;

    fn log_block_term(&self, block: &[usize]) -> Self::Scalar;

    fn log_pmf(&self, partition: &Partition) -> Self::Scalar {
        partition
            .blocks()
            .iter()
            .fold(self.log_count_term(partition.n_blocks()), |acc, b| {
                acc + self.log_block_term(b)
            })
    }

    /// Default starting state for chains.
    fn initial_partition(&self) -> Partition;
}

/// A leave-out conditional: candidates with strictly positive probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsConditional<T> {
    pub item: usize,
    pub candidates: Vec<Candidate>,
    pub probs: Vec<T>,
}

impl<T: Real> GibbsConditional<T> {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Index of the candidate selected by a uniform draw in `[0, 1)`.
    pub fn inverse_cdf(&self, u: T) -> usize {
        let mut acc = T::zero();
        for (k, &p) in self.probs.iter().enumerate() {
            acc = acc + p;
            if u < acc {
                return k;
            }
        }
        self.probs.len() - 1
    }
}

/// Normalizes log weights with max subtraction; `-inf` entries are dropped.
pub fn normalize_log_weights<T: Real>(
    item: usize,
    candidates: &[Candidate],
    log_w: &[T],
) -> Result<GibbsConditional<T>> {
    let max = log_w
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    if !max.is_finite() {
        return Err(Error::InvalidModel(format!(
            "no feasible candidate for item {}",
            item + 1
        )));
    }
    let mut cands = Vec::with_capacity(candidates.len());
    let mut probs = Vec::with_capacity(candidates.len());
    for (&c, &lw) in candidates.iter().zip(log_w) {
        if lw.is_finite() {
            cands.push(c);
            probs.push((lw - max).exp());
        }
    }
    let total: T = probs.iter().copied().sum();
    probs.iter_mut().for_each(|p| *p = *p / total);
    Ok(GibbsConditional {
        item,
        candidates: cands,
        probs,
    })
}

/// Leave-out conditional for `item`, which must be unassigned in `clustering`.
pub fn gibbs_conditional<M: PartitionModel>(
    model: &M,
    cache: &M::Cache,
    clustering: &Clustering,
    item: usize,
) -> Result<GibbsConditional<M::Scalar>> {
    if clustering.slot_of(item).is_some() {
        return Err(Error::ItemPresent(item));
    }
    let candidates = clustering.candidates();
    let log_w = model.log_weights(cache, clustering, item, &candidates);
    normalize_log_weights(item, &candidates, &log_w)
}

/// The conditional of `item` given `minus`, as full candidate partitions with probabilities.
pub fn conditional_over_partitions<M: PartitionModel>(
    model: &M,
    minus: &Partition,
    item: usize,
) -> Result<Vec<(Partition, M::Scalar)>> {
    let clustering = Clustering::from_partition(minus);
    let cache = model.build_cache(&clustering)?;
    let cond = gibbs_conditional(model, &cache, &clustering, item)?;
    cond.candidates
        .iter()
        .zip(&cond.probs)
        .map(|(&c, &p)| Ok((clustering.materialize(item, c)?, p)))
        .collect()
}
