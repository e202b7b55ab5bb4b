//! Gibbs and split-merge kernels, their coupled versions, and the lag-1 pair runner.

mod gibbs;
mod pair;
mod split_merge;


use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::partition::{Clustering, IntersectionTracker, Partition};
use crate::targets::PartitionModel;

pub use gibbs::{coupled_gibbs_sweep, single_gibbs_sweep, TraceEvent};
pub use pair::{
    run_coupled_pair, run_single_chain, Budget, ChainPairRecord, PairConfig, PairRun,
    SingleChainRun,
};
pub use split_merge::{coupled_split_merge_sweep, split_merge_move, split_merge_sweep};

/// One chain: its partition and the model cache kept in sync with it.
#[derive(Debug)]
pub struct Chain<M: PartitionModel> {
    clustering: Clustering,
    cache: M::Cache,
    sweeps: u64,
}

impl<M: PartitionModel> Clone for Chain<M> {
    fn clone(&self) -> Self {
        Chain {
            clustering: self.clustering.clone(),
            cache: self.cache.clone(),
            sweeps: self.sweeps,
        }
    }
}

impl<M: PartitionModel> Chain<M> {
    pub fn new(model: &M, start: &Partition) -> Result<Self> {
        let clustering = Clustering::from_partition(start);
        let cache = model.build_cache(&clustering)?;
        Ok(Chain {
            clustering,
            cache,
            sweeps: 0,
        })
    }

    pub fn clustering(&self) -> &Clustering {
        &self.clustering
    }

    pub fn cache(&self) -> &M::Cache {
        &self.cache
    }

    pub fn partition(&self) -> Partition {
        self.clustering.to_partition()
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn same_partition(&self, other: &Self) -> bool {
        self.clustering.same_partition(&other.clustering)
    }

    fn remove(&mut self, model: &M, item: usize) -> Result<usize> {
        let (slot, emptied) = self.clustering.remove(item)?;
        model.on_remove(&mut self.cache, item, slot, emptied);
        Ok(slot)
    }

    fn insert(&mut self, model: &M, item: usize, target: crate::Candidate) -> Result<usize> {
        let slot = self.clustering.insert(item, target)?;
        model.on_insert(&mut self.cache, item, slot);
        Ok(slot)
    }
}

/// Which single-chain kernel a sweep applies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    #[default]
    Gibbs,
    SplitMerge,
}

/// One sweep of the chosen kernel.
pub fn sweep<M: PartitionModel, R: Rng + ?Sized>(
    model: &M,
    kind: SamplerKind,
    chain: &mut Chain<M>,
    rng: &mut R,
) -> Result<()> {
    match kind {
        SamplerKind::Gibbs => single_gibbs_sweep(model, chain, rng),
        SamplerKind::SplitMerge => split_merge_sweep(model, chain, rng),
    }
}

/// Tracker for two chains.
pub fn tracker_for<M: PartitionModel>(x: &Chain<M>, y: &Chain<M>) -> Result<IntersectionTracker> {
    IntersectionTracker::new(&x.clustering, &y.clustering)
}
