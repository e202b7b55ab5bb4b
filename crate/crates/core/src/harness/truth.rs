//! Reference values of the summaries: exact enumeration or long single chains.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Target, TruthMethod};
use super::runner::{derive_seeds, summary_vector, TRUTH_STREAM};
use crate::error::{Error, Result};
use crate::partition::{all_partitions, bell_number, Partition};
use crate::sampler::run_single_chain;
use crate::targets::{DpmmModel, PartitionModel};

/// Largest item count enumerated on request.
pub const ENUMERATION_CAP: usize = 12;
/// Largest Bell number enumerated automatically.
pub const AUTO_ENUMERATION_STATES: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruthSource {
    Enumeration,
    LongChain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub method: TruthSource,
    pub values: BTreeMap<String, f64>,
    /// Cross-chain standard errors; zero for enumeration.
    pub std_errors: BTreeMap<String, f64>,
}

/// Posterior expectations of `h` over all partitions, normalized on the fly in log space.
pub fn enumerate_expectations<M: PartitionModel<Scalar = f64>>(
    model: &M,
    h: &dyn Fn(&Partition) -> Vec<f64>,
) -> Result<Vec<f64>> {
    let n = model.n_items();
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge(n, ENUMERATION_CAP));
    }
    let mut top = f64::NEG_INFINITY;
    let mut z = 0.0;
    let mut acc: Vec<f64> = Vec::new();
    for p in all_partitions(n) {
        let lp = model.log_pmf(&p);
        if lp == f64::NEG_INFINITY {
            continue;
        }
        if lp > top {
            let scale = (top - lp).exp();
            z *= scale;
            acc.iter_mut().for_each(|a| *a *= scale);
            top = lp;
        }
        let w = (lp - top).exp();
        let hv = h(&p);
        if acc.is_empty() {
            acc = vec![0.0; hv.len()];
        }
        z += w;
        for (a, v) in acc.iter_mut().zip(hv) {
            *a += w * v;
        }
    }
    if z == 0.0 {
        return Err(Error::InvalidModel("target has no partition of positive mass".into()));
    }
    Ok(acc.into_iter().map(|a| a / z).collect())
}

pub fn ground_truth(cfg: &ExperimentConfig, target: &Target, workers: Option<usize>) -> Result<GroundTruth> {
    match target {
        Target::Dpmm(m) => ground_truth_with(cfg, m, Some(m), workers),
        Target::Coloring(m) => ground_truth_with(cfg, m, None, workers),
    }
}

fn ground_truth_with<M>(
    cfg: &ExperimentConfig,
    model: &M,
    dpmm: Option<&DpmmModel<f64>>,
    workers: Option<usize>,
) -> Result<GroundTruth>
where
    M: PartitionModel<Scalar = f64> + Sync,
{
    let summaries = cfg.summaries()?;
    let names = cfg.summary_names()?;
    let start = cfg.initial_partition_for(model);
    let h = summary_vector(&summaries, dpmm, &start)?;
    let n = model.n_items();
    let enumerate = match cfg.truth.method {
        TruthMethod::Enumeration => true,
        TruthMethod::LongChain => false,
        TruthMethod::Auto => bell_number(n).is_some_and(|b| b <= AUTO_ENUMERATION_STATES),
    };
    if enumerate {
        let values = enumerate_expectations(model, &h)?;
        return Ok(GroundTruth {
            method: TruthSource::Enumeration,
            values: names.iter().cloned().zip(values).collect(),
            std_errors: names.iter().map(|s| (s.clone(), 0.0)).collect(),
        });
    }

    let chains = cfg.truth.chains;
    if chains < 2 {
        return Err(Error::Config("long-chain ground truth needs at least 2 chains".into()));
    }
    let seeds = derive_seeds(cfg.run.seed ^ TRUTH_STREAM, chains);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let averages: Vec<Vec<f64>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let run = run_single_chain(model, cfg.sampler.kind, &start, Some(cfg.truth.sweeps), None, &h, seed)?;
                (0..names.len()).map(|k| run.burned_in_average(k)).collect()
            })
            .collect::<Result<_>>()
    })?;
    let mut values = BTreeMap::new();
    let mut std_errors = BTreeMap::new();
    let c = chains as f64;
    for (k, name) in names.iter().enumerate() {
        let col: Vec<f64> = averages.iter().map(|a| a[k]).collect();
        let mean = col.iter().sum::<f64>() / c;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (c - 1.0);
        values.insert(name.clone(), mean);
        std_errors.insert(name.clone(), (var / c).sqrt());
    }
    Ok(GroundTruth { method: TruthSource::LongChain, values, std_errors })
}
