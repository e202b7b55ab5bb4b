//! Parallel coupled and naive runs.

use std::collections::BTreeMap;
use std::sync::Mutex;

use log::{info, warn};
use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BudgetMode, ExperimentConfig, Target};
use crate::error::{Error, Result};
use crate::estimation::SummaryFunction;
use crate::partition::Partition;
use crate::sampler::{run_coupled_pair, run_single_chain, ChainPairRecord, TraceEvent};
use crate::targets::{DpmmModel, PartitionModel};

/// Salts separating the seed streams of coupled pairs, naive chains and ground-truth chains.
const NAIVE_STREAM: u64 = 0x6e61_6976_6500_0001;
pub(crate) const TRUTH_STREAM: u64 = 0x7472_7574_6800_0002;

/// The first `count` outputs of SplitMix64 seeded with `master`.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut sm = SplitMix64::seed_from_u64(master);
    (0..count).map(|_| sm.next_u64()).collect()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    pub budget_mode: BudgetMode,
    /// Record every coupled leave-out step.
    pub trace: bool,
}

/// Elapsed time of one coupled pair, kept apart from the reproducible records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallTimeRow {
    pub index: u64,
    pub wall_time_s: f64,
    pub sweeps_completed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub index: u64,
    pub sweep: u64,
    #[serde(flatten)]
    pub event: TraceEvent<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct CoupledOutput {
    pub records: Vec<ChainPairRecord<f64>>,
    pub wall_times: Vec<WallTimeRow>,
    pub traces: Vec<TraceRow>,
}

/// One per-processor ergodic average from an uncoupled chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveRecord {
    pub index: u64,
    pub rng_seed: u64,
    pub sweeps: u64,
    /// Seconds; omitted in sweep-budget mode.
    pub wall_time_s: Option<f64>,
    pub estimates: BTreeMap<String, f64>,
}

/// Budget per naive chain.
#[derive(Clone, Copy, Debug)]
pub enum NaiveBudget<'a> {
    /// Chain `j` gets the sweeps (or seconds, in wall mode) consumed by coupled pair `j`.
    Matched(&'a [ChainPairRecord<f64>]),
    /// Every chain runs this many sweeps.
    Sweeps(u64),
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Summary evaluator; every summary is checked once on a valid partition so later calls cannot fail.
pub(crate) fn summary_vector<'a>(
    summaries: &'a [SummaryFunction],
    dpmm: Option<&'a DpmmModel<f64>>,
    probe: &Partition,
) -> Result<impl Fn(&Partition) -> Vec<f64> + Sync + 'a> {
    for s in summaries {
        s.evaluate(probe, dpmm)?;
    }
    Ok(move |p: &Partition| {
        summaries
            .iter()
            .map(|s| s.evaluate(p, dpmm).expect("summary validated on a partition of the same size"))
            .collect()
    })
}

pub fn run_coupled(cfg: &ExperimentConfig, target: &Target, opts: RunOptions) -> Result<CoupledOutput> {
    match target {
        Target::Dpmm(m) => run_coupled_with(cfg, m, Some(m), opts),
        Target::Coloring(m) => run_coupled_with(cfg, m, None, opts),
    }
}

fn run_coupled_with<M>(
    cfg: &ExperimentConfig,
    model: &M,
    dpmm: Option<&DpmmModel<f64>>,
    opts: RunOptions,
) -> Result<CoupledOutput>
where
    M: PartitionModel<Scalar = f64> + Sync,
{
    let summaries = cfg.summaries()?;
    let names = cfg.summary_names()?;
    let start = cfg.initial_partition_for(model);
    let h = summary_vector(&summaries, dpmm, &start)?;
    let pair_cfg = cfg.pair_config(opts.budget_mode);
    let seeds = derive_seeds(cfg.run.seed, cfg.run.replicates);
    let record_wall = opts.budget_mode == BudgetMode::Wall;
    let traces = Mutex::new(Vec::new());

    let results: Vec<(ChainPairRecord<f64>, WallTimeRow)> = pool(opts.workers)?.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(j, &seed)| {
                let index = j as u64;
                let mut local = Vec::new();
                let mut hook = |sweep: u64, event: TraceEvent<f64>| local.push(TraceRow { index, sweep, event });
                let trace: Option<&mut dyn FnMut(u64, TraceEvent<f64>)> = if opts.trace { Some(&mut hook) } else { None };
                let run = run_coupled_pair(model, &pair_cfg, &start, &h, seed, trace)?;
                if opts.trace {
                    traces.lock().expect("trace lock").push(local);
                }
                let record = ChainPairRecord::from_run(&run, index, seed, &names, &pair_cfg, record_wall)?;
                let wall = WallTimeRow {
                    index,
                    wall_time_s: run.wall_time_s,
                    sweeps_completed: record.sweeps_completed,
                };
                Ok((record, wall))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let censored = results.iter().filter(|(r, _)| r.censored).count();
    if censored > 0 {
        warn!("{censored} of {} pairs did not meet within the budget and are censored", results.len());
    }
    info!("ran {} coupled pairs", results.len());
    let mut traces: Vec<TraceRow> = traces.into_inner().expect("trace lock").into_iter().flatten().collect();
    traces.sort_by_key(|t| t.index);
    let (records, wall_times) = results.into_iter().unzip();
    Ok(CoupledOutput { records, wall_times, traces })
}

pub fn run_naive(cfg: &ExperimentConfig, target: &Target, budget: NaiveBudget<'_>, opts: RunOptions) -> Result<Vec<NaiveRecord>> {
    match target {
        Target::Dpmm(m) => run_naive_with(cfg, m, Some(m), budget, opts),
        Target::Coloring(m) => run_naive_with(cfg, m, None, budget, opts),
    }
}

fn run_naive_with<M>(
    cfg: &ExperimentConfig,
    model: &M,
    dpmm: Option<&DpmmModel<f64>>,
    budget: NaiveBudget<'_>,
    opts: RunOptions,
) -> Result<Vec<NaiveRecord>>
where
    M: PartitionModel<Scalar = f64> + Sync,
{
    let summaries = cfg.summaries()?;
    let names = cfg.summary_names()?;
    let start = cfg.initial_partition_for(model);
    let h = summary_vector(&summaries, dpmm, &start)?;
    // (index, sweeps, seconds) per chain
    let plan: Vec<(u64, Option<u64>, Option<f64>)> = match budget {
        NaiveBudget::Sweeps(s) => (0..cfg.run.replicates as u64).map(|j| (j, Some(s), None)).collect(),
        NaiveBudget::Matched(records) => records
            .iter()
            .map(|r| match opts.budget_mode {
                BudgetMode::Sweeps => Ok((r.index, Some(r.sweeps_completed), None)),
                BudgetMode::Wall => r
                    .wall_time_s
                    .map(|w| (r.index, None, Some(w)))
                    .ok_or_else(|| Error::Pairing(format!("coupled record {} has no wall time; rerun it in wall mode", r.index))),
            })
            .collect::<Result<_>>()?,
    };
    let max_index = plan.iter().map(|p| p.0).max().map_or(0, |m| m as usize + 1);
    let seeds = derive_seeds(cfg.run.seed ^ NAIVE_STREAM, max_index);
    let record_wall = opts.budget_mode == BudgetMode::Wall;
    pool(opts.workers)?.install(|| {
        plan.par_iter()
            .map(|&(index, sweeps, wall)| {
                let seed = seeds[index as usize];
                let run = run_single_chain(model, cfg.sampler.kind, &start, sweeps, wall, &h, seed)?;
                let mut estimates = BTreeMap::new();
                for (k, name) in names.iter().enumerate() {
                    estimates.insert(name.clone(), run.burned_in_average(k)?);
                }
                Ok(NaiveRecord {
                    index,
                    rng_seed: seed,
                    sweeps: run.sweeps,
                    wall_time_s: record_wall.then_some(run.wall_time_s),
                    estimates,
                })
            })
            .collect()
    })
}
