use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{coupled_gibbs_sweep, coupled_split_merge_sweep, sweep, tracker_for, Chain, SamplerKind, TraceEvent};
use crate::coupling::{CouplingSpec, Mass};
use crate::error::{Error, Result};
use crate::estimation::unbiased_estimate;
use crate::partition::Partition;
use crate::targets::PartitionModel;
use crate::Real;

/// Limits on the time spent waiting for a meeting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest allowed meeting time, in sweeps of the leading chain.
    pub max_sweeps: Option<u64>,
    /// Wall-clock limit in seconds.
    pub max_wall_s: Option<f64>,
}

impl Budget {
    fn exhausted(&self, t: u64, start: &Instant) -> bool {
        self.max_sweeps.is_some_and(|m| t >= m)
            || self
                .max_wall_s
                .is_some_and(|w| start.elapsed().as_secs_f64() >= w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub burn_in: u64,
    pub min_iters: u64,
    pub coupling: CouplingSpec,
    pub sampler: SamplerKind,
    pub budget: Budget,
    /// Coupled sweeps run from the met state to check that the chains stay equal.
    pub verify_sweeps: u64,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            burn_in: 10,
            min_iters: 100,
            coupling: CouplingSpec::default(),
            sampler: SamplerKind::Gibbs,
            budget: Budget::default(),
            verify_sweeps: 0,
        }
    }
}

/// Trajectories of one lag-1 chain pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRun<T> {
    /// First `t` with `X_t = Y_{t-1}`; `None` when censored.
    pub tau: Option<u64>,
    /// `h(X_t)` for `t = 0..`.
    pub hx: Vec<Vec<T>>,
    /// `h(Y_t)` for `t = 0..τ-1`.
    pub hy: Vec<Vec<T>>,
    pub sweeps_x: u64,
    pub sweeps_y: u64,
    pub wall_time_s: f64,
}

impl<T: Real> PairRun<T> {
    pub fn censored(&self) -> bool {
        self.tau.is_none()
    }

    /// Unbiased estimate for summary `k`.
    pub fn estimate(&self, k: usize, burn_in: u64, min_iters: u64) -> Result<T> {
        let tau = self
            .tau
            .ok_or_else(|| Error::Aggregation("censored pair has no estimate".into()))?;
        let hx: Vec<T> = self.hx.iter().map(|h| h[k]).collect();
        let hy: Vec<T> = self.hy.iter().map(|h| h[k]).collect();
        unbiased_estimate(&hx, &hy, tau, burn_in, min_iters)
    }
}

/// Runs the lag-1 coupled pair from `start` with a stream seeded by `seed`.
///
/// `X` takes one uncoupled sweep, then `(X_t, Y_{t-1})` move jointly until they meet or the
/// budget runs out. After meeting only `X` advances, until `t ≥ max(m, τ)`.
pub fn run_coupled_pair<M>(
    model: &M,
    config: &PairConfig,
    start: &Partition,
    h: &dyn Fn(&Partition) -> Vec<M::Scalar>,
    seed: u64,
    mut trace: Option<&mut dyn FnMut(u64, TraceEvent<M::Scalar>)>,
) -> Result<PairRun<M::Scalar>>
where
    M: PartitionModel,
    M::Scalar: Mass,
{
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Chain::new(model, start)?;
    let mut y = x.clone();
    let mut hx = vec![h(&x.partition())];
    let mut hy = vec![h(&y.partition())];
    sweep(model, config.sampler, &mut x, &mut rng)?;
    hx.push(h(&x.partition()));
    let mut t = 1u64;
    let mut tau = x.same_partition(&y).then_some(1);
    if tau.is_none() {
        let mut tracker = tracker_for(&x, &y)?;
        while tau.is_none() {
            if config.budget.exhausted(t, &clock) {
                return Ok(PairRun {
                    tau: None,
                    hx,
                    hy,
                    sweeps_x: x.sweeps(),
                    sweeps_y: y.sweeps(),
                    wall_time_s: clock.elapsed().as_secs_f64(),
                });
            }
            match config.sampler {
                SamplerKind::Gibbs => {
                    let mut hook = trace
                        .as_mut()
                        .map(|f| move |e: TraceEvent<M::Scalar>| f(t, e));
                    coupled_gibbs_sweep(
                        model,
                        &config.coupling,
                        &mut x,
                        &mut y,
                        &mut tracker,
                        &mut rng,
                        hook.as_mut().map(|f| f as &mut dyn FnMut(TraceEvent<M::Scalar>)),
                    )?
                }
                SamplerKind::SplitMerge => coupled_split_merge_sweep(
                    model,
                    &config.coupling,
                    &mut x,
                    &mut y,
                    &mut tracker,
                    &mut rng,
                )?,
            }
            t += 1;
            hx.push(h(&x.partition()));
            hy.push(h(&y.partition()));
            if x.same_partition(&y) {
                tau = Some(t);
            }
        }
    }
    let tau_v = tau.expect("loop exits on meeting");
    let sweeps_y = y.sweeps();
    // labels are auxiliary: the met chains continue from one shared state
    if config.verify_sweeps > 0 {
        verify_faithful(model, config, &x, seed, tau_v)?;
    }
    while t < config.min_iters.max(tau_v) {
        sweep(model, config.sampler, &mut x, &mut rng)?;
        t += 1;
        hx.push(h(&x.partition()));
    }
    Ok(PairRun {
        tau,
        hx,
        hy,
        sweeps_x: x.sweeps(),
        sweeps_y,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

fn verify_faithful<M>(model: &M, config: &PairConfig, met: &Chain<M>, seed: u64, tau: u64) -> Result<()>
where
    M: PartitionModel,
    M::Scalar: Mass,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut vx = met.clone();
    let mut vy = met.clone();
    let mut tracker = tracker_for(&vx, &vy)?;
    for s in 0..config.verify_sweeps {
        match config.sampler {
            SamplerKind::Gibbs => coupled_gibbs_sweep(
                model,
                &config.coupling,
                &mut vx,
                &mut vy,
                &mut tracker,
                &mut rng,
                None,
            )?,
            SamplerKind::SplitMerge => coupled_split_merge_sweep(
                model,
                &config.coupling,
                &mut vx,
                &mut vy,
                &mut tracker,
                &mut rng,
            )?,
        }
        if !vx.same_partition(&vy) || tracker.distance() != 0 {
            return Err(Error::FaithfulnessViolated(tau + s + 1));
        }
    }
    Ok(())
}

/// Trajectory of one uncoupled chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleChainRun<T> {
    /// `h(X_t)` for `t = 1..=sweeps`.
    pub h: Vec<Vec<T>>,
    pub sweeps: u64,
    pub wall_time_s: f64,
}

impl<T: Real> SingleChainRun<T> {
    /// Ergodic average of summary `k` after discarding the first tenth of the sweeps.
    pub fn burned_in_average(&self, k: usize) -> Result<T> {
        let n = self.h.len();
        if n == 0 {
            return Err(Error::Config("naive chain ran zero sweeps".into()));
        }
        let drop = (n / 10).min(n - 1);
        let kept = &self.h[drop..];
        let total: T = kept.iter().map(|v| v[k]).sum();
        Ok(total / T::of_usize(kept.len()))
    }
}

/// Runs one chain for `sweeps` sweeps, or until `wall_s` seconds pass (at least one sweep).
pub fn run_single_chain<M: PartitionModel>(
    model: &M,
    sampler: SamplerKind,
    start: &Partition,
    sweeps: Option<u64>,
    wall_s: Option<f64>,
    h: &dyn Fn(&Partition) -> Vec<M::Scalar>,
    seed: u64,
) -> Result<SingleChainRun<M::Scalar>> {
    if sweeps == Some(0) || (sweeps.is_none() && wall_s.is_none()) {
        return Err(Error::Config("naive chain needs a positive budget".into()));
    }
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = Chain::new(model, start)?;
    let mut out = Vec::new();
    loop {
        sweep(model, sampler, &mut chain, &mut rng)?;
        out.push(h(&chain.partition()));
        let done = match (sweeps, wall_s) {
            (Some(s), _) => chain.sweeps() >= s,
            (None, Some(w)) => clock.elapsed().as_secs_f64() >= w,
            (None, None) => unreachable!(),
        };
        if done {
            break;
        }
    }
    Ok(SingleChainRun {
        h: out,
        sweeps: chain.sweeps(),
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

/// One line of a coupled-run results file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainPairRecord<T> {
    pub index: u64,
    pub rng_seed: u64,
    pub tau: Option<u64>,
    pub censored: bool,
    /// Seconds; omitted in sweep-budget mode so files stay byte-reproducible.
    pub wall_time_s: Option<f64>,
    pub sweeps_completed: u64,
    /// Unbiased estimate per summary name; empty when censored.
    pub estimates: BTreeMap<String, T>,
}

impl<T: Real> ChainPairRecord<T> {
    pub fn from_run(
        run: &PairRun<T>,
        index: u64,
        rng_seed: u64,
        names: &[String],
        config: &PairConfig,
        record_wall: bool,
    ) -> Result<Self> {
        let mut estimates = BTreeMap::new();
        if !run.censored() {
            for (k, name) in names.iter().enumerate() {
                estimates.insert(name.clone(), run.estimate(k, config.burn_in, config.min_iters)?);
            }
        }
        Ok(ChainPairRecord {
            index,
            rng_seed,
            tau: run.tau,
            censored: run.censored(),
            wall_time_s: record_wall.then_some(run.wall_time_s),
            sweeps_completed: run.sweeps_x + run.sweeps_y,
            estimates,
        })
    }
}
