//! Restricted-Gibbs split-merge moves.
//!
//! For a pair `(i, j)` let `S` be the other members of their blocks. The launch state puts
//! `i` and `j` in separate blocks and assigns each `k ∈ S` to one of them uniformly, then
//! runs a few restricted Gibbs scans over `S` in ascending order. A split is proposed by
//! one more scan from the launch state; a merge is proposed deterministically, with the
//! reverse-move probability of the original split evaluated from the launch state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{coupled_gibbs_sweep, single_gibbs_sweep, Chain};
use crate::coupling::{CouplingSpec, Mass};
use crate::error::{Error, Result};
use crate::partition::{Candidate, IntersectionTracker};
use crate::targets::{normalize_log_weights, PartitionModel};
use crate::Real;
use num_traits::{Float, Zero};

/// Intermediate restricted scans before the final one.
pub const INTERMEDIATE_SCANS: usize = 5;

fn block_members<M: PartitionModel>(chain: &Chain<M>, slot: usize) -> Vec<usize> {
    chain.clustering.members(slot).collect()
}

/// Reassigns `k` between the blocks of `i` and `j`. With `forced`, the move goes to that
/// block; otherwise it is sampled. Returns the log probability of the chosen side.
fn restricted_step<M: PartitionModel, R: Rng + ?Sized>(
    model: &M,
    chain: &mut Chain<M>,
    k: usize,
    anchors: (usize, usize),
    forced: Option<bool>,
    rng: &mut R,
) -> Result<M::Scalar> {
    chain.remove(model, k)?;
    let a = chain.clustering.slot_of(anchors.0).expect("anchor assigned");
    let b = chain.clustering.slot_of(anchors.1).expect("anchor assigned");
    let cands = [Candidate::Join(a), Candidate::Join(b)];
    let lw = model.log_weights(&chain.cache, &chain.clustering, k, &cands);
    let cond = normalize_log_weights(k, &cands, &lw)?;
    let prob_of = |c: Candidate| {
        cond.candidates
            .iter()
            .position(|&x| x == c)
            .map_or(M::Scalar::zero(), |p| cond.probs[p])
    };
    let to_j = match forced {
        Some(side) => side,
        None => {
            let u = M::Scalar::of(rng.random::<f64>());
            cond.candidates[cond.inverse_cdf(u)] == Candidate::Join(b)
        }
    };
    let target = if to_j { cands[1] } else { cands[0] };
    chain.insert(model, k, target)?;
    Ok(prob_of(target).ln())
}

fn log_blocks<M: PartitionModel>(model: &M, chain: &Chain<M>, slots: &[usize]) -> M::Scalar {
    slots.iter().fold(M::Scalar::zero(), |acc, &s| {
        acc + model.log_block_term(&block_members(chain, s))
    })
}

/// One Metropolis–Hastings split-merge move for the pair `(i, j)`.
///
/// Scan randomness comes from `scan_rng`; `u_accept` is the acceptance uniform. Returns
/// whether the proposal was accepted.
pub fn split_merge_move<M: PartitionModel, R: Rng + ?Sized>(
    model: &M,
    chain: &mut Chain<M>,
    i: usize,
    j: usize,
    scan_rng: &mut R,
    u_accept: f64,
) -> Result<bool> {
    if i == j {
        return Err(Error::InvalidBlock(i));
    }
    let si = chain.clustering.slot_of(i).ok_or(Error::ItemAbsent(i))?;
    let sj = chain.clustering.slot_of(j).ok_or(Error::ItemAbsent(j))?;
    let together = si == sj;
    let mut others: Vec<usize> = chain
        .clustering
        .members(si)
        .chain(if together { None } else { Some(chain.clustering.members(sj)) }.into_iter().flatten())
        .filter(|&k| k != i && k != j)
        .collect();
    others.sort_unstable();
    let k_blocks = chain.clustering.n_blocks();

    // launch state
    let mut launch = chain.clone();
    if together {
        launch.remove(model, j)?;
        launch.insert(model, j, Candidate::New)?;
    }
    for &k in &others {
        let to_j = scan_rng.random::<bool>();
        let target = launch
            .clustering
            .slot_of(if to_j { j } else { i })
            .expect("anchor assigned");
        if launch.clustering.slot_of(k) != Some(target) {
            launch.remove(model, k)?;
            launch.insert(model, k, Candidate::Join(target))?;
        }
    }
    for _ in 0..INTERMEDIATE_SCANS {
        for &k in &others {
            restricted_step(model, &mut launch, k, (i, j), None, scan_rng)?;
        }
    }

    let zero = M::Scalar::zero();
    let log_u = M::Scalar::of(u_accept.ln());
    if together {
        let mut log_q = zero;
        for &k in &others {
            log_q = log_q + restricted_step(model, &mut launch, k, (i, j), None, scan_rng)?;
        }
        let (a, b) = (
            launch.clustering.slot_of(i).expect("assigned"),
            launch.clustering.slot_of(j).expect("assigned"),
        );
        let log_ratio = model.log_count_term(k_blocks + 1) - model.log_count_term(k_blocks)
            + log_blocks(model, &launch, &[a, b])
            - log_blocks(model, chain, &[si]);
        if log_u < log_ratio - log_q {
            *chain = launch;
            return Ok(true);
        }
        Ok(false)
    } else {
        // probability of recovering the current split from the launch state
        let mut log_q = zero;
        for &k in &others {
            let with_j = chain.clustering.slot_of(k) == Some(sj);
            log_q = log_q + restricted_step(model, &mut launch, k, (i, j), Some(with_j), scan_rng)?;
        }
        let mut merged = chain.clone();
        for k in block_members(chain, sj) {
            merged.remove(model, k)?;
            merged.insert(model, k, Candidate::Join(si))?;
        }
        let log_ratio = model.log_count_term(k_blocks - 1) - model.log_count_term(k_blocks)
            + log_blocks(model, &merged, &[si])
            - log_blocks(model, chain, &[si, sj]);
        if log_u < log_ratio + log_q {
            *chain = merged;
            return Ok(true);
        }
        Ok(false)
    }
}

/// Uniform ordered pair of distinct items.
fn draw_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// One split-merge proposal followed by a Gibbs sweep.
pub fn split_merge_sweep<M: PartitionModel, R: Rng + ?Sized>(
    model: &M,
    chain: &mut Chain<M>,
    rng: &mut R,
) -> Result<()> {
    let n = model.n_items();
    if n >= 2 {
        let (i, j) = draw_pair(n, rng);
        let u = rng.random::<f64>();
        let mut scan = ChaCha8Rng::seed_from_u64(rng.random());
        split_merge_move(model, chain, i, j, &mut scan, u)?;
    }
    single_gibbs_sweep(model, chain, rng)
}

/// Coupled split-merge sweep: the pair `(i, j)`, the acceptance uniform and the restricted
/// scan stream are shared, followed by a coupled Gibbs sweep.
pub fn coupled_split_merge_sweep<M, R>(
    model: &M,
    spec: &CouplingSpec,
    x: &mut Chain<M>,
    y: &mut Chain<M>,
    tracker: &mut IntersectionTracker,
    rng: &mut R,
) -> Result<()>
where
    M: PartitionModel,
    M::Scalar: Mass,
    R: Rng + ?Sized,
{
    let n = model.n_items();
    if n >= 2 {
        let (i, j) = draw_pair(n, rng);
        let u = rng.random::<f64>();
        let scan_seed: u64 = rng.random();
        if tracker.distance() == 0 {
            split_merge_move(model, x, i, j, &mut ChaCha8Rng::seed_from_u64(scan_seed), u)?;
            let sweeps = y.sweeps;
            *y = x.clone();
            y.sweeps = sweeps;
        } else {
            split_merge_move(model, x, i, j, &mut ChaCha8Rng::seed_from_u64(scan_seed), u)?;
            split_merge_move(model, y, i, j, &mut ChaCha8Rng::seed_from_u64(scan_seed), u)?;
        }
        *tracker = IntersectionTracker::new(&x.clustering, &y.clustering)?;
    }
    coupled_gibbs_sweep(model, spec, x, y, tracker, rng, None)
}
