use rand::Rng;
use serde::Serialize;

use super::Chain;
use crate::coupling::{couple_conditionals, CouplingMatrix, CouplingSpec, Mass};
use crate::error::Result;
use crate::partition::{Candidate, IntersectionTracker};
use crate::targets::{gibbs_conditional, PartitionModel};
use crate::Real;

/// One coupled leave-out step, reported to an optional observer.
#[derive(Clone, Debug, Serialize)]
pub struct TraceEvent<T> {
    pub item: usize,
    pub candidates_x: Vec<Candidate>,
    pub candidates_y: Vec<Candidate>,
    pub coupling: CouplingMatrix<T>,
    pub chosen: (usize, usize),
}

/// Resamples every item in order `0..N` from its leave-out conditional.
pub fn single_gibbs_sweep<M: PartitionModel, R: Rng + ?Sized>(
    model: &M,
    chain: &mut Chain<M>,
    rng: &mut R,
) -> Result<()> {
    for item in 0..model.n_items() {
        chain.remove(model, item)?;
        let cond = gibbs_conditional(model, &chain.cache, &chain.clustering, item)?;
        let k = cond.inverse_cdf(M::Scalar::of(rng.random::<f64>()));
        chain.insert(model, item, cond.candidates[k])?;
    }
    chain.sweeps += 1;
    Ok(())
}

/// Coupled sweep of two chains; `tracker` must track `(x, y)` and stays in sync.
pub fn coupled_gibbs_sweep<M, R>(
    model: &M,
    spec: &CouplingSpec,
    x: &mut Chain<M>,
    y: &mut Chain<M>,
    tracker: &mut IntersectionTracker,
    rng: &mut R,
    mut trace: Option<&mut dyn FnMut(TraceEvent<M::Scalar>)>,
) -> Result<()>
where
    M: PartitionModel,
    M::Scalar: Mass,
    R: Rng + ?Sized,
{
    for item in 0..model.n_items() {
        let sx = x.remove(model, item)?;
        let sy = y.remove(model, item)?;
        tracker.remove(sx, sy);
        let px = gibbs_conditional(model, &x.cache, &x.clustering, item)?;
        let py = gibbs_conditional(model, &y.cache, &y.clustering, item)?;
        let gamma = couple_conditionals(spec, &px, &py, &x.clustering, &y.clustering, tracker)?;
        let (i, j) = gamma.cell_at(M::Scalar::of(rng.random::<f64>()));
        let tx = x.insert(model, item, px.candidates[i])?;
        let ty = y.insert(model, item, py.candidates[j])?;
        tracker.insert(tx, ty);
        if let Some(f) = trace.as_mut() {
            f(TraceEvent {
                item,
                candidates_x: px.candidates,
                candidates_y: py.candidates,
                coupling: gamma,
                chosen: (i, j),
            });
        }
    }
    x.sweeps += 1;
    y.sweeps += 1;
    Ok(())
}
