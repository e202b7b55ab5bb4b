use super::Partition;
use crate::error::{Error, Result};
use crate::Real;

/// Block-overlap table `|A ∩ B|` over the items assigned in both partitions.
fn overlaps(x: &Partition, y: &Partition) -> Result<Vec<Vec<u64>>> {
    if x.n_items() != y.n_items() {
        return Err(Error::MismatchedItems(x.n_items(), y.n_items()));
    }
    let mut table = vec![vec![0u64; y.n_blocks()]; x.n_blocks()];
    for (a, block) in x.blocks().iter().enumerate() {
        for &i in block {
            let b = y
                .block_of(i)
                .ok_or(Error::MismatchedItems(x.n_assigned(), y.n_assigned()))?;
            table[a][b] += 1;
        }
    }
    if x.n_assigned() != y.n_assigned() {
        return Err(Error::MismatchedItems(x.n_assigned(), y.n_assigned()));
    }
    Ok(table)
}

/// Mirkin/Rand distance `Σ|A|² + Σ|B|² − 2Σ|A∩B|²`.
pub fn pair_distance(x: &Partition, y: &Partition) -> Result<u64> {
    let table = overlaps(x, y)?;
    let sq = |p: &Partition| p.blocks().iter().map(|b| (b.len() as u64).pow(2)).sum::<u64>();
    let cross: u64 = table.iter().flatten().map(|&c| c * c).sum();
    Ok(sq(x) + sq(y) - 2 * cross)
}

/// Variation of information `H(X) + H(Y) − 2 I(X, Y)`, natural log.
pub fn vi_distance<T: Real>(x: &Partition, y: &Partition) -> Result<T> {
    let table = overlaps(x, y)?;
    let n = x.n_assigned();
    if n == 0 {
        return Ok(T::zero());
    }
    let n = T::of_usize(n);
    let plogp = |c: usize| -> T {
        if c == 0 {
            T::zero()
        } else {
            let p = T::of_usize(c) / n;
            p * p.ln()
        }
    };
    let hx: T = x.blocks().iter().map(|b| -plogp(b.len())).sum();
    let hy: T = y.blocks().iter().map(|b| -plogp(b.len())).sum();
    let hxy: T = table.iter().flatten().map(|&c| -plogp(c as usize)).sum();
    // H(X) + H(Y) − 2I = 2H(X,Y) − H(X) − H(Y)
    let vi = T::of(2.0) * hxy - hx - hy;
    Ok(vi.max(T::zero()))
}
