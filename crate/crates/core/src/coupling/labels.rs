use super::{check_distribution, CouplingMatrix, Mass};
use crate::error::{Error, Result};
use crate::Real;

fn same_universe<T>(p: &[T], q: &[T]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(())
}

/// Maximal coupling of two label distributions: `min(p, q)` on the diagonal and the
/// normalized residual outer product elsewhere, so `P(equal) = 1 − TV(p, q)`.
pub fn maximal_label_coupling<T: Real + Mass>(p: &[T], q: &[T]) -> Result<CouplingMatrix<T>> {
    same_universe(p, q)?;
    check_distribution(p)?;
    check_distribution(q)?;
    let l = p.len();
    let overlap: Vec<T> = p.iter().zip(q).map(|(&a, &b)| a.min(b)).collect();
    let rp: Vec<T> = p.iter().zip(&overlap).map(|(&a, &o)| a - o).collect();
    let rq: Vec<T> = q.iter().zip(&overlap).map(|(&b, &o)| b - o).collect();
    let tv: T = rp.iter().copied().sum();
    let mut mass = vec![T::zero(); l * l];
    for k in 0..l {
        mass[k * l + k] = overlap[k];
    }
    if tv > T::zero() {
        for i in 0..l {
            for j in 0..l {
                mass[i * l + j] = mass[i * l + j] + rp[i] * rq[j] / tv;
            }
        }
    }
    Ok(CouplingMatrix::from_vec(l, l, mass))
}

/// Both labels drawn by inverse CDF (ascending label order) from one shared uniform.
pub fn common_rng_label_coupling<T: Real>(p: &[T], q: &[T], u: T) -> (usize, usize) {
    (inverse_cdf(p, u), inverse_cdf(q, u))
}

fn inverse_cdf<T: Real>(p: &[T], u: T) -> usize {
    let mut acc = T::zero();
    let mut last = 0;
    for (k, &w) in p.iter().enumerate() {
        if w > T::zero() {
            acc = acc + w;
            last = k;
            if u < acc {
                return k;
            }
        }
    }
    last
}

/// Joint law of [`common_rng_label_coupling`] over a uniform `u`: the comonotone coupling.
pub fn common_rng_joint<T: Real + Mass>(p: &[T], q: &[T]) -> Result<CouplingMatrix<T>> {
    same_universe(p, q)?;
    check_distribution(p)?;
    check_distribution(q)?;
    let l = p.len();
    let mut mass = vec![T::zero(); l * l];
    // sweep both CDFs over [0, 1) and record the overlap of every pair of intervals
    let (mut i, mut j) = (0, 0);
    let (mut ci, mut cj) = (p[0], q[0]);
    let mut prev = T::zero();
    loop {
        let next = ci.min(cj);
        if next > prev {
            mass[i * l + j] = mass[i * l + j] + (next - prev);
            prev = next;
        }
        let adv_i = ci <= cj;
        let adv_j = cj <= ci;
        if adv_i {
            i += 1;
        }
        if adv_j {
            j += 1;
        }
        if i >= l || j >= l {
            break;
        }
        if adv_i {
            ci = ci + p[i];
        }
        if adv_j {
            cj = cj + q[j];
        }
    }
    Ok(CouplingMatrix::from_vec(l, l, mass))
}
