//! Summary functions of a partition and the bias-corrected lag-1 estimator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::targets::DpmmModel;
use crate::Real;

/// A real-valued function of a partition. Items are zero-based; text forms are one-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SummaryFunction {
    /// Largest block size over N.
    Lcp,
    /// Indicator that two items share a block.
    CoCluster(usize, usize),
    NumClusters,
    /// Posterior predictive density at a point; needs a DPMM target.
    PredictiveDensity(Vec<f64>),
}

impl SummaryFunction {
    pub fn needs_dpmm(&self) -> bool {
        matches!(self, SummaryFunction::PredictiveDensity(_))
    }

    /// Evaluates the summary; `dpmm` is required for predictive densities.
    pub fn evaluate<T: Real>(&self, partition: &Partition, dpmm: Option<&DpmmModel<T>>) -> Result<T> {
        match self {
            SummaryFunction::Lcp => Ok(h_lcp(partition)),
            SummaryFunction::CoCluster(a, b) => h_cocluster(partition, *a, *b),
            SummaryFunction::NumClusters => Ok(T::of_usize(partition.n_blocks())),
            SummaryFunction::PredictiveDensity(x) => {
                let model = dpmm.ok_or_else(|| {
                    Error::Config("predictive density needs a DPMM target".into())
                })?;
                if x.len() != model.dim() {
                    return Err(Error::Dimension {
                        expected: model.dim(),
                        found: x.len(),
                    });
                }
                let x: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
                Ok(model.predictive_density(partition, &x))
            }
        }
    }
}

impl fmt::Display for SummaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummaryFunction::Lcp => f.write_str("lcp"),
            SummaryFunction::CoCluster(a, b) => write!(f, "cc({},{})", a + 1, b + 1),
            SummaryFunction::NumClusters => f.write_str("nclusters"),
            SummaryFunction::PredictiveDensity(x) => {
                let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                write!(f, "pred({})", parts.join(","))
            }
        }
    }
}

impl FromStr for SummaryFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unknown summary '{s}'"));
        match s {
            "lcp" => return Ok(SummaryFunction::Lcp),
            "nclusters" => return Ok(SummaryFunction::NumClusters),
            _ => {}
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        match head {
            "cc" => {
                let idx: Vec<usize> = args
                    .split(',')
                    .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                match idx.as_slice() {
                    [a, b] if *a >= 1 && *b >= 1 && a != b => {
                        Ok(SummaryFunction::CoCluster(a - 1, b - 1))
                    }
                    _ => Err(bad()),
                }
            }
            "pred" => {
                let x: Vec<f64> = args
                    .split(',')
                    .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                Ok(SummaryFunction::PredictiveDensity(x))
            }
            _ => Err(bad()),
        }
    }
}

/// Proportion of items in the largest block.
pub fn h_lcp<T: Real>(partition: &Partition) -> T {
    let max = partition.blocks().iter().map(Vec::len).max().unwrap_or(0);
    T::of_usize(max) / T::of_usize(partition.n_items().max(1))
}

pub fn h_cocluster<T: Real>(partition: &Partition, a: usize, b: usize) -> Result<T> {
    let n = partition.n_items();
    for i in [a, b] {
        if i >= n {
            return Err(Error::ItemOutOfRange { item: i, n_items: n });
        }
    }
    Ok(if partition.co_clustered(a, b) {
        T::one()
    } else {
        T::zero()
    })
}

/// Lag-1 unbiased estimate from `h(X_t)` and `h(Y_t)`.
///
/// `(m−ℓ+1)⁻¹ Σ_{t=ℓ}^{m} h(X_t) + Σ_{t=ℓ+1}^{τ−1} min(1, (t−ℓ)/(m−ℓ+1)) (h(X_t) − h(Y_{t−1}))`.
pub fn unbiased_estimate<T: Real>(hx: &[T], hy: &[T], tau: u64, burn_in: u64, min_iters: u64) -> Result<T> {
    if min_iters < burn_in {
        return Err(Error::Config(format!(
            "min_iters {min_iters} is below burn_in {burn_in}"
        )));
    }
    let (l, m, tau) = (burn_in as usize, min_iters as usize, tau as usize);
    let x_needed = m.max(tau.saturating_sub(1));
    if hx.len() <= x_needed {
        return Err(Error::TrajectoryTooShort {
            needed: x_needed,
            have: hx.len(),
        });
    }
    if tau >= l + 2 && hy.len() < tau - 1 {
        return Err(Error::TrajectoryTooShort {
            needed: tau - 2,
            have: hy.len(),
        });
    }
    let span = T::of_usize(m - l + 1);
    let base = hx[l..=m].iter().copied().sum::<T>() / span;
    let mut correction = T::zero();
    for t in (l + 1)..tau {
        let w = (T::of_usize(t - l) / span).min(T::one());
        correction = correction + w * (hx[t] - hy[t - 1]);
    }
    Ok(base + correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::test_util::p1;
    use crate::partition::all_partitions;
    use crate::targets::PartitionModel;
    use proptest::prelude::*;

    #[test]
    fn summary_values() {
        let p = p1(4, &[&[1, 2, 3], &[4]]);
        assert_eq!(h_lcp::<f64>(&p), 0.75);
        assert_eq!(h_lcp::<f64>(&Partition::singletons(4)), 0.25);
        assert_eq!(h_lcp::<f64>(&Partition::one_block(4)), 1.0);
        let q = p1(3, &[&[1, 2], &[3]]);
        assert_eq!(h_cocluster::<f64>(&q, 0, 1).unwrap(), 1.0);
        assert_eq!(h_cocluster::<f64>(&q, 0, 2).unwrap(), 0.0);
        assert!(h_cocluster::<f64>(&q, 0, 3).is_err());
    }

    #[test]
    fn summary_text_round_trip() {
        for s in ["lcp", "nclusters", "cc(1,3)", "pred(0.5)", "pred(1,-2.5)"] {
            let f: SummaryFunction = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert_eq!("cc(1,2)".parse::<SummaryFunction>().unwrap(), SummaryFunction::CoCluster(0, 1));
        for bad in ["cc(1,1)", "cc(0,2)", "foo", "pred()", "cc(1)"] {
            assert!(bad.parse::<SummaryFunction>().is_err(), "{bad}");
        }
    }

    #[test]
    fn hand_evaluated_estimate() {
        let hx = [1.0, 2.0, 3.0, 4.0];
        let hy = [5.0, 7.0, 9.0];
        assert_eq!(unbiased_estimate(&hx, &hy, 3, 0, 1).unwrap(), -4.0);
    }

    #[test]
    fn early_meeting_is_plain_average() {
        let hx: [f64; 5] = [0.3, 0.1, 0.7, 0.2, 0.9];
        let plain: f64 = (0.1 + 0.7 + 0.2 + 0.9) / 4.0;
        for tau in [1, 2] {
            let e = unbiased_estimate(&hx, &[], tau, 1, 4).unwrap();
            assert_eq!(e.to_bits(), plain.to_bits());
        }
    }

    #[test]
    fn short_trajectories_rejected() {
        assert!(matches!(
            unbiased_estimate(&[1.0, 2.0], &[1.0], 2, 0, 3),
            Err(Error::TrajectoryTooShort { .. })
        ));
        assert!(unbiased_estimate(&[1.0; 10], &[1.0], 6, 0, 3).is_err());
        assert!(unbiased_estimate(&[1.0; 10], &[1.0; 10], 2, 4, 3).is_err());
    }

    #[test]
    fn cocluster_expectation_by_enumeration() {
        let w = [-1.0, -0.8, 0.9, 1.1];
        let m = DpmmModel::isotropic(1.0, 0.0, 1.0, 0.5, w.iter().map(|&x| vec![x]).collect()).unwrap();
        let parts: Vec<Partition> = all_partitions(4).collect();
        let lp: Vec<f64> = parts.iter().map(|p| m.log_pmf(p)).collect();
        let mx = lp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = lp.iter().map(|l| (l - mx).exp()).sum();
        let via_summary: f64 = parts
            .iter()
            .zip(&lp)
            .map(|(p, l)| (l - mx).exp() / z * SummaryFunction::CoCluster(0, 1).evaluate(p, Some(&m)).unwrap())
            .sum();
        let direct: f64 = parts
            .iter()
            .zip(&lp)
            .filter(|(p, _)| p.block_of(0) == p.block_of(1))
            .map(|(_, l)| (l - mx).exp() / z)
            .sum();
        assert!((via_summary - direct).abs() < 1e-14);
        assert!(direct > 0.5);
    }

    proptest! {
        #[test]
        fn constant_summary_gives_constant(c in -5.0f64..5.0, tau in 1u64..12, l in 0u64..4, extra in 0u64..6) {
            let m = l + extra;
            let n = (m.max(tau) + 1) as usize;
            let e = unbiased_estimate(&vec![c; n], &vec![c; n], tau, l, m).unwrap();
            prop_assert!((e - c).abs() < 1e-12);
        }

        #[test]
        fn estimate_is_linear(
            h1 in proptest::collection::vec(-3.0f64..3.0, 30),
            h2 in proptest::collection::vec(-3.0f64..3.0, 30),
            tau in 1u64..20, l in 0u64..5, extra in 0u64..8,
        ) {
            let m = l + extra;
            let (x1, y1) = h1.split_at(15);
            let (x2, y2) = h2.split_at(15);
            let xs: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + b).collect();
            let ys: Vec<f64> = y1.iter().zip(y2).map(|(a, b)| a + b).collect();
            let tau = tau.min(14);
            let sum = unbiased_estimate(&xs, &ys, tau, l, m).unwrap();
            let parts = unbiased_estimate(x1, y1, tau, l, m).unwrap() + unbiased_estimate(x2, y2, tau, l, m).unwrap();
            prop_assert!((sum - parts).abs() < 1e-10);
        }
    }
}
