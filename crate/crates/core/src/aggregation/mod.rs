//! Combining per-processor estimates: mean with SEM, trimmed means, batching, losses, survival.

mod survival;

use std::fmt;

use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

pub use survival::{kaplan_meier, SurvivalCurve};

/// Which observations a trimmed mean keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrimRule {
    /// Drop `ceil(αJ)` order statistics from each tail.
    #[default]
    PerTailCount,
    /// Keep observations between the α and 1−α sample quantiles, inclusive.
    QuantileInclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "alpha")]
pub enum AggregateMethod {
    Mean,
    Trimmed(f64),
}

impl fmt::Display for AggregateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregateMethod::Mean => write!(f, "mean"),
            AggregateMethod::Trimmed(a) => write!(f, "trimmed({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport<T> {
    pub j: usize,
    pub point_estimate: T,
    pub sem: T,
    pub interval: (T, T),
    pub method: AggregateMethod,
}

/// `sqrt(Var/(J−1))` with the population variance `Var`.
fn sem_of<T: Real>(values: &[T], mean: T) -> T {
    let n = T::of_usize(values.len());
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (var / (n - T::one())).sqrt()
}

fn mean_of<T: Real>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::of_usize(values.len())
}

/// Sample mean with its standard error and a ±2 SEM interval.
pub fn sample_mean_report<T: Real>(values: &[T]) -> Result<AggregateReport<T>> {
    if values.len() < 2 {
        return Err(Error::Aggregation(format!(
            "standard error needs at least 2 values, got {}",
            values.len()
        )));
    }
    let mean = mean_of(values);
    let sem = sem_of(values, mean);
    let two = T::of(2.0);
    Ok(AggregateReport {
        j: values.len(),
        point_estimate: mean,
        sem,
        interval: (mean - two * sem, mean + two * sem),
        method: AggregateMethod::Mean,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::Aggregation(format!("trim fraction {alpha} outside [0, 0.5)")));
    }
    Ok(())
}

/// Per-tail trim count `ceil(αJ)`, robust to `αJ` landing a rounding error above an integer.
pub fn trim_count(alpha: f64, j: usize) -> usize {
    let x = alpha * j as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

fn sorted<T: Clone + PartialOrd>(values: &[T]) -> Result<Vec<T>> {
    let mut v = values.to_vec();
    if v.iter().any(|x| x.partial_cmp(x).is_none()) {
        return Err(Error::Aggregation("cannot order NaN values".into()));
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    Ok(v)
}

/// The order statistics that survive trimming, ascending.
fn survivors<T: Real>(values: &[T], alpha: f64, rule: TrimRule) -> Result<Vec<T>> {
    check_alpha(alpha)?;
    let v = sorted(values)?;
    let kept: Vec<T> = match rule {
        TrimRule::PerTailCount => {
            let k = trim_count(alpha, v.len());
            if 2 * k >= v.len() {
                Vec::new()
            } else {
                v[k..v.len() - k].to_vec()
            }
        }
        TrimRule::QuantileInclusive => {
            if v.is_empty() {
                Vec::new()
            } else {
                let lo = quantile_sorted(&v, T::of(alpha));
                let hi = quantile_sorted(&v, T::of(1.0 - alpha));
                v.into_iter().filter(|&x| lo <= x && x <= hi).collect()
            }
        }
    };
    if kept.is_empty() {
        return Err(Error::Aggregation(format!(
            "no values survive trimming {} values at α = {alpha}",
            values.len()
        )));
    }
    Ok(kept)
}

/// Mean after dropping `ceil(αJ)` order statistics from each tail.
///
/// Works for any ordered field, which makes exact arithmetic available for checks.
pub fn trimmed_mean<T>(values: &[T], alpha: f64) -> Result<T>
where
    T: Clone + PartialOrd + Num + FromPrimitive,
{
    check_alpha(alpha)?;
    let v = sorted(values)?;
    let k = trim_count(alpha, v.len());
    if 2 * k >= v.len() {
        return Err(Error::Aggregation(format!(
            "no values survive trimming {} values at α = {alpha}",
            values.len()
        )));
    }
    let kept = &v[k..v.len() - k];
    let sum = kept.iter().cloned().fold(T::zero(), |a, b| a + b);
    let n = T::from_usize(kept.len()).ok_or_else(|| Error::Aggregation("count overflow".into()))?;
    Ok(sum / n)
}

/// Trimmed mean under either convention.
pub fn trimmed_mean_with<T: Real>(values: &[T], alpha: f64, rule: TrimRule) -> Result<T> {
    Ok(mean_of(&survivors(values, alpha, rule)?))
}

/// Trimmed mean report; the SEM is that of the surviving observations.
pub fn trimmed_mean_report<T: Real>(values: &[T], alpha: f64, rule: TrimRule) -> Result<AggregateReport<T>> {
    let kept = survivors(values, alpha, rule)?;
    let point = mean_of(&kept);
    let sem = if kept.len() >= 2 { sem_of(&kept, point) } else { T::nan() };
    let two = T::of(2.0);
    Ok(AggregateReport {
        j: values.len(),
        point_estimate: point,
        sem,
        interval: (point - two * sem, point + two * sem),
        method: AggregateMethod::Trimmed(alpha),
    })
}

/// Consecutive disjoint batches of size `j`; a short trailing batch is dropped.
pub fn batch_replicates<T>(estimates: &[T], j: usize) -> Result<Vec<&[T]>> {
    if j == 0 {
        return Err(Error::Aggregation("batch size must be positive".into()));
    }
    if estimates.len() < j {
        return Err(Error::Aggregation(format!(
            "{} replicates cannot fill a batch of {j}",
            estimates.len()
        )));
    }
    Ok(estimates.chunks_exact(j).collect())
}

/// Batches two index-aligned series over identical index ranges.
pub fn batch_pairs<'a, T>(a: &'a [T], b: &'a [T], j: usize) -> Result<Vec<(&'a [T], &'a [T])>> {
    if a.len() != b.len() {
        return Err(Error::Pairing(format!("series lengths differ: {} vs {}", a.len(), b.len())));
    }
    Ok(batch_replicates(a, j)?.into_iter().zip(batch_replicates(b, j)?).collect())
}

/// Type-7 (linear interpolation) quantile of ascending data.
pub fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> T {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = T::of_usize(n - 1) * q;
    let lo = h.floor().to_usize().unwrap_or(0).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - T::of_usize(lo)) * (sorted[hi] - sorted[lo])
}

/// Error summary of replicated aggregates against a known truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSummary<T> {
    pub rmse: T,
    /// `100·sqrt(median squared error)/|truth|`.
    pub median_pct_err: T,
    /// The same transform of the 20% and 80% quantiles of the squared error.
    pub q20: T,
    pub q80: T,
}

pub fn rmse<T: Real>(aggregates: &[T], truth: T) -> Result<T> {
    if aggregates.is_empty() {
        return Err(Error::Aggregation("no aggregates".into()));
    }
    let sq: Vec<T> = aggregates.iter().map(|&a| (a - truth) * (a - truth)).collect();
    Ok(mean_of(&sq).sqrt())
}

pub fn rmse_and_loss_quantiles<T: Real>(aggregates: &[T], truth: T) -> Result<LossSummary<T>> {
    let rmse = rmse(aggregates, truth)?;
    if truth == T::zero() {
        return Err(Error::Aggregation("percentage error undefined for zero truth".into()));
    }
    let sq = sorted(&aggregates.iter().map(|&a| (a - truth) * (a - truth)).collect::<Vec<_>>())?;
    let pct = |q: f64| T::of(100.0) * quantile_sorted(&sq, T::of(q)).sqrt() / truth.abs();
    Ok(LossSummary {
        rmse,
        median_pct_err: pct(0.5),
        q20: pct(0.2),
        q80: pct(0.8),
    })
}

#[cfg(test)]
mod tests;
