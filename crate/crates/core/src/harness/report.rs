//! Summary and survival tables built from run records.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use super::runner::NaiveRecord;
use super::truth::GroundTruth;
use crate::aggregation::{
    batch_pairs, kaplan_meier, rmse, rmse_and_loss_quantiles, sample_mean_report, trimmed_mean_report,
    AggregateMethod, AggregateReport, SurvivalCurve, TrimRule,
};
use crate::error::{Error, Result};
use crate::sampler::ChainPairRecord;

/// One line of the summary CSV.
///
/// `point`, `sem`, `lo` and `hi` average the per-batch aggregates; the loss columns compare
/// the per-batch points with the truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub summary: String,
    pub estimator: String,
    #[serde(rename = "J")]
    pub j: usize,
    pub method: String,
    pub batches: usize,
    pub point: f64,
    pub sem: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub rmse: f64,
    pub median_pct_err: Option<f64>,
    pub q20: Option<f64>,
    pub q80: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub method: String,
    pub time: f64,
    pub survival: f64,
    pub at_risk: usize,
    pub events: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateOptions<'a> {
    pub j_list: &'a [usize],
    pub trim_alpha: f64,
    pub trim_rule: TrimRule,
    /// Restrict to one summary name.
    pub summary: Option<&'a str>,
}

fn batch_report(batch: &[f64], method: AggregateMethod, rule: TrimRule) -> Result<AggregateReport<f64>> {
    if batch.len() == 1 {
        return Ok(AggregateReport {
            j: 1,
            point_estimate: batch[0],
            sem: f64::NAN,
            interval: (f64::NAN, f64::NAN),
            method,
        });
    }
    match method {
        AggregateMethod::Mean => sample_mean_report(batch),
        AggregateMethod::Trimmed(a) => trimmed_mean_report(batch, a, rule),
    }
}

fn defined(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

fn summary_row(
    summary: &str,
    estimator: &str,
    j: usize,
    reports: &[AggregateReport<f64>],
    truth: f64,
) -> Result<SummaryRow> {
    let k = reports.len() as f64;
    let points: Vec<f64> = reports.iter().map(|r| r.point_estimate).collect();
    let mean_of = |f: &dyn Fn(&AggregateReport<f64>) -> f64| reports.iter().map(f).sum::<f64>() / k;
    let loss = rmse_and_loss_quantiles(&points, truth).ok();
    Ok(SummaryRow {
        summary: summary.to_string(),
        estimator: estimator.to_string(),
        j,
        method: reports[0].method.to_string(),
        batches: reports.len(),
        point: mean_of(&|r| r.point_estimate),
        sem: defined(mean_of(&|r| r.sem)),
        lo: defined(mean_of(&|r| r.interval.0)),
        hi: defined(mean_of(&|r| r.interval.1)),
        rmse: rmse(&points, truth)?,
        median_pct_err: loss.as_ref().map(|l| l.median_pct_err),
        q20: loss.as_ref().map(|l| l.q20),
        q80: loss.as_ref().map(|l| l.q80),
    })
}

fn index_map<R>(records: &[R], index: impl Fn(&R) -> u64, what: &str) -> Result<BTreeMap<u64, usize>> {
    let mut map = BTreeMap::new();
    for (k, r) in records.iter().enumerate() {
        if map.insert(index(r), k).is_some() {
            return Err(Error::Pairing(format!("duplicate {what} index {}", index(r))));
        }
    }
    Ok(map)
}

/// Loss curves for coupled (and, when given, index-paired naive) estimates.
///
/// Censored pairs carry no estimate; their index is dropped from both series so batches
/// stay paired.
pub fn aggregate(
    coupled: &[ChainPairRecord<f64>],
    naive: Option<&[NaiveRecord]>,
    truth: &GroundTruth,
    opts: AggregateOptions<'_>,
) -> Result<Vec<SummaryRow>> {
    let cmap = index_map(coupled, |r| r.index, "coupled")?;
    let nmap = naive.map(|n| index_map(n, |r| r.index, "naive")).transpose()?;
    if let Some(nm) = &nmap {
        if nm.keys().ne(cmap.keys()) {
            return Err(Error::Pairing("coupled and naive records cover different indices".into()));
        }
    }
    let kept: Vec<u64> = cmap.iter().filter(|(_, &k)| !coupled[k].censored).map(|(&i, _)| i).collect();
    let dropped = cmap.len() - kept.len();
    if dropped > 0 {
        warn!("{dropped} censored pairs excluded from aggregation");
    }

    let names: Vec<&String> = match opts.summary {
        Some(s) => {
            let name = truth
                .values
                .keys()
                .find(|k| k.as_str() == s)
                .ok_or_else(|| Error::Aggregation(format!("no ground truth for summary {s}")))?;
            vec![name]
        }
        None => truth.values.keys().collect(),
    };
    let methods = [AggregateMethod::Mean, AggregateMethod::Trimmed(opts.trim_alpha)];
    let mut rows = Vec::new();
    for name in names {
        let h_star = truth.values[name];
        let est = |r: &ChainPairRecord<f64>| {
            r.estimates
                .get(name)
                .copied()
                .ok_or_else(|| Error::Aggregation(format!("record {} lacks summary {name}", r.index)))
        };
        let c: Vec<f64> = kept.iter().map(|i| est(&coupled[cmap[i]])).collect::<Result<_>>()?;
        let u: Option<Vec<f64>> = match (naive, &nmap) {
            (Some(n), Some(nm)) => Some(
                kept.iter()
                    .map(|i| {
                        n[nm[i]]
                            .estimates
                            .get(name)
                            .copied()
                            .ok_or_else(|| Error::Aggregation(format!("naive record {i} lacks summary {name}")))
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => None,
        };
        for &j in opts.j_list {
            if j > c.len() {
                warn!("skipping J = {j}: only {} uncensored replicates", c.len());
                continue;
            }
            let pairs = batch_pairs(&c, u.as_deref().unwrap_or(&c), j)?;
            for method in methods {
                let cr: Vec<_> = pairs.iter().map(|(a, _)| batch_report(a, method, opts.trim_rule)).collect::<Result<_>>()?;
                rows.push(summary_row(name, "coupled", j, &cr, h_star)?);
                if u.is_some() {
                    let ur: Vec<_> = pairs.iter().map(|(_, b)| batch_report(b, method, opts.trim_rule)).collect::<Result<_>>()?;
                    rows.push(summary_row(name, "naive", j, &ur, h_star)?);
                }
            }
        }
    }
    Ok(rows)
}

/// Meeting time of a pair, or the last sweep reached before censoring.
pub fn survival_time(record: &ChainPairRecord<f64>) -> u64 {
    // before meeting the leading chain is one sweep ahead: sweeps_completed = 2t − 1
    record.tau.unwrap_or(record.sweeps_completed.div_ceil(2))
}

pub type NamedCurve = (String, SurvivalCurve);

/// Kaplan–Meier curves per method, evaluated on the union of all observed times.
pub fn survival_table(inputs: &[(String, Vec<ChainPairRecord<f64>>)]) -> Result<(Vec<SurvivalRow>, Vec<NamedCurve>)> {
    let mut curves = Vec::new();
    let mut axis = BTreeSet::new();
    for (method, records) in inputs {
        let times: Vec<f64> = records.iter().map(|r| survival_time(r) as f64).collect();
        let cens: Vec<bool> = records.iter().map(|r| r.censored).collect();
        let curve = kaplan_meier(&times, &cens)?;
        axis.extend(curve.times.iter().map(|&t| t as u64));
        curves.push((method.clone(), curve));
    }
    let mut rows = Vec::new();
    for (method, curve) in &curves {
        for &t in &axis {
            let t = t as f64;
            rows.push(SurvivalRow {
                method: method.clone(),
                time: t,
                survival: curve.at(t),
                at_risk: curve.at_risk_at(t),
                events: curve.events_at(t),
            });
        }
    }
    Ok((rows, curves))
}
