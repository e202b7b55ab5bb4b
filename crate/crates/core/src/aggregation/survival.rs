use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Product-limit estimate of `Pr(τ > t)` as a right-continuous step function.
///
/// One row per distinct observed time, censor-only times included; survival only drops at
/// times with events.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
    pub censored: Vec<usize>,
}

impl SurvivalCurve {
    /// `S(t)`: 1 before the first time, then the value at the last time not exceeding `t`.
    pub fn at(&self, t: f64) -> f64 {
        match self.times.partition_point(|&x| x <= t) {
            0 => 1.0,
            k => self.survival[k - 1],
        }
    }

    /// Number still at risk at `t` (durations not below `t`).
    pub fn at_risk_at(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&x| x < t);
        match self.at_risk.get(k) {
            Some(&n) => n,
            None => 0,
        }
    }

    pub fn events_at(&self, t: f64) -> usize {
        self.times
            .iter()
            .position(|&x| x == t)
            .map_or(0, |k| self.events[k])
    }

    /// Median survival time: the first time with `S(t) ≤ 1/2`, if reached.
    pub fn median(&self) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.survival)
            .find(|(_, &s)| s <= 0.5)
            .map(|(&t, _)| t)
    }
}

/// Kaplan–Meier estimate; `censored[i]` marks durations known only as lower bounds.
///
/// Events and censorings at the same time are processed together, censorings counted at risk.
/// Between censorings the product telescopes to a ratio of risk-set sizes, which is what is
/// evaluated, so an uncensored sample reproduces the empirical survival function exactly.
pub fn kaplan_meier(durations: &[f64], censored: &[bool]) -> Result<SurvivalCurve> {
    if durations.len() != censored.len() {
        return Err(Error::Dimension { expected: durations.len(), found: censored.len() });
    }
    if let Some(d) = durations.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::Aggregation(format!("durations must be positive, found {d}")));
    }
    let mut obs: Vec<(f64, bool)> = durations.iter().copied().zip(censored.iter().copied()).collect();
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut curve = SurvivalCurve {
        times: Vec::new(),
        survival: Vec::new(),
        at_risk: Vec::new(),
        events: Vec::new(),
        censored: Vec::new(),
    };
    let mut s = 1.0;
    let (mut base, mut segment_start) = (1.0, obs.len());
    let mut remaining = obs.len();
    let mut i = 0;
    while i < obs.len() {
        let t = obs[i].0;
        let (mut d, mut c) = (0, 0);
        while i < obs.len() && obs[i].0 == t {
            if obs[i].1 {
                c += 1;
            } else {
                d += 1;
            }
            i += 1;
        }
        if d > 0 {
            s = base * ((remaining - d) as f64 / segment_start as f64);
        }
        curve.times.push(t);
        curve.survival.push(s);
        curve.at_risk.push(remaining);
        curve.events.push(d);
        curve.censored.push(c);
        remaining -= d + c;
        if c > 0 {
            base = s;
            segment_start = remaining;
        }
    }
    Ok(curve)
}
