use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::*;
use crate::Rational;

#[test]
fn mean_report_hand_values() {
    let r = sample_mean_report(&[1.0, 1.0, 1.0, 1.0]).unwrap();
    assert_eq!((r.point_estimate, r.sem), (1.0, 0.0));
    let r = sample_mean_report(&[0.0, 2.0]).unwrap();
    assert_eq!((r.point_estimate, r.sem, r.interval), (1.0, 1.0, (-1.0, 3.0)));
    assert_eq!(r.j, 2);
    assert!(sample_mean_report(&[1.0]).is_err());
    assert!(sample_mean_report::<f64>(&[]).is_err());
}

#[test]
fn zero_trim_is_the_mean() {
    let v = [0.3, -1.2, 4.5, 2.25, 0.0];
    let r = sample_mean_report(&v).unwrap();
    assert_eq!(trimmed_mean(&v, 0.0).unwrap(), r.point_estimate);
    let t = trimmed_mean_report(&v, 0.0, TrimRule::PerTailCount).unwrap();
    assert_eq!((t.point_estimate, t.sem), (r.point_estimate, r.sem));
}

#[test]
fn trimmed_mean_hand_values() {
    assert_eq!(trimmed_mean(&[1.0, 2.0, 3.0, 4.0, 100.0], 0.2).unwrap(), 3.0);
    assert_eq!(trimmed_mean(&[100.0, 4.0, 1.0, 3.0, 2.0], 0.2).unwrap(), 3.0);
    assert_eq!(trimmed_mean(&[7.5; 9], 0.3).unwrap(), 7.5);
    // 0.07·100 is 7.000000000000001 in floating point; still seven per tail
    assert_eq!(trim_count(0.07, 100), 7);
    assert_eq!(trim_count(0.005, 1000), 5);
    assert_eq!(trim_count(0.005, 100), 1);
    assert_eq!(trim_count(0.0, 10), 0);
    assert!(trimmed_mean(&[1.0, 2.0], 0.49).is_err());
    assert!(trimmed_mean(&[1.0, 2.0], 0.5).is_err());
    assert!(trimmed_mean::<f64>(&[], 0.1).is_err());
    assert!(trimmed_mean(&[1.0, f64::NAN, 2.0], 0.1).is_err());
}

#[test]
fn quantile_inclusive_rule() {
    // type-7 quantiles of 1..=10 at 0.1 and 0.9 are 1.9 and 9.1; 2..=9 survive
    let v: Vec<f64> = (1..=10).map(f64::from).collect();
    assert_eq!(trimmed_mean_with(&v, 0.1, TrimRule::QuantileInclusive).unwrap(), 5.5);
    let skew = [1.0, 2.0, 3.0, 4.0, 100.0];
    // quantiles 1.8 and 80.8: keeps 2, 3, 4
    assert_eq!(trimmed_mean_with(&skew, 0.2, TrimRule::QuantileInclusive).unwrap(), 3.0);
    // ties at the boundary are all kept
    let tied = [1.0, 1.0, 1.0, 5.0];
    assert_eq!(trimmed_mean_with(&tied, 0.25, TrimRule::QuantileInclusive).unwrap(), 1.0);
    assert_eq!(trimmed_mean_with(&tied, 0.25, TrimRule::PerTailCount).unwrap(), 1.0);
}

#[test]
fn symmetric_data_trims_to_mean() {
    let v = [-3.0, -1.0, 0.0, 1.0, 3.0, 10.0, -10.0];
    assert_eq!(trimmed_mean(&v, 0.2).unwrap(), 0.0);
    assert_eq!(sample_mean_report(&v).unwrap().point_estimate, 0.0);
}

#[test]
fn batching() {
    let v = [1, 2, 3, 4, 5];
    let b = batch_replicates(&v, 2).unwrap();
    assert_eq!(b, vec![&[1, 2][..], &[3, 4][..]]);
    assert_eq!(batch_replicates(&v[..4], 2).unwrap().len(), 2);
    assert_eq!(batch_replicates(&v, 5).unwrap(), vec![&v[..]]);
    assert!(batch_replicates(&v, 6).is_err());
    assert!(batch_replicates(&v, 0).is_err());
    assert!(matches!(batch_pairs(&v, &v[..4], 2), Err(Error::Pairing(_))));
}

#[test]
fn loss_bands_hand_fixture() {
    // truth 2, batch means of [1,3],[2,2],[4,4],[0,2] over pairs
    let est = [1.0, 3.0, 2.0, 2.0, 4.0, 4.0, 0.0, 2.0];
    let means: Vec<f64> = batch_replicates(&est, 2)
        .unwrap()
        .into_iter()
        .map(|b| sample_mean_report(b).unwrap().point_estimate)
        .collect();
    assert_eq!(means, vec![2.0, 2.0, 4.0, 1.0]);
    let l = rmse_and_loss_quantiles(&means, 2.0).unwrap();
    // squared errors sorted: 0, 0, 1, 4; mean 1.25
    assert_eq!(l.rmse, 1.25f64.sqrt());
    // median 0.5 → 100·sqrt(0.5)/2; q20 at h = 0.6 → 0; q80 at h = 2.4 → 1 + 0.4·3 = 2.2
    assert_eq!(l.median_pct_err, 50.0 * 0.5f64.sqrt());
    assert_eq!(l.q20, 0.0);
    assert!((l.q80 - 50.0 * 2.2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn rmse_trivial_cases() {
    assert_eq!(rmse(&[3.0, 3.0, 3.0], 3.0).unwrap(), 0.0);
    assert_eq!(rmse(&[4.0, 2.0], 3.0).unwrap(), 1.0);
    assert!(rmse::<f64>(&[], 3.0).is_err());
    assert!(rmse(&[1.0], 0.0).is_ok());
    assert!(rmse_and_loss_quantiles(&[1.0], 0.0).is_err());
}

#[test]
fn kaplan_meier_without_censoring() {
    let c = kaplan_meier(&[2.0, 1.0, 3.0], &[false; 3]).unwrap();
    assert_eq!(c.times, vec![1.0, 2.0, 3.0]);
    assert_eq!(c.survival, vec![2.0 / 3.0, 1.0 / 3.0, 0.0]);
    assert_eq!(c.at_risk, vec![3, 2, 1]);
    assert_eq!(c.at(0.5), 1.0);
    assert_eq!(c.at(2.5), 1.0 / 3.0);
    assert_eq!(c.median(), Some(2.0));
}

#[test]
fn kaplan_meier_all_censored() {
    let c = kaplan_meier(&[4.0, 2.0, 9.0], &[true; 3]).unwrap();
    assert!(c.survival.iter().all(|&s| s == 1.0));
    assert_eq!(c.median(), None);
}

#[test]
fn kaplan_meier_textbook_fixture() {
    let c = kaplan_meier(&[6.0, 6.0, 6.0, 7.0, 10.0], &[false, false, false, false, true]).unwrap();
    assert_eq!(c.times, vec![6.0, 7.0, 10.0]);
    assert_eq!(c.survival, vec![0.4, 0.2, 0.2]);
    assert_eq!(c.at_risk, vec![5, 2, 1]);
    assert_eq!(c.events, vec![3, 1, 0]);
    assert_eq!(c.censored, vec![0, 0, 1]);
}

#[test]
fn kaplan_meier_censoring_between_events() {
    // 1 event, censor at 2, events at 3 and 4: S = 3/4, then 3/4·1/2, then 0
    let c = kaplan_meier(&[1.0, 2.0, 3.0, 4.0], &[false, true, false, false]).unwrap();
    assert_eq!(c.survival, vec![0.75, 0.75, 0.375, 0.0]);
    // tie of an event and a censoring at the same time: the censored subject is at risk
    let c = kaplan_meier(&[2.0, 2.0, 5.0], &[false, true, false]).unwrap();
    assert_eq!(c.survival, vec![2.0 / 3.0, 0.0]);
    assert_eq!(c.at_risk_at(3.0), 1);
    assert_eq!(c.events_at(2.0), 1);
    assert!(kaplan_meier(&[0.0], &[false]).is_err());
    assert!(kaplan_meier(&[1.0], &[]).is_err());
}

#[test]
fn all_meet_at_one() {
    let c = kaplan_meier(&[1.0; 6], &[false; 6]).unwrap();
    assert_eq!((c.times.clone(), c.survival.clone()), (vec![1.0], vec![0.0]));
}

fn mixture_draw(rng: &mut impl Rng, p: f64, mu: f64) -> f64 {
    let z = Normal::new(0.0, 1.0).unwrap().sample(rng);
    let u: f64 = rng.random();
    let side = (1.0 - p) / 2.0;
    if u < side {
        z - mu
    } else if u < 2.0 * side {
        z + mu
    } else {
        z
    }
}

#[test]
fn trimming_beats_mean_on_heavy_mixture() {
    let (p, mu) = (0.9, 7.0);
    let alpha = 1.2 * (0.5 - p / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut means, mut trims) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let v: Vec<f64> = (0..1000).map(|_| mixture_draw(&mut rng, p, mu)).collect();
        means.push(sample_mean_report(&v).unwrap().point_estimate);
        trims.push(trimmed_mean(&v, alpha).unwrap());
    }
    let (rm, rt) = (rmse(&means, 0.0).unwrap(), rmse(&trims, 0.0).unwrap());
    assert!(rt < rm, "trimmed {rt} vs mean {rm}");
}

fn rational(n: i64) -> Rational {
    Rational::from_integer(n)
}

proptest! {
    #[test]
    fn trimmed_mean_is_affine_equivariant(
        v in prop::collection::vec(-1000i64..1000, 1..40),
        a_num in 1i64..50, a_den in 1i64..50, b_num in -500i64..500, b_den in 1i64..20,
        alpha in 0.0f64..0.45,
    ) {
        let v: Vec<Rational> = v.into_iter().map(rational).collect();
        let (a, b) = (Rational::new(a_num, a_den), Rational::new(b_num, b_den));
        let moved: Vec<Rational> = v.iter().map(|&x| a * x + b).collect();
        match trimmed_mean(&v, alpha) {
            Ok(t) => prop_assert_eq!(trimmed_mean(&moved, alpha).unwrap(), a * t + b),
            Err(_) => prop_assert!(trimmed_mean(&moved, alpha).is_err()),
        }
    }

    #[test]
    fn uncensored_km_is_empirical(times in prop::collection::vec(1u32..20, 1..30)) {
        let d: Vec<f64> = times.iter().map(|&t| f64::from(t)).collect();
        let c = kaplan_meier(&d, &vec![false; d.len()]).unwrap();
        for (&t, &s) in c.times.iter().zip(&c.survival) {
            let above = d.iter().filter(|&&x| x > t).count();
            prop_assert_eq!(s, above as f64 / d.len() as f64);
        }
    }

    #[test]
    fn km_is_non_increasing(times in prop::collection::vec((1u32..20, any::<bool>()), 1..30)) {
        let d: Vec<f64> = times.iter().map(|&(t, _)| f64::from(t)).collect();
        let cens: Vec<bool> = times.iter().map(|&(_, c)| c).collect();
        let c = kaplan_meier(&d, &cens).unwrap();
        let mut prev = 1.0;
        for (k, &s) in c.survival.iter().enumerate() {
            prop_assert!(s <= prev && (0.0..=1.0).contains(&s));
            if c.events[k] == 0 {
                prop_assert_eq!(s, prev);
            }
            prev = s;
        }
    }

    #[test]
    fn batches_pair_by_index(v in 2usize..60, j in 1usize..10) {
        let a: Vec<usize> = (0..v).collect();
        let b: Vec<usize> = (0..v).map(|i| i + 1000).collect();
        if v >= j {
            for (x, y) in batch_pairs(&a, &b, j).unwrap() {
                prop_assert!(x.iter().zip(y).all(|(p, q)| p + 1000 == *q));
            }
        }
    }
}
