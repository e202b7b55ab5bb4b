//! Synthetic datasets and graphs.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution, Normal};

use crate::error::{Error, Result};
use crate::targets::{greedy_coloring, Graph};

/// Gaussian mixture with shared isotropic noise.
#[derive(Clone, Debug, PartialEq)]
pub struct GmmSpec {
    pub centers: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub noise_sd: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmmPreset {
    /// Four 2-d clusters at (±0.8, ±0.8), sd 0.5, 300 points.
    Synthetic,
    /// Ten 1-d clusters, Dirichlet(1) weights, centers from N(0, 10²), sd 2.
    Gmm1d,
}

impl FromStr for GmmPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synthetic" => Ok(GmmPreset::Synthetic),
            "gmm-1d" => Ok(GmmPreset::Gmm1d),
            _ => Err(Error::Config(format!("unknown gmm preset '{s}'"))),
        }
    }
}

impl GmmPreset {
    pub fn default_n(self) -> usize {
        match self {
            GmmPreset::Synthetic => 300,
            GmmPreset::Gmm1d => 100,
        }
    }

    /// The mixture; random parameters of `gmm-1d` are drawn from `seed`.
    pub fn spec(self, seed: u64) -> GmmSpec {
        match self {
            GmmPreset::Synthetic => GmmSpec {
                centers: vec![vec![-0.8, -0.8], vec![-0.8, 0.8], vec![0.8, -0.8], vec![0.8, 0.8]],
                weights: vec![0.25; 4],
                noise_sd: 0.5,
            },
            GmmPreset::Gmm1d => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let weights = Dirichlet::new([1.0; 10]).expect("valid concentration").sample(&mut rng).to_vec();
                let prior = Normal::new(0.0, 10.0).expect("valid sd");
                let centers = (0..10).map(|_| vec![prior.sample(&mut rng)]).collect();
                GmmSpec { centers, weights, noise_sd: 2.0 }
            }
        }
    }
}

/// `n` draws; returns the points and their component labels.
pub fn synth_gmm(spec: &GmmSpec, n: usize, seed: u64) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    if spec.centers.is_empty() || spec.centers.len() != spec.weights.len() {
        return Err(Error::Config("mixture needs one weight per center".into()));
    }
    let d = spec.centers[0].len();
    if spec.centers.iter().any(|c| c.len() != d) {
        return Err(Error::Config("mixture centers differ in dimension".into()));
    }
    let pick = WeightedIndex::new(&spec.weights).map_err(|e| Error::Config(format!("mixture weights: {e}")))?;
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::Config(format!("noise sd: {e}")))?;
    // a separate stream keeps the draws independent of the preset's parameter draws
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let k = pick.sample(&mut rng);
        points.push(spec.centers[k].iter().map(|c| c + noise.sample(&mut rng)).collect());
        labels.push(k);
    }
    Ok((points, labels))
}

fn random_regular(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Option<BTreeSet<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    for _ in 0..100_000 {
        stubs.shuffle(rng);
        let mut edges = BTreeSet::new();
        let ok = stubs.chunks_exact(2).all(|p| {
            let (u, v) = (p[0].min(p[1]), p[0].max(p[1]));
            u != v && edges.insert((u, v))
        });
        if ok {
            return Some(edges);
        }
    }
    None
}

/// Uniform-ish `k`-regular graph from the configuration model with rejection.
///
/// Dense degrees are drawn as the complement of an `(n−1−k)`-regular graph, which keeps the
/// rejection rate low.
pub fn k_regular(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if n == 0 || k >= n.max(1) || (n * k) % 2 == 1 {
        return Err(Error::Config(format!("no {k}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complement = k > (n - 1) / 2;
    let degree = if complement { n - 1 - k } else { k };
    let edges = random_regular(n, degree, &mut rng)
        .ok_or_else(|| Error::Config(format!("failed to realize a {k}-regular graph on {n} vertices")))?;
    let edges: Vec<(usize, usize)> = if complement {
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|e| !edges.contains(e))
            .collect()
    } else {
        edges.into_iter().collect()
    };
    Graph::new(n, &edges)
}

/// Each of the `n(n−1)/2` possible edges independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges)
}

/// Colors used by the greedy coloring, the least `q` the sampler can start from.
pub fn greedy_colors(graph: &Graph) -> usize {
    greedy_coloring(graph).n_blocks()
}
