//! Couplings of two discrete distributions: exact optimal transport (with an independent
//! nugget), independent, maximal and common-random-number label couplings.

mod labels;
mod simplex;

use std::fmt::Debug;
use std::ops::{Add, Sub};

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Candidate, Clustering, IntersectionTracker};
use crate::targets::GibbsConditional;
use crate::{Rational, Real};

pub use labels::{common_rng_joint, common_rng_label_coupling, maximal_label_coupling};
pub use simplex::{solve_exact_ot, TransportCost};

/// Probability mass type: floating point or exact rational.
pub trait Mass: Clone + Debug + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> {
    fn to_f64(&self) -> f64;
}

impl Mass for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Mass for f32 {
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Mass for Rational {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

pub(crate) fn check_distribution<S: Mass>(p: &[S]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty support".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.to_f64().is_finite() || x.to_f64() < 0.0) {
        return Err(Error::InvalidDistribution(format!("bad mass {x:?}")));
    }
    let total: f64 = p.iter().map(Mass::to_f64).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
    }
    Ok(())
}

/// Row-major `rows × cols` grid of costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix<C> {
    rows: usize,
    cols: usize,
    c: Vec<C>,
}

impl<C: Copy> CostMatrix<C> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let c = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        CostMatrix { rows, cols, c }
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension {
                expected: cols,
                found: r.len(),
            });
        }
        Ok(CostMatrix {
            rows: rows.len(),
            cols,
            c: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> C {
        self.c[i * self.cols + j]
    }
}

/// Joint mass over a product of two finite supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix<S> {
    rows: usize,
    cols: usize,
    mass: Vec<S>,
}

impl<S: Mass> CouplingMatrix<S> {
    pub fn from_vec(rows: usize, cols: usize, mass: Vec<S>) -> Self {
        assert_eq!(mass.len(), rows * cols);
        CouplingMatrix { rows, cols, mass }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.mass[i * self.cols + j]
    }

    pub fn entries(&self) -> &[S] {
        &self.mass
    }

    pub fn row_marginal(&self) -> Vec<S> {
        (0..self.rows)
            .map(|i| {
                self.mass[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .fold(S::zero(), |a, b| a + b.clone())
            })
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<S> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(S::zero(), |a, i| a + self.mass[i * self.cols + j].clone())
            })
            .collect()
    }

    /// Largest absolute deviation from the requested marginals.
    pub fn marginal_error(&self, a: &[S], b: &[S]) -> f64 {
        let dev = |got: Vec<S>, want: &[S]| {
            got.iter()
                .zip(want)
                .map(|(g, w)| (g.to_f64() - w.to_f64()).abs())
                .fold(0.0, f64::max)
        };
        dev(self.row_marginal(), a).max(dev(self.col_marginal(), b))
    }

    pub fn objective<C: TransportCost>(&self, cost: &CostMatrix<C>) -> f64 {
        self.mass
            .iter()
            .zip(&cost.c)
            .map(|(u, &c)| u.to_f64() * c.to_f64())
            .sum()
    }

    /// Mass on cells `(k, k)`; zero for a non-square grid off its leading square.
    pub fn diagonal_mass(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|k| self.at(k, k).to_f64())
            .sum()
    }
}

impl CouplingMatrix<Rational> {
    pub fn exact_objective(&self, cost: &CostMatrix<i64>) -> Rational {
        self.mass
            .iter()
            .zip(&cost.c)
            .fold(Rational::zero(), |acc, (u, &c)| acc + u * Rational::from_integer(c))
    }
}

impl<T: Real + Mass> CouplingMatrix<T> {
    /// `(1 − w) self + w other`.
    pub fn mix(&self, other: &Self, w: T) -> Self {
        let mass = self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(&a, &b)| (T::one() - w) * a + w * b)
            .collect();
        CouplingMatrix {
            rows: self.rows,
            cols: self.cols,
            mass,
        }
    }

    /// Cell selected by a uniform `u ∈ [0, 1)` scanning in row-major order.
    pub fn cell_at(&self, u: T) -> (usize, usize) {
        let mut acc = T::zero();
        let mut last = 0;
        for (k, &p) in self.mass.iter().enumerate() {
            if p > T::zero() {
                acc = acc + p;
                last = k;
                if u < acc {
                    return (k / self.cols, k % self.cols);
                }
            }
        }
        (last / self.cols, last % self.cols)
    }
}

/// Outer product `a_k b_k'`.
pub fn independent_coupling<T: Real + Mass>(a: &[T], b: &[T]) -> Result<CouplingMatrix<T>> {
    check_distribution(a)?;
    check_distribution(b)?;
    let mass = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
    Ok(CouplingMatrix::from_vec(a.len(), b.len(), mass))
}

/// Draws a cell of `coupling` with probability proportional to its mass.
pub fn sample_from_coupling<T, R>(coupling: &CouplingMatrix<T>, rng: &mut R) -> (usize, usize)
where
    T: Real + Mass,
    R: Rng + ?Sized,
{
    let u = T::of(rng.random::<f64>());
    coupling.cell_at(u)
}

/// How the two leave-out conditionals of a coupled step are joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    Ot,
    Maximal,
    CommonRng,
    Independent,
}

impl CouplingKind {
    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::Ot => "ot",
            CouplingKind::Maximal => "maximal",
            CouplingKind::CommonRng => "common-rng",
            CouplingKind::Independent => "independent",
        }
    }
}

impl std::str::FromStr for CouplingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ot" => Ok(CouplingKind::Ot),
            "maximal" => Ok(CouplingKind::Maximal),
            "common-rng" => Ok(CouplingKind::CommonRng),
            "independent" => Ok(CouplingKind::Independent),
            _ => Err(Error::Config(format!("unknown coupling '{s}'"))),
        }
    }
}

/// Partition metric used as transport cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    Hamming,
    Vi,
}

/// Settings for [`couple_conditionals`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub metric: Metric,
    pub eta: f64,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        CouplingSpec {
            kind: CouplingKind::Ot,
            metric: Metric::Hamming,
            eta: 1e-5,
        }
    }
}

/// OT coupling of two leave-out conditionals mixed with an `eta` independent nugget.
///
/// When the chains agree in the leave-out state (tracker distance zero) the canonical
/// candidate lists coincide and the diagonal coupling is returned directly.
pub fn ot_coupling_with_nugget<T: Real + Mass>(
    px: &GibbsConditional<T>,
    py: &GibbsConditional<T>,
    tracker: &IntersectionTracker,
    metric: Metric,
    eta: T,
) -> Result<CouplingMatrix<T>> {
    let (m, n) = (px.len(), py.len());
    if tracker.distance() == 0 {
        if m != n {
            return Err(Error::InvalidDistribution(
                "equal chains produced misaligned candidates".into(),
            ));
        }
        let mut mass = vec![T::zero(); m * n];
        for k in 0..m {
            mass[k * n + k] = px.probs[k];
        }
        return Ok(CouplingMatrix::from_vec(m, n, mass));
    }
    let ot = match metric {
        Metric::Hamming => {
            let mut cost = Vec::with_capacity(m * n);
            for &cx in &px.candidates {
                for &cy in &py.candidates {
                    cost.push(tracker.delta_distance(cx, cy)?);
                }
            }
            solve_exact_ot(&CostMatrix { rows: m, cols: n, c: cost }, &px.probs, &py.probs)?
        }
        Metric::Vi => {
            let mut cost = Vec::with_capacity(m * n);
            for &cx in &px.candidates {
                for &cy in &py.candidates {
                    cost.push(tracker.delta_vi::<f64>(cx, cy)?);
                }
            }
            solve_exact_ot(&CostMatrix { rows: m, cols: n, c: cost }, &px.probs, &py.probs)?
        }
    };
    if eta == T::zero() {
        return Ok(ot);
    }
    Ok(ot.mix(&independent_coupling(&px.probs, &py.probs)?, eta))
}

/// Label each candidate carries in label-space couplings: the slot id it lands in.
fn candidate_label(c: &Clustering, cand: Candidate) -> usize {
    match cand {
        Candidate::Join(s) => s,
        Candidate::New => c.next_free_slot(),
    }
}

/// Lifts a label-space joint back onto the two candidate lists.
fn label_joint_to_candidates<T: Real + Mass>(
    px: &GibbsConditional<T>,
    py: &GibbsConditional<T>,
    lx: &[usize],
    ly: &[usize],
    joint: &CouplingMatrix<T>,
) -> CouplingMatrix<T> {
    let (m, n) = (px.len(), py.len());
    let mut mass = vec![T::zero(); m * n];
    for (i, &a) in lx.iter().enumerate() {
        for (j, &b) in ly.iter().enumerate() {
            mass[i * n + j] = *joint.at(a, b);
        }
    }
    CouplingMatrix::from_vec(m, n, mass)
}

fn label_distributions<T: Real + Mass>(
    px: &GibbsConditional<T>,
    py: &GibbsConditional<T>,
    cx: &Clustering,
    cy: &Clustering,
) -> (Vec<usize>, Vec<usize>, Vec<T>, Vec<T>) {
    let lx: Vec<usize> = px.candidates.iter().map(|&c| candidate_label(cx, c)).collect();
    let ly: Vec<usize> = py.candidates.iter().map(|&c| candidate_label(cy, c)).collect();
    let width = lx.iter().chain(&ly).max().map_or(1, |&l| l + 1);
    let mut p = vec![T::zero(); width];
    let mut q = vec![T::zero(); width];
    for (&l, &pr) in lx.iter().zip(&px.probs) {
        p[l] = p[l] + pr;
    }
    for (&l, &pr) in ly.iter().zip(&py.probs) {
        q[l] = q[l] + pr;
    }
    (lx, ly, p, q)
}

/// Couples the two leave-out conditionals according to `spec`.
///
/// `cx` and `cy` are the chains in their leave-out state; label couplings read slot ids
/// from them.
pub fn couple_conditionals<T: Real + Mass>(
    spec: &CouplingSpec,
    px: &GibbsConditional<T>,
    py: &GibbsConditional<T>,
    cx: &Clustering,
    cy: &Clustering,
    tracker: &IntersectionTracker,
) -> Result<CouplingMatrix<T>> {
    match spec.kind {
        CouplingKind::Ot => ot_coupling_with_nugget(px, py, tracker, spec.metric, T::of(spec.eta)),
        CouplingKind::Independent => independent_coupling(&px.probs, &py.probs),
        CouplingKind::Maximal | CouplingKind::CommonRng => {
            let (lx, ly, p, q) = label_distributions(px, py, cx, cy);
            let joint = if spec.kind == CouplingKind::Maximal {
                maximal_label_coupling(&p, &q)?
            } else {
                common_rng_joint(&p, &q)?
            };
            Ok(label_joint_to_candidates(px, py, &lx, &ly, &joint))
        }
    }
}
