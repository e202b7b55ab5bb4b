use super::PartitionModel;
use crate::error::{Error, Result};
use crate::linalg::{diag_gaussian_log_density, gaussian_log_density, Cholesky, SquareMatrix};
use crate::partition::{Candidate, Clustering, Partition};
use crate::Real;

/// Whether per-cluster statistics are cached or recomputed from members on every call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CacheMode {
    #[default]
    Cached,
    Standard,
}

/// Posterior of a cluster mean: `N(mean, cov)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterPosterior<T> {
    pub mean: Vec<T>,
    pub cov: SquareMatrix<T>,
}

#[derive(Clone, Debug)]
enum Predictive<T> {
    /// Diagonal of `Σ_c + Σ1`.
    Diag(Vec<T>),
    /// Factor of `Σ_c + Σ1`.
    Dense(Cholesky<T>),
}

/// Sufficient statistics and predictive of one occupied slot.
#[derive(Clone, Debug)]
pub struct SlotStats<T> {
    size: usize,
    sum: Vec<T>,
    pred_mean: Vec<T>,
    pred: Predictive<T>,
}

impl<T: Real> SlotStats<T> {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sum(&self) -> &[T] {
        &self.sum
    }
}

/// Slot-indexed statistics; empty in [`CacheMode::Standard`].
#[derive(Clone, Debug, Default)]
pub struct DpmmCache<T> {
    slots: Vec<Option<SlotStats<T>>>,
}

impl<T: Real> DpmmCache<T> {
    pub fn slot(&self, slot: usize) -> Option<&SlotStats<T>> {
        self.slots.get(slot).and_then(Option::as_ref)
    }
}

/// Conjugate Gaussian Dirichlet process mixture posterior over partitions of the data rows.
#[derive(Clone, Debug)]
pub struct DpmmModel<T> {
    alpha: T,
    mu0: Vec<T>,
    sigma0: SquareMatrix<T>,
    sigma1: SquareMatrix<T>,
    data: Vec<Vec<T>>,
    diagonal: bool,
    mode: CacheMode,
    sigma0_inv: SquareMatrix<T>,
    sigma1_inv: SquareMatrix<T>,
    prior_natural_mean: Vec<T>,
    prior_pred: Predictive<T>,
    ln_alpha: T,
}

impl<T: Real> DpmmModel<T> {
    pub fn new(
        alpha: T,
        mu0: Vec<T>,
        sigma0: SquareMatrix<T>,
        sigma1: SquareMatrix<T>,
        data: Vec<Vec<T>>,
    ) -> Result<Self> {
        if !alpha.is_finite() || alpha <= T::zero() {
            return Err(Error::InvalidModel(format!("alpha must be positive, got {alpha}")));
        }
        let d = mu0.len();
        for m in [&sigma0, &sigma1] {
            if m.dim() != d {
                return Err(Error::Dimension {
                    expected: d,
                    found: m.dim(),
                });
            }
        }
        if let Some(row) = data.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                found: row.len(),
            });
        }
        if data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel("data contains non-finite values".into()));
        }
        let sigma0_inv = sigma0.spd_inverse()?;
        let sigma1_inv = sigma1.spd_inverse()?;
        let prior_natural_mean = sigma0_inv.mul_vec(&mu0);
        let diagonal = sigma0.is_diagonal() && sigma1.is_diagonal();
        let mut model = DpmmModel {
            alpha,
            mu0,
            sigma0,
            sigma1,
            data,
            diagonal,
            mode: CacheMode::Cached,
            sigma0_inv,
            sigma1_inv,
            prior_natural_mean,
            prior_pred: Predictive::Diag(Vec::new()),
            ln_alpha: alpha.ln(),
        };
        model.prior_pred = model.predictive(0, &vec![T::zero(); d])?.pred;
        Ok(model)
    }

    /// `Σ0 = s0·I`, `Σ1 = s1·I` with a constant prior mean.
    pub fn isotropic(alpha: T, mu0: T, s0: T, s1: T, data: Vec<Vec<T>>) -> Result<Self> {
        let d = data.first().map_or(1, Vec::len);
        DpmmModel::new(
            alpha,
            vec![mu0; d],
            SquareMatrix::diagonal(&vec![s0; d]),
            SquareMatrix::diagonal(&vec![s1; d]),
            data,
        )
    }

    pub fn with_mode(mut self, mode: CacheMode) -> Self {
        self.mode = mode;
        self
    }

    /// Routes diagonal inputs through the dense path, for cross-checks.
    pub fn with_dense_path(mut self) -> Result<Self> {
        self.diagonal = false;
        self.prior_pred = self.predictive(0, &vec![T::zero(); self.dim()])?.pred;
        Ok(self)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.mu0.len()
    }

    pub fn data(&self) -> &[Vec<T>] {
        &self.data
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    /// Posterior of a cluster mean given `size` members with coordinate sum `sum`.
    pub fn gaussian_cluster_posterior(&self, size: usize, sum: &[T]) -> Result<ClusterPosterior<T>> {
        if size == 0 {
            return Ok(ClusterPosterior {
                mean: self.mu0.clone(),
                cov: self.sigma0.clone(),
            });
        }
        let prec = self
            .sigma0_inv
            .add(&self.sigma1_inv.scale(T::of_usize(size)));
        let cov = prec.spd_inverse()?;
        let rhs: Vec<T> = self
            .prior_natural_mean
            .iter()
            .zip(self.sigma1_inv.mul_vec(sum))
            .map(|(&a, b)| a + b)
            .collect();
        Ok(ClusterPosterior {
            mean: cov.mul_vec(&rhs),
            cov,
        })
    }

    fn predictive(&self, size: usize, sum: &[T]) -> Result<SlotStats<T>> {
        let (pred_mean, pred) = if self.diagonal {
            let s0 = self.sigma0.diag();
            let s1 = self.sigma1.diag();
            let m = T::of_usize(size);
            let mut mean = Vec::with_capacity(s0.len());
            let mut var = Vec::with_capacity(s0.len());
            for d in 0..s0.len() {
                let vc = T::one() / (T::one() / s0[d] + m / s1[d]);
                mean.push(vc * (self.mu0[d] / s0[d] + sum[d] / s1[d]));
                var.push(vc + s1[d]);
            }
            (mean, Predictive::Diag(var))
        } else {
            let post = self.gaussian_cluster_posterior(size, sum)?;
            let chol = post.cov.add(&self.sigma1).cholesky()?;
            (post.mean, Predictive::Dense(chol))
        };
        Ok(SlotStats {
            size,
            sum: sum.to_vec(),
            pred_mean,
            pred,
        })
    }

    fn stats_unchecked(&self, size: usize, sum: Vec<T>) -> SlotStats<T> {
        let mut s = self
            .predictive(size, &sum)
            .expect("posterior of a validated model is positive definite");
        s.sum = sum;
        s
    }

    fn log_pred(&self, mean: &[T], pred: &Predictive<T>, x: &[T]) -> T {
        match pred {
            Predictive::Diag(var) => diag_gaussian_log_density(x, mean, var),
            Predictive::Dense(chol) => gaussian_log_density(x, mean, chol),
        }
    }

    /// `ln N(x | μ_c, Σ_c + Σ1)` for a cluster with the given statistics.
    pub fn log_cluster_predictive(&self, size: usize, sum: &[T], x: &[T]) -> Result<T> {
        let s = self.predictive(size, sum)?;
        Ok(self.log_pred(&s.pred_mean, &s.pred, x))
    }

    fn stats_of_members(&self, members: impl Iterator<Item = usize>) -> SlotStats<T> {
        let mut sum = vec![T::zero(); self.dim()];
        let mut size = 0;
        for i in members {
            size += 1;
            for (s, &w) in sum.iter_mut().zip(&self.data[i]) {
                *s = *s + w;
            }
        }
        self.stats_unchecked(size, sum)
    }

    /// Log marginal likelihood of a block as a product of sequential predictives.
    pub fn log_marginal_likelihood(&self, block: &[usize]) -> T {
        let mut sum = vec![T::zero(); self.dim()];
        let mut total = T::zero();
        for (m, &i) in block.iter().enumerate() {
            let s = self.stats_unchecked(m, sum.clone());
            total = total + self.log_pred(&s.pred_mean, &s.pred, &self.data[i]);
            for (a, &w) in sum.iter_mut().zip(&self.data[i]) {
                *a = *a + w;
            }
        }
        total
    }

    /// Unnormalized log posterior mass.
    pub fn posterior_logpmf(&self, partition: &Partition) -> T {
        self.log_pmf(partition)
    }

    /// `Σ_c |c|/(N+α) N(x | μ_c, Σ_c+Σ1) + α/(N+α) N(x | μ0, Σ0+Σ1)`.
    pub fn predictive_density(&self, partition: &Partition, x: &[T]) -> T {
        let n = T::of_usize(partition.n_assigned());
        let denom = n + self.alpha;
        let mut total =
            self.alpha / denom * self.log_pred(&self.mu0, &self.prior_pred, x).exp();
        for block in partition.blocks() {
            let s = self.stats_of_members(block.iter().copied());
            total = total
                + T::of_usize(block.len()) / denom * self.log_pred(&s.pred_mean, &s.pred, x).exp();
        }
        total
    }

    /// True when the cache matches a rebuild within `tol`.
    pub fn cache_matches(&self, cache: &DpmmCache<T>, clustering: &Clustering, tol: T) -> bool {
        let fresh = self.build_cache(clustering).expect("rebuild");
        let n = cache.slots.len().max(fresh.slots.len());
        (0..n).all(|s| match (cache.slot(s), fresh.slot(s)) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                a.size == b.size
                    && a.sum.iter().zip(&b.sum).all(|(x, y)| (*x - *y).abs() <= tol)
                    && a.pred_mean
                        .iter()
                        .zip(&b.pred_mean)
                        .all(|(x, y)| (*x - *y).abs() <= tol)
            }
            _ => false,
        })
    }

    fn ln_factorial(k: usize) -> T {
        (2..=k).map(|i| T::of_usize(i).ln()).sum()
    }
}

/// Normalized log CRP probability of a partition.
pub fn crp_prior_logpmf<T: Real>(alpha: T, partition: &Partition) -> T {
    let n = partition.n_assigned();
    let rising: T = (0..n).map(|i| (alpha + T::of_usize(i)).ln()).sum();
    let blocks: T = partition
        .blocks()
        .iter()
        .map(|b| DpmmModel::<T>::ln_factorial(b.len() - 1))
        .sum();
    T::of_usize(partition.n_blocks()) * alpha.ln() + blocks - rising
}

impl<T: Real> PartitionModel for DpmmModel<T> {
    type Scalar = T;
    type Cache = DpmmCache<T>;

    fn n_items(&self) -> usize {
        self.data.len()
    }

    fn build_cache(&self, clustering: &Clustering) -> Result<DpmmCache<T>> {
        if clustering.n_items() != self.data.len() {
            return Err(Error::MismatchedItems(clustering.n_items(), self.data.len()));
        }
        if self.mode == CacheMode::Standard {
            return Ok(DpmmCache::default());
        }
        let slots = (0..clustering.slot_capacity())
            .map(|s| {
                (clustering.slot_size(s) > 0).then(|| self.stats_of_members(clustering.members(s)))
            })
            .collect();
        Ok(DpmmCache { slots })
    }

    fn on_remove(&self, cache: &mut DpmmCache<T>, item: usize, slot: usize, emptied: bool) {
        if self.mode == CacheMode::Standard {
            return;
        }
        if emptied {
            cache.slots[slot] = None;
            return;
        }
        let old = cache.slots[slot].take().expect("cache tracks occupied slots");
        let sum = old
            .sum
            .iter()
            .zip(&self.data[item])
            .map(|(&s, &w)| s - w)
            .collect();
        cache.slots[slot] = Some(self.stats_unchecked(old.size - 1, sum));
    }

    fn on_insert(&self, cache: &mut DpmmCache<T>, item: usize, slot: usize) {
        if self.mode == CacheMode::Standard {
            return;
        }
        if slot >= cache.slots.len() {
            cache.slots.resize(slot + 1, None);
        }
        let (size, sum) = match cache.slots[slot].take() {
            Some(old) => (
                old.size + 1,
                old.sum
                    .iter()
                    .zip(&self.data[item])
                    .map(|(&s, &w)| s + w)
                    .collect(),
            ),
            None => (1, self.data[item].clone()),
        };
        cache.slots[slot] = Some(self.stats_unchecked(size, sum));
    }

    fn log_weights(
        &self,
        cache: &DpmmCache<T>,
        clustering: &Clustering,
        item: usize,
        candidates: &[Candidate],
    ) -> Vec<T> {
        let x = &self.data[item];
        candidates
            .iter()
            .map(|&c| match c {
                Candidate::New => self.ln_alpha + self.log_pred(&self.mu0, &self.prior_pred, x),
                Candidate::Join(s) => {
                    let fresh;
                    let stats = match self.mode {
                        CacheMode::Cached => cache.slot(s).expect("cache tracks occupied slots"),
                        CacheMode::Standard => {
                            fresh = self.stats_of_members(clustering.members(s));
                            &fresh
                        }
                    };
                    T::of_usize(stats.size).ln() + self.log_pred(&stats.pred_mean, &stats.pred, x)
                }
            })
            .collect()
    }

    fn log_count_term(&self, n_blocks: usize) -> T {
        let rising: T = (0..self.data.len())
            .map(|i| (self.alpha + T::of_usize(i)).ln())
            .sum();
        T::of_usize(n_blocks) * self.ln_alpha - rising
    }

    fn log_block_term(&self, block: &[usize]) -> T {
        Self::ln_factorial(block.len() - 1) + self.log_marginal_likelihood(block)
    }

    fn initial_partition(&self) -> Partition {
        Partition::one_block(self.data.len())
    }
}
