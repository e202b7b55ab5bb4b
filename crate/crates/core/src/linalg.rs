//! Small dense linear algebra for symmetric positive-definite matrices.

use crate::error::{Error, Result};
use crate::Real;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)] == T::zero()))
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        SquareMatrix {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Lower Cholesky factor.
    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        let n = self.dim;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !d.is_finite() || d <= T::zero() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { l })
    }

    /// Inverse of a symmetric positive-definite matrix.
    pub fn spd_inverse(&self) -> Result<Self> {
        let ch = self.cholesky()?;
        let n = self.dim;
        let mut inv = Self::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = ch.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv.symmetrized())
    }

    fn symmetrized(mut self) -> Self {
        let half = T::of(0.5);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let v = (self[(i, j)] + self[(j, i)]) * half;
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
        self
    }
}

impl<T> std::ops::Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

/// `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: SquareMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn log_det(&self) -> T {
        let two = T::of(2.0);
        (0..self.l.dim).map(|i| two * self.l[(i, i)].ln()).sum()
    }

    /// Solves `L y = b`.
    pub fn forward(&self, b: &[T]) -> Vec<T> {
        let n = self.l.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for (k, &yk) in y.iter().enumerate().take(i) {
                s = s - self.l[(i, k)] * yk;
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.dim;
        let mut x = self.forward(b);
        for i in (0..n).rev() {
            let mut s = x[i];
            for (k, &xk) in x.iter().enumerate().skip(i + 1) {
                s = s - self.l[(k, i)] * xk;
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// `vᵀ A⁻¹ v`.
    pub fn inv_quad(&self, v: &[T]) -> T {
        self.forward(v).iter().map(|&y| y * y).sum()
    }
}

/// `ln N(x | mean, cov)` given the Cholesky factor of `cov`.
pub fn gaussian_log_density<T: Real>(x: &[T], mean: &[T], cov: &Cholesky<T>) -> T {
    let d = x.len();
    let diff: Vec<T> = x.iter().zip(mean).map(|(&a, &b)| a - b).collect();
    let ln2pi = T::of((2.0 * std::f64::consts::PI).ln());
    -T::of(0.5) * (T::of_usize(d) * ln2pi + cov.log_det() + cov.inv_quad(&diff))
}

/// `ln N(x | mean, diag(var))`.
pub fn diag_gaussian_log_density<T: Real>(x: &[T], mean: &[T], var: &[T]) -> T {
    let ln2pi = T::of((2.0 * std::f64::consts::PI).ln());
    let half = T::of(0.5);
    x.iter()
        .zip(mean)
        .zip(var)
        .map(|((&a, &m), &v)| -half * (ln2pi + v.ln() + (a - m) * (a - m) / v))
        .sum()
}
