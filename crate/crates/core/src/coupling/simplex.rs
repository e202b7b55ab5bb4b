//! Transportation simplex (MODI) for small exact transport problems.
//!
//! The basis is a spanning tree over row and column nodes, started from the northwest
//! corner. The entering cell is the first cell in row-major order with negative reduced
//! cost; the leaving cell is the row-major-first minimum-flow cell on the minus side of
//! the cycle. Both choices are Bland-style, so runs are deterministic and cannot cycle.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::ops::{Add, Sub};

use num_traits::Zero;

use super::{CostMatrix, CouplingMatrix, Mass};
use crate::error::{Error, Result};

/// Cost entries accepted by the solver.
pub trait TransportCost:
    Copy + Debug + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self>
{
    /// Whether a reduced cost shows a strictly improving direction.
    fn improves(reduced: Self) -> bool;

    fn to_f64(self) -> f64;
}

impl TransportCost for i64 {
    fn improves(reduced: i64) -> bool {
        reduced < 0
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl TransportCost for f64 {
    fn improves(reduced: f64) -> bool {
        reduced < -1e-9
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl TransportCost for f32 {
    fn improves(reduced: f32) -> bool {
        reduced < -1e-5
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Minimum-cost coupling of `a` and `b` under `cost`.
pub fn solve_exact_ot<S: Mass, C: TransportCost>(
    cost: &CostMatrix<C>,
    a: &[S],
    b: &[S],
) -> Result<CouplingMatrix<S>> {
    let (m, n) = (a.len(), b.len());
    if cost.rows() != m || cost.cols() != n {
        return Err(Error::Dimension {
            expected: m * n,
            found: cost.rows() * cost.cols(),
        });
    }
    super::check_distribution(a)?;
    super::check_distribution(b)?;
    let ta: f64 = a.iter().map(Mass::to_f64).sum();
    let tb: f64 = b.iter().map(Mass::to_f64).sum();
    if (ta - tb).abs() > 1e-9 {
        return Err(Error::MarginalMismatch(ta, tb));
    }
    let mut flow = vec![S::zero(); m * n];
    let mut basic = vec![false; m * n];
    northwest_corner(a, b, &mut flow, &mut basic);
    let max_pivots = 1000 * (m + n) * (m + n) + 1000;
    for _ in 0..max_pivots {
        let (u, v) = duals(cost, &basic, m, n);
        let entering = (0..m * n).find(|&cell| {
            !basic[cell] && C::improves(cost.at(cell / n, cell % n) - u[cell / n] - v[cell % n])
        });
        let Some(enter) = entering else {
            return Ok(CouplingMatrix::from_vec(m, n, flow));
        };
        let path = tree_path(&basic, m, n, enter / n, enter % n);
        // path runs from the entering row to the entering column; signs alternate from
        // the column end starting with minus
        let k = path.len();
        let minus: Vec<usize> = (0..k).filter(|&p| (k - 1 - p).is_multiple_of(2)).map(|p| path[p]).collect();
        let plus: Vec<usize> = (0..k).filter(|&p| !(k - 1 - p).is_multiple_of(2)).map(|p| path[p]).collect();
        let mut leave = minus[0];
        for &cell in &minus[1..] {
            if flow[cell] < flow[leave] || (flow[cell] == flow[leave] && cell < leave) {
                leave = cell;
            }
        }
        let theta = flow[leave].clone();
        for &cell in &minus {
            flow[cell] = flow[cell].clone() - theta.clone();
        }
        for &cell in &plus {
            flow[cell] = flow[cell].clone() + theta.clone();
        }
        flow[enter] = flow[enter].clone() + theta;
        flow[leave] = S::zero();
        basic[leave] = false;
        basic[enter] = true;
    }
    Err(Error::InvalidDistribution(
        "transport simplex exceeded its pivot limit".into(),
    ))
}

fn northwest_corner<S: Mass>(a: &[S], b: &[S], flow: &mut [S], basic: &mut [bool]) {
    let (m, n) = (a.len(), b.len());
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let x = if ra[i] < rb[j] { ra[i].clone() } else { rb[j].clone() };
        flow[i * n + j] = x.clone();
        basic[i * n + j] = true;
        ra[i] = ra[i].clone() - x.clone();
        rb[j] = rb[j].clone() - x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if j == n - 1 || (i < m - 1 && ra[i] <= rb[j]) {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Potentials with `u_0 = 0` and `u_i + v_j = c_ij` on basic cells.
fn duals<C: TransportCost>(
    cost: &CostMatrix<C>,
    basic: &[bool],
    m: usize,
    n: usize,
) -> (Vec<C>, Vec<C>) {
    let mut u = vec![C::zero(); m];
    let mut v = vec![C::zero(); n];
    let mut seen_u = vec![false; m];
    let mut seen_v = vec![false; n];
    seen_u[0] = true;
    // node ids: rows 0..m, columns m..m+n
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        if node < m {
            let i = node;
            for j in 0..n {
                if basic[i * n + j] && !seen_v[j] {
                    v[j] = cost.at(i, j) - u[i];
                    seen_v[j] = true;
                    queue.push_back(m + j);
                }
            }
        } else {
            let j = node - m;
            for i in 0..m {
                if basic[i * n + j] && !seen_u[i] {
                    u[i] = cost.at(i, j) - v[j];
                    seen_u[i] = true;
                    queue.push_back(i);
                }
            }
        }
    }
    (u, v)
}

/// Basic cells on the tree path from row `r` to column `c`, in order.
fn tree_path(basic: &[bool], m: usize, n: usize, r: usize, c: usize) -> Vec<usize> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[r] = true;
    let mut queue = VecDeque::from([r]);
    let target = m + c;
    while let Some(node) = queue.pop_front() {
        if node == target {
            break;
        }
        let neighbours: Vec<(usize, usize)> = if node < m {
            (0..n)
                .filter(|&j| basic[node * n + j])
                .map(|j| (m + j, node * n + j))
                .collect()
        } else {
            let j = node - m;
            (0..m)
                .filter(|&i| basic[i * n + j])
                .map(|i| (i, i * n + j))
                .collect()
        };
        for (next, cell) in neighbours {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, cell));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = target;
    while let Some((prev, cell)) = parent[node] {
        path.push(cell);
        node = prev;
    }
    path.reverse();
    path
}
