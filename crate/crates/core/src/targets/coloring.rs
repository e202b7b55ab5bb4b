use std::marker::PhantomData;

use super::PartitionModel;
use crate::error::{Error, Result};
use crate::partition::{Candidate, Clustering, Partition};
use crate::Real;

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n_vertices];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n_vertices {
                    return Err(Error::ItemOutOfRange {
                        item: w,
                        n_items: n_vertices,
                    });
                }
            }
            if u == v {
                return Err(Error::InvalidModel(format!("self-loop at vertex {}", u + 1)));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for a in &mut adjacency {
            a.sort_unstable();
            a.dedup();
        }
        Ok(Graph { adjacency })
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Each edge once, `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }
}

/// Colors vertices in index order with the smallest color unused by earlier neighbours.
pub fn greedy_coloring(graph: &Graph) -> Partition {
    let n = graph.n_vertices();
    let mut color = vec![0u32; n];
    for v in 0..n {
        let mut used: Vec<u32> = graph
            .neighbors(v)
            .iter()
            .filter(|&&u| u < v)
            .map(|&u| color[u])
            .collect();
        used.sort_unstable();
        let mut c = 1;
        for u in used {
            if u == c {
                c += 1;
            } else if u > c {
                break;
            }
        }
        color[v] = c;
    }
    if n == 0 {
        return Partition::empty(0);
    }
    Partition::from_label_slice(&color).expect("greedy colors are positive")
}

/// Partitions induced by uniformly random proper `q`-colorings: color classes are blocks.
#[derive(Clone, Debug)]
pub struct ColoringModel<T = f64> {
    graph: Graph,
    q: usize,
    ln_fact: Vec<T>,
    _scalar: PhantomData<T>,
}

impl<T: Real> ColoringModel<T> {
    /// Fails when `q` is below the greedy color count, or below `max degree + 1` when
    /// `require_connectivity` is set.
    pub fn new(graph: Graph, q: usize, require_connectivity: bool) -> Result<Self> {
        let greedy = greedy_coloring(&graph).n_blocks();
        if q < greedy {
            return Err(Error::InvalidModel(format!(
                "q = {q} is below the greedy coloring count {greedy}"
            )));
        }
        if require_connectivity && q < graph.max_degree() + 1 {
            return Err(Error::InvalidModel(format!(
                "q = {q} is below max degree + 1 = {}",
                graph.max_degree() + 1
            )));
        }
        let mut ln_fact = vec![T::zero(); q + 1];
        for k in 1..=q {
            ln_fact[k] = ln_fact[k - 1] + T::of_usize(k).ln();
        }
        Ok(ColoringModel {
            graph,
            q,
            ln_fact,
            _scalar: PhantomData,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `ln q!/(q−K)!`, or `-inf` when `K > q` or a block holds an edge.
    pub fn coloring_logpmf(&self, partition: &Partition) -> T {
        self.log_pmf(partition)
    }

    /// `−ln (q−K)!` for `K ≤ q`.
    fn ln_weight(&self, n_blocks: usize) -> T {
        if n_blocks > self.q {
            T::neg_infinity()
        } else {
            -self.ln_fact[self.q - n_blocks]
        }
    }
}

impl<T: Real> PartitionModel for ColoringModel<T> {
    type Scalar = T;
    type Cache = ();

    fn n_items(&self) -> usize {
        self.graph.n_vertices()
    }

    fn build_cache(&self, clustering: &Clustering) -> Result<()> {
        if clustering.n_items() != self.n_items() {
            return Err(Error::MismatchedItems(clustering.n_items(), self.n_items()));
        }
        Ok(())
    }

    fn on_remove(&self, _: &mut (), _: usize, _: usize, _: bool) {}

    fn on_insert(&self, _: &mut (), _: usize, _: usize) {}

    fn log_weights(
        &self,
        _: &(),
        clustering: &Clustering,
        item: usize,
        candidates: &[Candidate],
    ) -> Vec<T> {
        let k = clustering.n_blocks();
        candidates
            .iter()
            .map(|&c| match c {
                Candidate::New => self.ln_weight(k + 1),
                Candidate::Join(s) => {
                    let clash = self
                        .graph
                        .neighbors(item)
                        .iter()
                        .any(|&u| clustering.slot_of(u) == Some(s));
                    if clash {
                        T::neg_infinity()
                    } else {
                        self.ln_weight(k)
                    }
                }
            })
            .collect()
    }

    fn log_count_term(&self, n_blocks: usize) -> T {
        if n_blocks > self.q {
            T::neg_infinity()
        } else {
            self.ln_fact[self.q] - self.ln_fact[self.q - n_blocks]
        }
    }

    fn log_block_term(&self, block: &[usize]) -> T {
        let clash = block
            .iter()
            .enumerate()
            .any(|(i, &u)| block[i + 1..].iter().any(|&v| self.graph.has_edge(u, v)));
        if clash {
            T::neg_infinity()
        } else {
            T::zero()
        }
    }

    fn initial_partition(&self) -> Partition {
        greedy_coloring(&self.graph)
    }
}
