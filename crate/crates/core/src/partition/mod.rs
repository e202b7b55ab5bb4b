//! Partitions of `{0, .., N-1}` and the machinery chains use to move items between blocks.
//!
//! Items are zero-based in the API. The external text form is the canonical one-based
//! label vector, e.g. `"1,2,2,1"`.

mod clustering;
mod enumerate;
mod metric;
mod tracker;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use clustering::Clustering;
pub use enumerate::{all_partitions, bell_number, PartitionIter};
pub use metric::{pair_distance, vi_distance};
pub use tracker::IntersectionTracker;

/// Where a left-out item goes: into an existing block (by slot id) or into a new block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Candidate {
    Join(usize),
    New,
}

/// Length-N vector of positive labels. Equal labels mean a shared block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector(pub Vec<u32>);

impl LabelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for LabelVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptyLabels);
        }
        let mut labels = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                path: Default::default(),
                msg: format!("bad label {tok:?}"),
            })?;
            if v <= 0 || v > u32::MAX as i64 {
                return Err(Error::NonPositiveLabel(v));
            }
            labels.push(v as u32);
        }
        Ok(LabelVector(labels))
    }
}

/// Disjoint non-empty blocks over a universe of `n_items` items, kept in canonical form:
/// blocks sorted by smallest member, members ascending.
///
/// A partition may leave some items unassigned; this is the leave-out state `π_{-n}`.
/// Structural equality coincides with partition equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n_items: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary blocks, validating and canonicalizing them.
    pub fn from_blocks(n_items: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n_items];
        let mut blocks = blocks;
        for (b, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::EmptyBlock(b));
            }
            for &item in block.iter() {
                if item >= n_items {
                    return Err(Error::ItemOutOfRange { item, n_items });
                }
                if seen[item] {
                    return Err(Error::DuplicateItem(item));
                }
                seen[item] = true;
            }
            block.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { n_items, blocks })
    }

    /// Blocks must already be canonical.
    pub(crate) fn from_canonical_blocks(n_items: usize, blocks: Vec<Vec<usize>>) -> Self {
        debug_assert!(blocks.windows(2).all(|w| w[0][0] < w[1][0]));
        Partition { n_items, blocks }
    }

    pub fn from_labels(labels: &LabelVector) -> Result<Self> {
        Self::from_label_slice(labels.as_slice())
    }

    pub fn from_label_slice(labels: &[u32]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabels);
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index_of: std::collections::HashMap<u32, usize> = Default::default();
        for (item, &label) in labels.iter().enumerate() {
            if label == 0 {
                return Err(Error::NonPositiveLabel(0));
            }
            let b = *index_of.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(item);
        }
        // first-seen order is already ascending by smallest member
        Ok(Partition::from_canonical_blocks(labels.len(), blocks))
    }

    pub fn one_block(n_items: usize) -> Self {
        let blocks = if n_items == 0 {
            Vec::new()
        } else {
            vec![(0..n_items).collect()]
        };
        Partition { n_items, blocks }
    }

    pub fn singletons(n_items: usize) -> Self {
        Partition {
            n_items,
            blocks: (0..n_items).map(|i| vec![i]).collect(),
        }
    }

    /// The partition of the empty set over a universe of `n_items`.
    pub fn empty(n_items: usize) -> Self {
        Partition {
            n_items,
            blocks: Vec::new(),
        }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n_assigned(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.n_assigned() == self.n_items
    }

    pub fn block_of(&self, item: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&item).is_ok())
    }

    pub fn contains(&self, item: usize) -> bool {
        self.block_of(item).is_some()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Canonical one-based labels: block `k` (ordered by smallest member) gets label `k+1`.
    pub fn to_canonical_labels(&self) -> Result<LabelVector> {
        let mut labels = vec![0u32; self.n_items];
        for (k, block) in self.blocks.iter().enumerate() {
            for &i in block {
                labels[i] = k as u32 + 1;
            }
        }
        if labels.contains(&0) {
            return Err(Error::Incomplete);
        }
        Ok(LabelVector(labels))
    }

    /// Returns the partition with `item` removed; a singleton block disappears.
    pub fn remove_item(&self, item: usize) -> Result<Self> {
        if item >= self.n_items {
            return Err(Error::ItemOutOfRange {
                item,
                n_items: self.n_items,
            });
        }
        let b = self.block_of(item).ok_or(Error::ItemAbsent(item))?;
        let mut blocks = self.blocks.clone();
        blocks[b].retain(|&i| i != item);
        if blocks[b].is_empty() {
            blocks.remove(b);
        } else {
            // the smallest member may have changed
            blocks.sort_unstable_by_key(|blk| blk[0]);
        }
        Ok(Partition::from_canonical_blocks(self.n_items, blocks))
    }

    /// Inserts `item` into block `block` (canonical index) or into a new singleton (`None`).
    pub fn insert_item(&self, item: usize, block: Option<usize>) -> Result<Self> {
        if item >= self.n_items {
            return Err(Error::ItemOutOfRange {
                item,
                n_items: self.n_items,
            });
        }
        if self.contains(item) {
            return Err(Error::ItemPresent(item));
        }
        let mut blocks = self.blocks.clone();
        match block {
            Some(b) => {
                let blk = blocks.get_mut(b).ok_or(Error::InvalidBlock(b))?;
                let pos = blk.binary_search(&item).unwrap_err();
                blk.insert(pos, item);
            }
            None => blocks.push(vec![item]),
        }
        blocks.sort_unstable_by_key(|blk| blk[0]);
        Ok(Partition::from_canonical_blocks(self.n_items, blocks))
    }

    /// The `K + 1` partitions reachable by inserting `item`: each existing block in canonical
    /// order, then the new singleton.
    pub fn candidate_insertions(&self, item: usize) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        for b in 0..self.blocks.len() {
            out.push(self.insert_item(item, Some(b))?);
        }
        out.push(self.insert_item(item, None)?);
        Ok(out)
    }

    /// True when `a` and `b` share a block.
    pub fn co_clustered(&self, a: usize, b: usize) -> bool {
        match (self.block_of(a), self.block_of(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

impl fmt::Display for Partition {
    /// Canonical label text for complete partitions, block notation otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_canonical_labels() {
            Ok(labels) => write!(f, "{labels}"),
            Err(_) => {
                f.write_str("{")?;
                for (k, b) in self.blocks.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str("{")?;
                    for (j, i) in b.iter().enumerate() {
                        if j > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", i + 1)?;
                    }
                    f.write_str("}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Partition::from_labels(&s.parse()?)
    }
}
