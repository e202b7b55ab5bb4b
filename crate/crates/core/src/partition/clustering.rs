use std::collections::BTreeSet;

use super::{Candidate, Partition};
use crate::error::{Error, Result};

/// Mutable partition state owned by a chain.
///
/// Blocks live in numbered slots. Slot ids are stable while a block exists; an emptied slot
/// is reused by the next new block (smallest free id first), so slot ids behave like the
/// labels of a label vector. Canonical block order is recovered with [`canonical_slots`].
///
/// [`canonical_slots`]: Clustering::canonical_slots
#[derive(Clone, Debug)]
pub struct Clustering {
    slot_of: Vec<Option<usize>>,
    members: Vec<BTreeSet<usize>>,
    n_blocks: usize,
}

impl Clustering {
    /// All items unassigned.
    pub fn new(n_items: usize) -> Self {
        Clustering {
            slot_of: vec![None; n_items],
            members: Vec::new(),
            n_blocks: 0,
        }
    }

    /// Slot `k` holds canonical block `k`.
    pub fn from_partition(partition: &Partition) -> Self {
        let mut c = Clustering::new(partition.n_items());
        for (k, block) in partition.blocks().iter().enumerate() {
            c.members.push(block.iter().copied().collect());
            for &i in block {
                c.slot_of[i] = Some(k);
            }
        }
        c.n_blocks = partition.n_blocks();
        c
    }

    pub fn one_block(n_items: usize) -> Self {
        Clustering::from_partition(&Partition::one_block(n_items))
    }

    pub fn n_items(&self) -> usize {
        self.slot_of.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn n_assigned(&self) -> usize {
        self.slot_of.iter().filter(|s| s.is_some()).count()
    }

    pub fn slot_of(&self, item: usize) -> Option<usize> {
        self.slot_of.get(item).copied().flatten()
    }

    pub fn slot_size(&self, slot: usize) -> usize {
        self.members.get(slot).map_or(0, BTreeSet::len)
    }

    pub fn members(&self, slot: usize) -> impl Iterator<Item = usize> + '_ {
        self.members.get(slot).into_iter().flatten().copied()
    }

    /// Number of slot ids in use or free; every slot id is below this.
    pub fn slot_capacity(&self) -> usize {
        self.members.len()
    }

    pub fn active_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(s, _)| s)
    }

    /// Non-empty slots ordered by their smallest member.
    pub fn canonical_slots(&self) -> Vec<usize> {
        let mut slots: Vec<(usize, usize)> = self
            .members
            .iter()
            .enumerate()
            .filter_map(|(s, m)| m.first().map(|&min| (min, s)))
            .collect();
        slots.sort_unstable();
        slots.into_iter().map(|(_, s)| s).collect()
    }

    /// The slot a new block would occupy.
    pub fn next_free_slot(&self) -> usize {
        self.members
            .iter()
            .position(BTreeSet::is_empty)
            .unwrap_or(self.members.len())
    }

    pub fn max_block_size(&self) -> usize {
        self.members.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Removes `item`, returning its former slot and whether the slot became empty.
    pub fn remove(&mut self, item: usize) -> Result<(usize, bool)> {
        let n_items = self.n_items();
        let slot = self
            .slot_of
            .get_mut(item)
            .ok_or(Error::ItemOutOfRange { item, n_items })?
            .take()
            .ok_or(Error::ItemAbsent(item))?;
        self.members[slot].remove(&item);
        let emptied = self.members[slot].is_empty();
        if emptied {
            self.n_blocks -= 1;
        }
        Ok((slot, emptied))
    }

    /// Places an unassigned `item` and returns the slot it landed in.
    pub fn insert(&mut self, item: usize, target: Candidate) -> Result<usize> {
        let slot = match target {
            Candidate::Join(s) => {
                if self.slot_size(s) == 0 {
                    return Err(Error::InvalidBlock(s));
                }
                s
            }
            Candidate::New => self.next_free_slot(),
        };
        self.insert_into_slot(item, slot)?;
        Ok(slot)
    }

    /// Places `item` into `slot`, opening the slot if it is free.
    pub fn insert_into_slot(&mut self, item: usize, slot: usize) -> Result<()> {
        let n_items = self.n_items();
        match self.slot_of.get(item) {
            None => return Err(Error::ItemOutOfRange { item, n_items }),
            Some(Some(_)) => return Err(Error::ItemPresent(item)),
            Some(None) => {}
        }
        if slot >= self.members.len() {
            self.members.resize_with(slot + 1, BTreeSet::new);
        }
        if self.members[slot].is_empty() {
            self.n_blocks += 1;
        }
        self.members[slot].insert(item);
        self.slot_of[item] = Some(slot);
        Ok(())
    }

    /// Moves an assigned item; returns `(from, to, from_emptied)`.
    pub fn move_item(&mut self, item: usize, target: Candidate) -> Result<(usize, usize, bool)> {
        if let Candidate::Join(s) = target {
            if self.slot_of(item) == Some(s) {
                return Ok((s, s, false));
            }
            if self.slot_size(s) == 0 {
                return Err(Error::InvalidBlock(s));
            }
        }
        let (from, emptied) = self.remove(item)?;
        let to = self.insert(item, target)?;
        Ok((from, to, emptied))
    }

    pub fn to_partition(&self) -> Partition {
        let blocks = self
            .canonical_slots()
            .into_iter()
            .map(|s| self.members[s].iter().copied().collect())
            .collect();
        Partition::from_canonical_blocks(self.n_items(), blocks)
    }

    /// Partition equality, independent of slot numbering.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        if self.n_items() != other.n_items() || self.n_blocks != other.n_blocks {
            return false;
        }
        let mut map = vec![usize::MAX; self.members.len()];
        for (a, b) in self.slot_of.iter().zip(&other.slot_of) {
            match (a, b) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    if map[*a] == usize::MAX {
                        map[*a] = *b;
                    } else if map[*a] != *b {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        // equal block counts make an injective map onto other's blocks
        let mut used: Vec<usize> = map.iter().copied().filter(|&b| b != usize::MAX).collect();
        used.sort_unstable();
        used.windows(2).all(|w| w[0] != w[1])
    }

    /// The candidates for an unassigned item in canonical order, new block last.
    pub fn candidates(&self) -> Vec<Candidate> {
        let mut c: Vec<Candidate> = self
            .canonical_slots()
            .into_iter()
            .map(Candidate::Join)
            .collect();
        c.push(Candidate::New);
        c
    }

    /// The full partition obtained by inserting `item` at `target`, for oracles and debugging.
    pub fn materialize(&self, item: usize, target: Candidate) -> Result<Partition> {
        let mut c = self.clone();
        c.insert(item, target)?;
        Ok(c.to_partition())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::test_util::p1;

    #[test]
    fn slots_reuse_smallest_free_id() {
        let mut c = Clustering::from_partition(&p1(4, &[&[1], &[2, 3], &[4]]));
        assert_eq!(c.remove(0).unwrap(), (0, true));
        assert_eq!(c.next_free_slot(), 0);
        assert_eq!(c.insert(0, Candidate::New).unwrap(), 0);
        assert_eq!(c.n_blocks(), 3);
        assert_eq!(c.to_partition(), p1(4, &[&[1], &[2, 3], &[4]]));
    }

    #[test]
    fn same_partition_ignores_slot_ids() {
        let a = Clustering::from_partition(&p1(4, &[&[1, 4], &[2, 3]]));
        let mut b = Clustering::new(4);
        b.insert_into_slot(1, 5).unwrap();
        b.insert_into_slot(2, 5).unwrap();
        b.insert_into_slot(0, 2).unwrap();
        b.insert_into_slot(3, 2).unwrap();
        assert!(a.same_partition(&b));
        b.move_item(3, Candidate::Join(5)).unwrap();
        assert!(!a.same_partition(&b));
    }

    #[test]
    fn candidates_follow_canonical_order() {
        let mut c = Clustering::new(4);
        c.insert_into_slot(1, 0).unwrap();
        c.insert_into_slot(2, 0).unwrap();
        c.insert_into_slot(0, 3).unwrap();
        assert_eq!(
            c.candidates(),
            vec![Candidate::Join(3), Candidate::Join(0), Candidate::New]
        );
        let parts: Vec<_> = c
            .candidates()
            .into_iter()
            .map(|t| c.materialize(3, t).unwrap())
            .collect();
        assert_eq!(parts, c.to_partition().candidate_insertions(3).unwrap());
    }

    #[test]
    fn move_to_same_block_is_noop() {
        let mut c = Clustering::one_block(3);
        assert_eq!(c.move_item(1, Candidate::Join(0)).unwrap(), (0, 0, false));
        assert_eq!(c.n_blocks(), 1);
    }
}
