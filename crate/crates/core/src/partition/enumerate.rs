use super::Partition;

/// Bell number `B(n)`, or `None` on overflow.
pub fn bell_number(n: usize) -> Option<u64> {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last()?);
        for &r in &row {
            let v = next.last()?.checked_add(r)?;
            next.push(v);
        }
        row = next;
    }
    Some(row[0])
}

/// Every partition of `{0, .., n-1}` in restricted-growth-string order.
#[derive(Clone, Debug)]
pub struct PartitionIter {
    rgs: Vec<u32>,
    maxes: Vec<u32>,
    done: bool,
}

impl PartitionIter {
    pub fn new(n_items: usize) -> Self {
        PartitionIter {
            rgs: vec![0; n_items],
            maxes: vec![0; n_items],
            done: n_items == 0,
        }
    }

    fn advance(&mut self) {
        let n = self.rgs.len();
        // rightmost position that can still grow
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.maxes[i - 1] {
                self.rgs[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let labels: Vec<u32> = self.rgs.iter().map(|&l| l + 1).collect();
        let p = Partition::from_label_slice(&labels).expect("growth strings are valid labels");
        self.advance();
        Some(p)
    }
}

pub fn all_partitions(n_items: usize) -> PartitionIter {
    PartitionIter::new(n_items)
}
