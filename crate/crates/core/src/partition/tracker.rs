use super::{Candidate, Clustering};
use crate::error::{Error, Result};
use crate::Real;

/// Block sizes and pairwise block overlaps of two clusterings `X` and `Y`, with the
/// Mirkin distance between them kept current.
///
/// Slot ids index a dense `cap_x × cap_y` overlap grid that grows geometrically. Every
/// single-item move touches a constant number of cells.
#[derive(Clone, Debug)]
pub struct IntersectionTracker {
    sizes_x: Vec<u32>,
    sizes_y: Vec<u32>,
    overlap: Vec<u32>,
    cap_x: usize,
    cap_y: usize,
    distance: i64,
}

impl IntersectionTracker {
    /// Builds the tracker from scratch; both clusterings must assign the same items.
    pub fn new(x: &Clustering, y: &Clustering) -> Result<Self> {
        if x.n_items() != y.n_items() {
            return Err(Error::MismatchedItems(x.n_items(), y.n_items()));
        }
        let cap_x = x.slot_capacity().max(1);
        let cap_y = y.slot_capacity().max(1);
        let mut t = IntersectionTracker {
            sizes_x: vec![0; cap_x],
            sizes_y: vec![0; cap_y],
            overlap: vec![0; cap_x * cap_y],
            cap_x,
            cap_y,
            distance: 0,
        };
        for item in 0..x.n_items() {
            match (x.slot_of(item), y.slot_of(item)) {
                (Some(sx), Some(sy)) => t.insert(sx, sy),
                (None, None) => {}
                _ => return Err(Error::MismatchedItems(x.n_assigned(), y.n_assigned())),
            }
        }
        Ok(t)
    }

    /// Current `d(X, Y)`.
    pub fn distance(&self) -> i64 {
        self.distance
    }

    pub fn size_x(&self, slot: usize) -> u32 {
        self.sizes_x.get(slot).copied().unwrap_or(0)
    }

    pub fn size_y(&self, slot: usize) -> u32 {
        self.sizes_y.get(slot).copied().unwrap_or(0)
    }

    pub fn overlap(&self, sx: usize, sy: usize) -> u32 {
        if sx < self.cap_x && sy < self.cap_y {
            self.overlap[sx * self.cap_y + sy]
        } else {
            0
        }
    }

    fn grow(&mut self, sx: usize, sy: usize) {
        if sx < self.cap_x && sy < self.cap_y {
            return;
        }
        let new_x = if sx >= self.cap_x {
            (self.cap_x * 2).max(sx + 1)
        } else {
            self.cap_x
        };
        let new_y = if sy >= self.cap_y {
            (self.cap_y * 2).max(sy + 1)
        } else {
            self.cap_y
        };
        let mut grid = vec![0; new_x * new_y];
        for i in 0..self.cap_x {
            grid[i * new_y..i * new_y + self.cap_y]
                .copy_from_slice(&self.overlap[i * self.cap_y..(i + 1) * self.cap_y]);
        }
        self.overlap = grid;
        self.sizes_x.resize(new_x, 0);
        self.sizes_y.resize(new_y, 0);
        self.cap_x = new_x;
        self.cap_y = new_y;
    }

    /// Records an item leaving slot `sx` of `X` and slot `sy` of `Y`.
    pub fn remove(&mut self, sx: usize, sy: usize) {
        let cell = sx * self.cap_y + sy;
        let (a, b, ab) = (
            self.sizes_x[sx] as i64,
            self.sizes_y[sy] as i64,
            self.overlap[cell] as i64,
        );
        debug_assert!(ab > 0, "removing from an empty intersection");
        self.distance -= 2 * (a + b - 2 * ab);
        self.sizes_x[sx] -= 1;
        self.sizes_y[sy] -= 1;
        self.overlap[cell] -= 1;
    }

    /// Records an item entering slot `sx` of `X` and slot `sy` of `Y`.
    pub fn insert(&mut self, sx: usize, sy: usize) {
        self.grow(sx, sy);
        let cell = sx * self.cap_y + sy;
        self.sizes_x[sx] += 1;
        self.sizes_y[sy] += 1;
        self.overlap[cell] += 1;
        let (a, b, ab) = (
            self.sizes_x[sx] as i64,
            self.sizes_y[sy] as i64,
            self.overlap[cell] as i64,
        );
        self.distance += 2 * (a + b - 2 * ab);
    }

    /// Sizes after inserting the left-out item: `(|A|, |B|, |A ∩ B|)`.
    fn sizes_after(&self, target_x: Candidate, target_y: Candidate) -> (i64, i64, i64) {
        match (target_x, target_y) {
            (Candidate::Join(sx), Candidate::Join(sy)) => (
                self.size_x(sx) as i64 + 1,
                self.size_y(sy) as i64 + 1,
                self.overlap(sx, sy) as i64 + 1,
            ),
            (Candidate::Join(sx), Candidate::New) => (self.size_x(sx) as i64 + 1, 1, 1),
            (Candidate::New, Candidate::Join(sy)) => (1, self.size_y(sy) as i64 + 1, 1),
            (Candidate::New, Candidate::New) => (1, 1, 1),
        }
    }

    /// `d(π^k, ν^k') − d(π_{-n}, ν_{-n}) = 2(|A| + |B| − 2|A∩B|)`, with the tracker in the
    /// leave-out state and sizes counted after insertion.
    pub fn delta_distance(&self, target_x: Candidate, target_y: Candidate) -> Result<i64> {
        self.check(target_x, target_y)?;
        let (a, b, ab) = self.sizes_after(target_x, target_y);
        Ok(2 * (a + b - 2 * ab))
    }

    /// Shifted cost for the variation-of-information metric, scaled by the item count:
    /// `N·VI(π^k, ν^k') − S(π_{-n}, ν_{-n})` with `S = Σa ln a + Σb ln b − 2Σ ab ln ab`.
    pub fn delta_vi<T: Real>(&self, target_x: Candidate, target_y: Candidate) -> Result<T> {
        self.check(target_x, target_y)?;
        let (a, b, ab) = self.sizes_after(target_x, target_y);
        let inc = |n: i64| -> T { xlnx::<T>(n) - xlnx::<T>(n - 1) };
        Ok(inc(a) + inc(b) - T::of(2.0) * inc(ab))
    }

    fn check(&self, target_x: Candidate, target_y: Candidate) -> Result<()> {
        if let Candidate::Join(sx) = target_x {
            if self.size_x(sx) == 0 {
                return Err(Error::InvalidBlock(sx));
            }
        }
        if let Candidate::Join(sy) = target_y {
            if self.size_y(sy) == 0 {
                return Err(Error::InvalidBlock(sy));
            }
        }
        Ok(())
    }
}

fn xlnx<T: Real>(n: i64) -> T {
    if n <= 0 {
        T::zero()
    } else {
        let x = T::of(n as f64);
        x * x.ln()
    }
}
