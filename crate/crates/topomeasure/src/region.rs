//! Fixed-width cell sets.
//!
//! A [`Region`] is a set of cell indices packed into a `u128`, so every space
//! handled by this crate has at most [`MAX_CELLS`] cells including ω.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not, Sub, SubAssign};

/// Largest number of cells a space may have.
pub const MAX_CELLS: usize = 128;

/// A subset of the cells of a space.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region(u128);

impl Region {
    pub const EMPTY: Region = Region(0);

    pub const fn from_bits(bits: u128) -> Self {
        Region(bits)
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    pub fn singleton(cell: usize) -> Self {
        debug_assert!(cell < MAX_CELLS);
        Region(1u128 << cell)
    }

    /// The first `n` cells.
    pub fn prefix(n: usize) -> Self {
        if n >= MAX_CELLS {
            Region(u128::MAX)
        } else {
            Region((1u128 << n) - 1)
        }
    }

    pub fn from_cells<I: IntoIterator<Item = usize>>(cells: I) -> Self {
        cells.into_iter().fold(Region::EMPTY, |r, c| r.with(c))
    }

    pub fn contains(self, cell: usize) -> bool {
        cell < MAX_CELLS && self.0 >> cell & 1 == 1
    }

    pub fn with(self, cell: usize) -> Self {
        Region(self.0 | 1u128 << cell)
    }

    pub fn without(self, cell: usize) -> Self {
        Region(self.0 & !(1u128 << cell))
    }

    pub fn insert(&mut self, cell: usize) {
        self.0 |= 1u128 << cell;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: Region) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Region) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersects(self, other: Region) -> bool {
        !self.is_disjoint(other)
    }

    /// Least cell index, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Cells {
        Cells(self.0)
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl BitOr for Region {
    type Output = Region;
    fn bitor(self, rhs: Region) -> Region {
        Region(self.0 | rhs.0)
    }
}

impl BitOrAssign for Region {
    fn bitor_assign(&mut self, rhs: Region) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for Region {
    type Output = Region;
    fn bitand(self, rhs: Region) -> Region {
        Region(self.0 & rhs.0)
    }
}

impl BitAndAssign for Region {
    fn bitand_assign(&mut self, rhs: Region) {
        self.0 &= rhs.0;
    }
}

impl Sub for Region {
    type Output = Region;
    fn sub(self, rhs: Region) -> Region {
        Region(self.0 & !rhs.0)
    }
}

impl SubAssign for Region {
    fn sub_assign(&mut self, rhs: Region) {
        self.0 &= !rhs.0;
    }
}

impl Not for Region {
    type Output = Region;
    fn not(self) -> Region {
        Region(!self.0)
    }
}

impl FromIterator<usize> for Region {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Region::from_cells(iter)
    }
}

impl IntoIterator for Region {
    type Item = usize;
    type IntoIter = Cells;
    fn into_iter(self) -> Cells {
        self.iter()
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Ascending iterator over the cells of a region.
#[derive(Clone)]
pub struct Cells(u128);

impl Iterator for Cells {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let c = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(c)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Cells {}

/// Submask enumeration in increasing numeric order.
pub struct Subsets {
    mask: u128,
    next: Option<u128>,
}

impl Iterator for Subsets {
    type Item = Region;

    fn next(&mut self) -> Option<Region> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some(cur.wrapping_sub(self.mask) & self.mask)
        };
        Some(Region(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iter_is_ascending() {
        let r = Region::from_cells([5, 0, 127, 64]);
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![0, 5, 64, 127]);
        assert_eq!(r.len(), 4);
        assert_eq!(r.first(), Some(0));
    }

    #[test]
    fn subsets_cover_powerset() {
        let r = Region::from_cells([1, 3, 4]);
        let subs: Vec<_> = r.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(r)));
        assert_eq!(subs[0], Region::EMPTY);
        assert_eq!(*subs.last().unwrap(), r);
    }

    #[test]
    fn set_algebra() {
        let a = Region::from_cells([0, 1, 2]);
        let b = Region::from_cells([2, 3]);
        assert_eq!(a | b, Region::from_cells([0, 1, 2, 3]));
        assert_eq!(a & b, Region::singleton(2));
        assert_eq!(a - b, Region::from_cells([0, 1]));
        assert!(!a.is_disjoint(b));
        assert_eq!(Region::prefix(128).len(), 128);
    }
}
