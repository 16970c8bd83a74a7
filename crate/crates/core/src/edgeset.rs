//! Fixed-size bitset over tree edges.
//!
//! A tree edge is identified by the id of its lower (child) endpoint, so an
//! `EdgeSet` for an `n`-vertex tree has `n` slots and the root slot is never
//! set.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EdgeSet {
    words: Vec<u64>,
    len: usize,
}

impl EdgeSet {
    pub fn new(len: usize) -> Self {
        EdgeSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Number of slots (vertices of the underlying tree).
    pub fn capacity(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, edge: usize) {
        debug_assert!(edge < self.len);
        self.words[edge / 64] |= 1 << (edge % 64);
    }

    #[inline]
    pub fn remove(&mut self, edge: usize) {
        self.words[edge / 64] &= !(1 << (edge % 64));
    }

    #[inline]
    pub fn contains(&self, edge: usize) -> bool {
        edge < self.len && self.words[edge / 64] & (1 << (edge % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn difference_with(&mut self, other: &EdgeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for EdgeSet {
    /// Builds a set just large enough for the largest element; mostly for tests.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let items: Vec<usize> = iter.into_iter().collect();
        let len = items.iter().max().map_or(0, |m| m + 1);
        let mut set = EdgeSet::new(len);
        for e in items {
            set.insert(e);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut a = EdgeSet::new(130);
        a.insert(1);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.count(), 3);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 64, 129]);

        let mut b = EdgeSet::new(130);
        b.insert(64);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        b.insert(2);
        assert!(!b.is_disjoint(&a));
        b.difference_with(&a);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![2]);
        a.union_with(&b);
        assert_eq!(a.count(), 4);
        a.remove(1);
        assert!(!a.contains(1));
    }
}
