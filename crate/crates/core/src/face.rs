//! Faces as vertex bitsets.
//!
//! A [`Face`] is a finite set of [`VertexId`]s stored as a little bitset. Sets
//! over the first 128 vertices live inline, which covers every hot loop in the
//! crate (Hochster sums never exceed 64 vertices). Ordering is lexicographic
//! on the increasing vertex sequence, so sorting faces gives the same order as
//! sorting their sorted vertex lists.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Dense index into a vertex table.
pub type VertexId = u32;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Face {
    // Invariant: no trailing zero words.
    words: SmallVec<[u64; 2]>,
}

impl Face {
    pub fn empty() -> Self {
        Face::default()
    }

    pub fn singleton(v: VertexId) -> Self {
        let mut f = Face::empty();
        f.insert(v);
        f
    }

    pub fn from_vertices<I: IntoIterator<Item = VertexId>>(vertices: I) -> Self {
        let mut f = Face::empty();
        for v in vertices {
            f.insert(v);
        }
        f
    }

    /// Builds the set `{ base[i] : bit i of mask set }`.
    pub fn from_mask(mask: u64, base: &[VertexId]) -> Self {
        let mut f = Face::empty();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            f.insert(base[i]);
            m &= m - 1;
        }
        f
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, v: VertexId) {
        let (w, b) = ((v / 64) as usize, v % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << b;
    }

    pub fn remove(&mut self, v: VertexId) {
        let (w, b) = ((v / 64) as usize, v % 64);
        if w < self.words.len() {
            self.words[w] &= !(1u64 << b);
            self.trim();
        }
    }

    pub fn with(&self, v: VertexId) -> Face {
        let mut f = self.clone();
        f.insert(v);
        f
    }

    pub fn without(&self, v: VertexId) -> Face {
        let mut f = self.clone();
        f.remove(v);
        f
    }

    pub fn contains(&self, v: VertexId) -> bool {
        let (w, b) = ((v / 64) as usize, v % 64);
        self.words.get(w).is_some_and(|x| x >> b & 1 == 1)
    }

    /// Number of vertices.
    pub fn card(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Dimension, `card − 1`; the empty face has dimension −1.
    pub fn dim(&self) -> isize {
        self.card() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Face) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &Face) -> Face {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut f = long.clone();
        for (a, b) in f.words.iter_mut().zip(short.words.iter()) {
            *a |= b;
        }
        f
    }

    pub fn intersection(&self, other: &Face) -> Face {
        let mut words: SmallVec<[u64; 2]> = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        Face { words }
    }

    pub fn difference(&self, other: &Face) -> Face {
        let mut f = self.clone();
        for (a, b) in f.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
        f.trim();
        f
    }

    /// Vertices in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut m = w;
            std::iter::from_fn(move || {
                if m == 0 {
                    return None;
                }
                let b = m.trailing_zeros();
                m &= m - 1;
                Some(i as u32 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.vertices().collect()
    }

    pub fn max_vertex(&self) -> Option<VertexId> {
        let last = self.words.len().checked_sub(1)?;
        Some(last as u32 * 64 + 63 - self.words[last].leading_zeros())
    }

    /// Codimension-one faces, obtained by deleting the vertices in increasing
    /// order; the `i`-th face carries incidence sign `(−1)^i`.
    pub fn boundary(&self) -> impl Iterator<Item = Face> + '_ {
        self.vertices().map(move |v| self.without(v))
    }

    /// Bitmask of the positions of this face's vertices inside the sorted
    /// slice `base`; `None` if a vertex is missing from `base`.
    pub fn to_mask(&self, base: &[VertexId]) -> Option<u64> {
        let mut m = 0u64;
        for v in self.vertices() {
            let i = base.binary_search(&v).ok()?;
            m |= 1u64 << i;
        }
        Some(m)
    }
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.words.len().max(other.words.len());
        for i in 0..n {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            if a == b {
                continue;
            }
            let t = (a ^ b).trailing_zeros();
            // The set owning bit t has the smaller element at the first
            // differing position, unless the other set stops right there.
            let (owner_is_self, rest) = if a >> t & 1 == 1 {
                (true, (b >> t, other.words.get(i + 1..).unwrap_or(&[])))
            } else {
                (false, (a >> t, self.words.get(i + 1..).unwrap_or(&[])))
            };
            let other_exhausted = rest.0 == 0 && rest.1.iter().all(|&w| w == 0);
            return match (owner_is_self, other_exhausted) {
                (true, true) => Ordering::Greater,
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Less,
                (false, false) => Ordering::Greater,
            };
        }
        Ordering::Equal
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.vertices()).finish()
    }
}

/// Orders faces by cardinality, then lexicographically.
pub fn graded_cmp(a: &Face, b: &Face) -> Ordering {
    a.card().cmp(&b.card()).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_set_ops() {
        let a = Face::from_vertices([0, 2, 70]);
        assert_eq!(a.card(), 3);
        assert_eq!(a.to_vec(), vec![0, 2, 70]);
        assert!(a.contains(70) && !a.contains(1));
        assert_eq!(a.max_vertex(), Some(70));
        let b = a.without(70);
        assert_eq!(b, Face::from_vertices([0, 2]));
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(Face::empty().dim(), -1);
        assert_eq!(a.boundary().count(), 3);
    }

    proptest! {
        #[test]
        fn order_matches_sorted_vectors(
            a in proptest::collection::btree_set(0u32..140, 0..6),
            b in proptest::collection::btree_set(0u32..140, 0..6),
        ) {
            let fa = Face::from_vertices(a.iter().copied());
            let fb = Face::from_vertices(b.iter().copied());
            let va: Vec<u32> = a.into_iter().collect();
            let vb: Vec<u32> = b.into_iter().collect();
            prop_assert_eq!(fa.cmp(&fb), va.cmp(&vb));
            prop_assert_eq!(fa.union(&fb).card() + fa.intersection(&fb).card(), fa.card() + fb.card());
            prop_assert_eq!(fa.difference(&fb).is_disjoint(&fb), true);
        }
    }
}
