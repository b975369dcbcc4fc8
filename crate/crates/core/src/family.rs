//! Relative face sets `Δ∖Γ` as flat, graded face lists.
//!
//! Every homological quantity in the crate is computed on one of these: the
//! faces of a pair, an induced sub-pair (`restrict`), or a vertex-link pair
//! (`link`). Both operations commute with taking `Δ∖Γ`, so the pair never has
//! to be rebuilt as two complexes inside hot loops.

use crate::face::{Face, VertexId};
use crate::homology::{level_ranks, reduced_betti_levels, reduced_betti_masks, BettiVector, FieldSpec};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaceFamily {
    /// `levels[k]`: faces with `k` vertices, sorted lexicographically.
    levels: Vec<Vec<Face>>,
}

impl FaceFamily {
    pub fn from_faces<I: IntoIterator<Item = Face>>(faces: I) -> Self {
        let mut levels: Vec<Vec<Face>> = Vec::new();
        for f in faces {
            let k = f.card();
            if levels.len() <= k {
                levels.resize_with(k + 1, Vec::new);
            }
            levels[k].push(f);
        }
        for level in &mut levels {
            level.sort_unstable();
            level.dedup();
        }
        FaceFamily { levels }
    }

    fn from_sorted_levels(mut levels: Vec<Vec<Face>>) -> Self {
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        FaceFamily { levels }
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(Vec::is_empty)
    }

    pub fn levels(&self) -> &[Vec<Face>] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<Vec<Face>> {
        self.levels
    }

    pub fn iter(&self) -> impl Iterator<Item = &Face> {
        self.levels.iter().flatten()
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.levels
            .get(f.card())
            .is_some_and(|l| l.binary_search(f).is_ok())
    }

    /// Largest face dimension, `None` for the empty family.
    pub fn top_dim(&self) -> Option<isize> {
        self.levels
            .iter()
            .rposition(|l| !l.is_empty())
            .map(|k| k as isize - 1)
    }

    /// Face counts `f_{−1}, f_0, …` up to the top dimension.
    pub fn f_counts(&self) -> Vec<u64> {
        let top = self.top_dim().map_or(0, |d| (d + 2) as usize);
        (0..top.max(1))
            .map(|k| self.levels.get(k).map_or(0, |l| l.len() as u64))
            .collect()
    }

    pub fn contains_empty_face(&self) -> bool {
        self.levels.first().is_some_and(|l| !l.is_empty())
    }

    /// Union of all faces.
    pub fn support(&self) -> Face {
        let mut s = Face::empty();
        for f in self.levels.iter().skip(1).flat_map(|l| l.iter()) {
            s = s.union(f);
        }
        s
    }

    /// Faces contained in `w` (the induced sub-pair on `w`).
    pub fn restrict(&self, w: &Face) -> FaceFamily {
        FaceFamily::from_sorted_levels(
            self.levels
                .iter()
                .map(|l| l.iter().filter(|f| f.is_subset(w)).cloned().collect())
                .collect(),
        )
    }

    /// `{ F ∖ F₀ : F₀ ⊆ F }`, i.e. the link pair of `F₀`.
    pub fn link(&self, f0: &Face) -> FaceFamily {
        let k0 = f0.card();
        let levels = self
            .levels
            .iter()
            .skip(k0)
            .map(|l| {
                let mut out: Vec<Face> = l
                    .iter()
                    .filter(|f| f0.is_subset(f))
                    .map(|f| f.difference(f0))
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        FaceFamily::from_sorted_levels(levels)
    }

    pub fn vertex_link(&self, v: VertexId) -> FaceFamily {
        self.link(&Face::singleton(v))
    }

    /// Faces with at most `k` vertices.
    pub fn skeleton(&self, k: usize) -> FaceFamily {
        FaceFamily::from_sorted_levels(self.levels.iter().take(k + 1).cloned().collect())
    }

    /// Reduced Betti numbers: entry `k` is `b̃_{k−1}`.
    pub fn reduced_betti(&self, field: FieldSpec) -> Vec<usize> {
        reduced_betti_levels(&self.levels, field)
    }

    pub fn betti(&self, field: FieldSpec) -> BettiVector {
        let ranks = level_ranks(&self.levels, field);
        let reduced = (0..self.levels.len())
            .map(|k| self.levels[k].len() - ranks[k] - ranks[k + 1])
            .collect();
        BettiVector::from_reduced(reduced, ranks.get(1).copied().unwrap_or(0), field)
    }
}

/// A family over at most 64 vertices with faces packed as bitmasks over
/// `base`; used by the subset sums, where restriction is a mask test.
#[derive(Clone, Debug)]
pub(crate) struct MaskFamily {
    pub base: Vec<VertexId>,
    pub levels: Vec<Vec<u64>>,
}

impl MaskFamily {
    /// `base` must be sorted, hold at most 64 vertices and cover the support.
    pub fn new(fam: &FaceFamily, base: Vec<VertexId>) -> Self {
        debug_assert!(base.len() <= 64);
        let levels = fam
            .levels
            .iter()
            .map(|l| {
                let mut out: Vec<u64> = l
                    .iter()
                    .map(|f| f.to_mask(&base).expect("face outside mask base"))
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        MaskFamily { base, levels }
    }

    pub fn restrict(&self, w: u64) -> Vec<Vec<u64>> {
        let mut levels: Vec<Vec<u64>> = self
            .levels
            .iter()
            .map(|l| l.iter().copied().filter(|m| m & !w == 0).collect())
            .collect();
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        levels
    }

    /// `b̃` of the restriction to `w`; entry `k` is `b̃_{k−1}`.
    pub fn restricted_betti(&self, w: u64, field: FieldSpec) -> Vec<usize> {
        reduced_betti_masks(&self.restrict(w), field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_faces(n: u32) -> FaceFamily {
        FaceFamily::from_faces((0u64..1 << n).map(|m| Face::from_mask(m, &(0..n).collect::<Vec<_>>())))
    }

    #[test]
    fn full_simplex_is_acyclic() {
        let fam = simplex_faces(4);
        assert_eq!(fam.len(), 16);
        assert!(fam.reduced_betti(FieldSpec::Rational).iter().all(|&b| b == 0));
    }

    #[test]
    fn boundary_of_simplex_is_sphere() {
        let full = simplex_faces(4);
        let top = Face::from_vertices(0..4);
        let sphere = FaceFamily::from_faces(full.iter().filter(|f| **f != top).cloned());
        assert_eq!(sphere.reduced_betti(FieldSpec::Prime(3)), vec![0, 0, 0, 1]);
        let link = sphere.vertex_link(0);
        assert_eq!(link.reduced_betti(FieldSpec::Rational), vec![0, 0, 1]);
    }

    #[test]
    fn relative_cell() {
        // (Δ², ∂Δ²): only the top face survives.
        let fam = FaceFamily::from_faces([Face::from_vertices([0, 1, 2])]);
        assert_eq!(fam.reduced_betti(FieldSpec::Prime(2)), vec![0, 0, 0, 1]);
    }

    #[test]
    fn mask_kernel_agrees() {
        let full = simplex_faces(5);
        let top = Face::from_vertices(0..5);
        let sphere = FaceFamily::from_faces(full.iter().filter(|f| **f != top).cloned());
        let mf = MaskFamily::new(&sphere, (0..5).collect());
        for w in 0u64..32 {
            let base: Vec<u32> = (0..5).collect();
            let expect = sphere.restrict(&Face::from_mask(w, &base)).reduced_betti(FieldSpec::Rational);
            assert_eq!(mf.restricted_betti(w, FieldSpec::Rational), expect);
        }
    }
}
