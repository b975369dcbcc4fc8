//! Simplicial posets: graded posets with a least element in which every lower
//! interval is Boolean. All homology goes through the barycentric subdivision.
//!
//! Faces are stored sorted by `(rank, id)` with the least element at index 0,
//! so the rank-1 faces (vertices) occupy indices `1..=n` and vertex `k` is
//! face `k + 1`. The same order is used by every derived poset, which keeps
//! face ids stable under links and restrictions.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{binomial, FVector, HVector, RelativePair, SimplicialComplex, VertexTable};
use crate::error::{Error, Result};
use crate::face::{Face, VertexId};
use crate::homology::{column_rank, Column, FieldSpec};
use crate::mu::{check_subset_budget, sigma_from_sums, MuVector, Provenance, VertexOrdering};
use crate::num::Rational;
use crate::Budgets;

/// One face as written in poset JSON. The least element is implicit; rank-1
/// faces list no covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetRecord {
    pub id: u64,
    pub rank: usize,
    #[serde(default)]
    pub covers: Vec<u64>,
}

/// `{"faces": [...], "gamma": [...]}`. A missing `gamma` is the void
/// subposet; a present one always contains the least element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetFile {
    pub faces: Vec<PosetRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetFace {
    /// `None` only for the least element of a poset read from records.
    pub id: Option<u64>,
    pub rank: usize,
    /// Indices of the codimension-one faces below.
    pub covers: Vec<usize>,
    /// Vertices below this face, as vertex indices.
    pub vertex_set: Face,
}

#[derive(Clone, Debug)]
pub struct SimplicialPoset {
    faces: Vec<PosetFace>,
    /// Face indices in the interval `[0̂, F]`, `F` included.
    below: Vec<Face>,
    n_vertices: usize,
}

fn idx(i: usize) -> VertexId {
    i as VertexId
}

impl SimplicialPoset {
    /// Validates and completes a face table given in `(rank, id)` order with
    /// the least element first.
    fn assemble(raw: Vec<(Option<u64>, usize, Vec<usize>)>) -> Result<Self> {
        let n_vertices = raw.iter().filter(|r| r.1 == 1).count();
        let mut faces: Vec<PosetFace> = Vec::with_capacity(raw.len());
        let mut below: Vec<Face> = Vec::with_capacity(raw.len());
        for (i, (id, rank, covers)) in raw.into_iter().enumerate() {
            let bad = |reason: String| Error::Poset {
                id: id.unwrap_or(0),
                reason,
            };
            let mut vs = Face::empty();
            let mut bl = Face::singleton(idx(i));
            if rank == 1 {
                vs.insert(idx(i - 1));
            }
            for &c in &covers {
                if faces[c].rank + 1 != rank {
                    return Err(bad(format!("cover of rank {} below a face of rank {rank}", faces[c].rank)));
                }
                if rank > 1 {
                    vs = vs.union(&faces[c].vertex_set);
                }
                bl = bl.union(&below[c]);
            }
            if vs.card() != rank {
                return Err(bad(format!("rank {rank} but {} vertices below", vs.card())));
            }
            let mut counts = vec![0u64; rank + 1];
            let mut seen = std::collections::HashSet::new();
            for g in bl.vertices() {
                let g = g as usize;
                let (r, s) = if g == i { (rank, &vs) } else { (faces[g].rank, &faces[g].vertex_set) };
                counts[r] += 1;
                if !seen.insert(s.clone()) {
                    return Err(bad("two faces below it have the same vertex set".into()));
                }
            }
            for (k, &c) in counts.iter().enumerate() {
                if c as i64 != binomial(rank as i64, k as i64) {
                    return Err(bad(format!("{c} faces of rank {k} below it, expected C({rank},{k})")));
                }
            }
            faces.push(PosetFace {
                id,
                rank,
                covers,
                vertex_set: vs,
            });
            below.push(bl);
        }
        Ok(SimplicialPoset {
            faces,
            below,
            n_vertices,
        })
    }

    pub fn faces(&self) -> &[PosetFace] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.len() <= 1
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Face index of vertex `k`.
    pub fn vertex_face(&self, k: usize) -> usize {
        k + 1
    }

    pub fn id_of(&self, i: usize) -> u64 {
        self.faces[i].id.unwrap_or(0)
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.faces.iter().position(|f| f.id == Some(id))
    }

    /// Vertex index of the rank-1 face with this id.
    pub fn vertex_of(&self, id: u64) -> Option<usize> {
        self.index_of(id).filter(|&i| self.faces[i].rank == 1).map(|i| i - 1)
    }

    /// Maximum rank − 1; −1 for the least element alone.
    pub fn dim(&self) -> isize {
        self.faces.iter().map(|f| f.rank as isize).max().unwrap_or(0) - 1
    }

    /// `g ⪯ f`.
    pub fn leq(&self, g: usize, f: usize) -> bool {
        self.below[f].contains(idx(g))
    }

    /// The face poset of a simplicial complex. Vertex `k` of the poset is the
    /// `k`-th vertex of `c` in id order; faces get ids `1, 2, …` in graded order.
    pub fn from_complex(c: &SimplicialComplex) -> Result<Self> {
        let faces: Vec<Face> = c.faces().into_iter().filter(|f| !f.is_empty()).collect();
        let index: HashMap<&Face, usize> = faces.iter().enumerate().map(|(i, f)| (f, i + 1)).collect();
        let mut raw = vec![(None, 0usize, Vec::new())];
        for (i, f) in faces.iter().enumerate() {
            let covers = if f.card() == 1 {
                vec![0]
            } else {
                f.boundary().map(|g| index[&g]).collect()
            };
            raw.push((Some(i as u64 + 1), f.card(), covers));
        }
        Self::assemble(raw)
    }

    /// Sub-poset on `keep` (ascending indices, new least element first), with
    /// ranks shifted down by the rank of `keep[0]`.
    fn sub(&self, keep: &[usize]) -> (SimplicialPoset, Vec<usize>) {
        let shift = self.faces[keep[0]].rank;
        let new_index: HashMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let raw = keep
            .iter()
            .map(|&o| {
                let f = &self.faces[o];
                let covers = f.covers.iter().filter_map(|c| new_index.get(c).copied()).collect();
                (f.id, f.rank - shift, covers)
            })
            .collect();
        let p = Self::assemble(raw).expect("links and restrictions of simplicial posets are simplicial posets");
        (p, keep.to_vec())
    }

    /// Faces `F ⪰ f`.
    fn above(&self, f: usize) -> Vec<usize> {
        (f..self.faces.len()).filter(|&g| self.leq(f, g)).collect()
    }

    /// `{F : v ⪯ F}` re-rooted at `v`, with the map back to face indices here.
    pub fn link_face(&self, f: usize) -> (SimplicialPoset, Vec<usize>) {
        self.sub(&self.above(f))
    }

    /// `Δ_W = {F : V(F) ⊆ W}` for a set of vertex indices.
    pub fn restriction(&self, w: &Face) -> (SimplicialPoset, Vec<usize>) {
        let keep: Vec<usize> = (0..self.faces.len())
            .filter(|&i| self.faces[i].vertex_set.is_subset(w))
            .collect();
        self.sub(&keep)
    }

    /// Maximal chains of nonempty faces among those with `keep` set; as faces
    /// over sd vertex ids (face index − 1). `keep` must be a lower ideal.
    fn chains(&self, keep: &[bool]) -> Vec<Face> {
        let n = self.faces.len();
        let mut has_parent = vec![false; n];
        for (i, f) in self.faces.iter().enumerate() {
            if keep[i] {
                for &c in &f.covers {
                    has_parent[c] = true;
                }
            }
        }
        let mut out = Vec::new();
        for top in 1..n {
            if keep[top] && !has_parent[top] {
                self.chains_down(top, Face::singleton(idx(top - 1)), &mut out);
            }
        }
        out
    }

    fn chains_down(&self, f: usize, acc: Face, out: &mut Vec<Face>) {
        if self.faces[f].rank <= 1 {
            out.push(acc);
            return;
        }
        for &c in &self.faces[f].covers {
            self.chains_down(c, acc.with(idx(c - 1)), out);
        }
    }

    /// Vertex table of the subdivision: labels are face ids.
    fn sd_table(&self) -> Arc<VertexTable> {
        let labels: Vec<String> = self.faces[1..].iter().map(|f| f.id.unwrap_or(0).to_string()).collect();
        Arc::new(VertexTable::from_labels(labels).expect("face ids are distinct"))
    }

    fn sd_complex(&self, table: &Arc<VertexTable>, keep: &[bool]) -> SimplicialComplex {
        if !keep[0] {
            return SimplicialComplex::void(table.clone());
        }
        let chains = self.chains(keep);
        if chains.is_empty() {
            SimplicialComplex::empty(table.clone())
        } else {
            SimplicialComplex::from_faces(table.clone(), chains)
        }
    }
}

/// Validates records and builds the poset. Errors name the offending id.
pub fn build_poset(records: &[PosetRecord]) -> Result<SimplicialPoset> {
    let mut recs: Vec<&PosetRecord> = records.iter().collect();
    recs.sort_by_key(|r| (r.rank, r.id));
    let mut index = HashMap::new();
    for (i, r) in recs.iter().enumerate() {
        if r.rank == 0 {
            return Err(Error::Poset {
                id: r.id,
                reason: "rank 0 is reserved for the implicit least element".into(),
            });
        }
        if index.insert(r.id, i + 1).is_some() {
            return Err(Error::Poset {
                id: r.id,
                reason: "duplicate id".into(),
            });
        }
    }
    let mut raw = vec![(None, 0usize, Vec::new())];
    for r in recs {
        let bad = |reason: String| Error::Poset { id: r.id, reason };
        let mut covers = Vec::with_capacity(r.covers.len());
        for c in &r.covers {
            covers.push(*index.get(c).ok_or_else(|| bad(format!("unknown cover {c}")))?);
        }
        let mut dedup = covers.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != covers.len() {
            return Err(bad("repeated cover".into()));
        }
        if r.rank == 1 {
            if !covers.is_empty() {
                return Err(bad("a vertex covers only the least element".into()));
            }
            covers.push(0);
        } else if covers.len() != r.rank {
            return Err(bad(format!("rank {} needs {} covers, found {}", r.rank, r.rank, covers.len())));
        }
        raw.push((Some(r.id), r.rank, covers));
    }
    SimplicialPoset::assemble(raw)
}

/// `lk(v, Δ)` for the vertex with id `v`.
pub fn poset_link(v: u64, d: &SimplicialPoset) -> Result<SimplicialPoset> {
    let k = d.vertex_of(v).ok_or_else(|| Error::Poset {
        id: v,
        reason: "not a vertex".into(),
    })?;
    Ok(d.link_face(d.vertex_face(k)).0)
}

/// `Δ_W` for a set of vertex ids.
pub fn poset_restriction(d: &SimplicialPoset, w: &[u64]) -> Result<SimplicialPoset> {
    Ok(d.restriction(&vertex_ids_to_face(d, w)?).0)
}

fn vertex_ids_to_face(d: &SimplicialPoset, w: &[u64]) -> Result<Face> {
    w.iter()
        .map(|&id| {
            d.vertex_of(id).map(idx).ok_or_else(|| Error::Poset {
                id,
                reason: "not a vertex".into(),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(Face::from_vertices)
}

/// Order complex of `Δ ∖ {0̂}`; vertex labels are face ids.
pub fn barycentric_subdivision(d: &SimplicialPoset) -> SimplicialComplex {
    let keep = vec![true; d.len()];
    d.sd_complex(&d.sd_table(), &keep)
}

/// sd(ς): before each `v_k`, the barycenters of the faces of `Δ_{v_1..v_k}`
/// that strictly contain `v_k`, in increasing rank with ties by face id. With
/// `tie_seed`, ties are instead broken by a seeded shuffle (any such choice is
/// a valid extension). `v_k` must come after its block: a barycenter `w` of
/// `F ∌ Γ` then sees the subdivided `∂F` minus `v_k`, which is acyclic.
pub fn sd_ordering(d: &SimplicialPoset, s: &VertexOrdering, tie_seed: Option<u64>) -> Result<VertexOrdering> {
    check_poset_ordering(d, s)?;
    let mut rng = tie_seed.map(ChaCha8Rng::seed_from_u64);
    let mut prefix = Face::empty();
    let mut out = Vec::with_capacity(d.len() - 1);
    for &v in s.as_slice() {
        prefix.insert(v);
        let new: Vec<usize> = (1..d.len())
            .filter(|&i| {
                let vs = &d.faces[i].vertex_set;
                vs.contains(v) && vs.card() > 1 && vs.is_subset(&prefix)
            })
            .collect();
        let mut start = 0;
        while start < new.len() {
            let r = d.faces[new[start]].rank;
            let end = start + new[start..].iter().take_while(|&&i| d.faces[i].rank == r).count();
            let mut group = new[start..end].to_vec();
            if let Some(rng) = rng.as_mut() {
                group.shuffle(rng);
            }
            out.extend(group.into_iter().map(|i| idx(i - 1)));
            start = end;
        }
        out.push(v);
    }
    Ok(VertexOrdering::new(out))
}

fn check_poset_ordering(d: &SimplicialPoset, s: &VertexOrdering) -> Result<()> {
    let mut sorted = s.as_slice().to_vec();
    sorted.sort_unstable();
    if sorted != (0..d.n_vertices()).map(idx).collect::<Vec<_>>() {
        return Err(Error::Ordering(format!(
            "ordering must list each of the {} poset vertices exactly once",
            d.n_vertices()
        )));
    }
    Ok(())
}

/// Ordering of poset vertices given by their ids.
pub fn poset_ordering(d: &SimplicialPoset, ids: &[u64]) -> Result<VertexOrdering> {
    let perm = ids
        .iter()
        .map(|&id| {
            d.vertex_of(id).map(idx).ok_or_else(|| Error::Poset {
                id,
                reason: "not a vertex".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ord = VertexOrdering::new(perm);
    check_poset_ordering(d, &ord)?;
    Ok(ord)
}

/// A simplicial poset with a lower ideal `Γ`.
#[derive(Clone, Debug)]
pub struct RelativePosetPair {
    pub delta: SimplicialPoset,
    gamma: Vec<bool>,
}

impl RelativePosetPair {
    /// `gamma = None` is the void subposet; otherwise the listed ids plus the
    /// least element, which must form a lower ideal.
    pub fn new(delta: SimplicialPoset, gamma: Option<&[u64]>) -> Result<Self> {
        let mut mask = vec![false; delta.len()];
        if let Some(ids) = gamma {
            mask[0] = true;
            for &id in ids {
                let i = delta.index_of(id).ok_or_else(|| Error::Poset {
                    id,
                    reason: "gamma lists an unknown face".into(),
                })?;
                mask[i] = true;
            }
            for i in 0..delta.len() {
                if mask[i] {
                    if let Some(g) = delta.below[i].vertices().find(|&g| !mask[g as usize]) {
                        return Err(Error::Poset {
                            id: delta.id_of(i),
                            reason: format!("gamma is not a lower ideal: misses face {} below it", delta.id_of(g as usize)),
                        });
                    }
                }
            }
        }
        Ok(RelativePosetPair { delta, gamma: mask })
    }

    pub fn absolute(delta: SimplicialPoset) -> Self {
        let gamma = vec![false; delta.len()];
        RelativePosetPair { delta, gamma }
    }

    pub fn from_file(file: &PosetFile) -> Result<Self> {
        Self::new(build_poset(&file.faces)?, file.gamma.as_deref())
    }

    pub fn is_void_gamma(&self) -> bool {
        self.gamma.iter().all(|&g| !g)
    }

    pub fn in_gamma(&self, i: usize) -> bool {
        self.gamma[i]
    }

    fn derived(&self, (delta, map): (SimplicialPoset, Vec<usize>)) -> RelativePosetPair {
        let gamma = map.iter().map(|&o| self.gamma[o]).collect();
        RelativePosetPair { delta, gamma }
    }

    /// `(lk(F, Δ), lk(F, Γ))` for the face at index `f`.
    pub fn link_face(&self, f: usize) -> RelativePosetPair {
        self.derived(self.delta.link_face(f))
    }

    pub fn vertex_link(&self, k: usize) -> RelativePosetPair {
        self.link_face(self.delta.vertex_face(k))
    }

    pub fn restriction(&self, w: &Face) -> RelativePosetPair {
        self.derived(self.delta.restriction(w))
    }

    /// `(lk(v, Δ_W), lk(v, Γ_W))` without building the restriction.
    fn prefix_link(&self, k: usize, w: &Face) -> RelativePosetPair {
        let v = self.delta.vertex_face(k);
        let keep: Vec<usize> = self
            .delta
            .above(v)
            .into_iter()
            .filter(|&g| self.delta.faces[g].vertex_set.is_subset(w))
            .collect();
        self.derived(self.delta.sub(&keep))
    }

    /// Faces of `Δ ∖ Γ`.
    pub fn faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.delta.len()).filter(|&i| !self.gamma[i])
    }

    pub fn is_void(&self) -> bool {
        self.gamma.iter().all(|&g| g)
    }

    /// Dimension of `Δ ∖ Γ`; `None` when void.
    pub fn dim(&self) -> Option<isize> {
        self.faces().map(|i| self.delta.faces[i].rank as isize - 1).max()
    }

    /// Maximal faces of `Δ` that are not in `Γ`.
    pub fn facets(&self) -> Vec<usize> {
        let mut covered = vec![false; self.delta.len()];
        for f in &self.delta.faces {
            for &c in &f.covers {
                covered[c] = true;
            }
        }
        self.faces().filter(|&i| !covered[i]).collect()
    }

    pub fn is_pure(&self) -> bool {
        let fs = self.facets();
        fs.iter().all(|&i| self.delta.faces[i].rank == self.delta.faces[fs[0]].rank)
    }

    pub fn f_vector(&self) -> FVector {
        let len = self.dim().map_or(1, |d| (d + 2) as usize);
        let mut f = vec![0u64; len];
        for i in self.faces() {
            f[self.delta.faces[i].rank] += 1;
        }
        FVector { f }
    }

    pub fn h_vector(&self, d_override: Option<usize>) -> HVector {
        HVector::from_f(&self.f_vector(), d_override)
    }

    /// `(sd Δ, sd Γ)` over one vertex table labelled by face ids.
    pub fn sd_pair(&self) -> RelativePair {
        let table = self.delta.sd_table();
        let all = vec![true; self.delta.len()];
        let delta = self.delta.sd_complex(&table, &all);
        let gamma = self.delta.sd_complex(&table, &self.gamma);
        RelativePair::new(delta, gamma).expect("sd of a lower ideal is a subcomplex")
    }

    /// `b̃_{−1}, b̃_0, …` through the subdivision.
    pub fn reduced_betti(&self, field: FieldSpec) -> Vec<usize> {
        self.sd_pair().family().reduced_betti(field)
    }

    /// `b̃` from the cellular chain complex of `Δ ∖ Γ`, with incidence sign
    /// `(−1)^j` when the vertex missing from the cover is the `j`-th of `V(F)`.
    /// Kept as an independent check of the subdivision route.
    pub fn cellular_betti(&self, field: FieldSpec) -> Vec<usize> {
        let top = match self.dim() {
            Some(d) => (d + 1) as usize,
            None => return Vec::new(),
        };
        let mut levels: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        for i in self.faces() {
            levels[self.delta.faces[i].rank].push(i);
        }
        let pos: HashMap<usize, usize> = levels
            .iter()
            .flat_map(|l| l.iter().enumerate().map(|(p, &i)| (i, p)))
            .collect();
        let ranks: Vec<usize> = (1..=top)
            .map(|r| {
                let cols: Vec<Column> = levels[r]
                    .iter()
                    .map(|&i| {
                        let f = &self.delta.faces[i];
                        let verts = f.vertex_set.to_vec();
                        let mut col: Column = f
                            .covers
                            .iter()
                            .filter(|c| !self.gamma[**c])
                            .map(|&c| {
                                let missing = f.vertex_set.difference(&self.delta.faces[c].vertex_set);
                                let j = verts.iter().position(|&u| missing.contains(u)).unwrap_or(0);
                                (pos[&c] as u32, if j % 2 == 0 { 1 } else { -1 })
                            })
                            .collect();
                        col.sort_unstable();
                        col
                    })
                    .collect();
                column_rank(&cols, levels[r - 1].len(), field)
            })
            .collect();
        (0..=top)
            .map(|r| {
                let into = if r == 0 { 0 } else { ranks[r - 1] };
                let out = ranks.get(r).copied().unwrap_or(0);
                levels[r].len() - into - out
            })
            .collect()
    }
}

/// `(f, h)` over `Δ ∖ Γ` with the natural `d`.
pub fn poset_f_h(p: &RelativePosetPair) -> (FVector, HVector) {
    let f = p.f_vector();
    let h = HVector::from_f(&f, None);
    (f, h)
}

fn poset_mu_len(p: &RelativePosetPair) -> usize {
    p.dim().map_or(0, |d| (d + 1).max(0) as usize)
}

fn add_betti(mu: &mut [u64], b: &[usize]) {
    for (m, x) in mu.iter_mut().zip(b) {
        *m += *x as u64;
    }
}

/// μ^ς of a poset pair, with link Betti numbers taken through sd.
pub fn poset_mu_ordering(p: &RelativePosetPair, s: &VertexOrdering, field: FieldSpec) -> Result<MuVector> {
    check_poset_ordering(&p.delta, s)?;
    let mut counts = vec![0u64; poset_mu_len(p)];
    let mut prefix = Face::empty();
    for &v in s.as_slice() {
        prefix.insert(v);
        add_betti(&mut counts, &p.prefix_link(v as usize, &prefix).reduced_betti(field));
    }
    Ok(MuVector {
        mu: counts
            .into_iter()
            .map(|x| BigRational::from_integer(BigInt::from(x)))
            .collect(),
        field,
        provenance: Provenance::Ordering {
            ordering: s.as_slice().iter().map(|&v| p.delta.id_of(v as usize + 1).to_string()).collect(),
        },
    })
}

/// σ̃ of the link of vertex `k`, entries `σ̃_{−1} … σ̃_{len−2}`. The subset
/// sums run over `W ⊆ V(Δ) ∖ {k}` with the link restricted to faces `F`
/// having `V(F) ⊆ W ∪ {k}`: graded by the vertices of `Δ`, not by the atoms of
/// the link poset, which differ as soon as two faces share a vertex set.
/// Vertices of `Δ` in no face of the link pair are left out (they do not
/// change σ̃).
pub fn poset_link_sigma(p: &RelativePosetPair, k: usize, len: usize, field: FieldSpec, budgets: &Budgets) -> Result<Vec<Rational>> {
    let base = p
        .delta
        .above(p.delta.vertex_face(k))
        .into_iter()
        .filter(|&g| !p.gamma[g])
        .fold(Face::empty(), |acc, g| acc.union(&p.delta.faces[g].vertex_set))
        .without(idx(k))
        .to_vec();
    check_subset_budget(base.len(), budgets)?;
    let n = base.len();
    let mut sums = vec![vec![0u64; len.max(1)]; n + 1];
    for mask in 0u64..1u64 << n {
        let w = Face::from_mask(mask, &base).with(idx(k));
        let b = p.prefix_link(k, &w).reduced_betti(field);
        add_betti(&mut sums[mask.count_ones() as usize], &b);
    }
    Ok(sigma_from_sums(&sums, n, len))
}

/// Exact μ as `Σ_v σ̃(lk v)` with [`poset_link_sigma`].
pub fn poset_mu_exact(p: &RelativePosetPair, field: FieldSpec, budgets: &Budgets) -> Result<MuVector> {
    let len = poset_mu_len(p);
    let per_vertex: Vec<Vec<Rational>> = (0..p.delta.n_vertices())
        .into_par_iter()
        .map(|k| poset_link_sigma(p, k, len, field, budgets))
        .collect::<Result<_>>()?;
    let mut mu = vec![crate::num::zero(); len];
    for s in per_vertex {
        for (m, x) in mu.iter_mut().zip(s) {
            *m += x;
        }
    }
    Ok(MuVector {
        mu,
        field,
        provenance: Provenance::ExactHochster,
    })
}

/// `(S_r)`: for every face `F` of `Δ`, `b̃_i` of the link pair of `F`
/// vanishes for `−1 ≤ i < min(r − 1, dim)`. Returns the id of the first face
/// (from the top rank down) whose link fails.
pub fn poset_serre(p: &RelativePosetPair, r: usize, field: FieldSpec) -> Option<u64> {
    (0..p.delta.len()).rev().find_map(|f| {
        let lk = p.link_face(f);
        let dim = lk.dim()?;
        let bound = (r as isize - 1).min(dim);
        if bound <= -1 {
            return None;
        }
        let b = lk.reduced_betti(field);
        (-1..bound)
            .any(|i| b.get((i + 1) as usize).copied().unwrap_or(0) != 0)
            .then(|| p.delta.id_of(f))
    })
}

/// Faces of rank `≤ max_rank` whose link in `Δ` is not connected (empty
/// links count as disconnected), by id.
pub fn poset_disconnected_links(d: &SimplicialPoset, max_rank: usize) -> Vec<u64> {
    (0..d.len())
        .filter(|&f| d.faces[f].rank <= max_rank)
        .filter(|&f| {
            let b = RelativePosetPair::absolute(d.link_face(f).0).reduced_betti(FieldSpec::Rational);
            b.first().copied().unwrap_or(0) != 0 || b.get(1).copied().unwrap_or(0) != 0
        })
        .map(|f| d.id_of(f))
        .collect()
}

/// The `index`-th seeded ordering of the poset's vertices.
pub fn poset_seeded_ordering(d: &SimplicialPoset, seed: u64, index: u64) -> VertexOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut perm: Vec<VertexId> = (0..d.n_vertices()).map(idx).collect();
    perm.shuffle(&mut rng);
    VertexOrdering::new(perm)
}

/// Average of μ^ς over every ordering of the poset's vertices.
pub fn poset_mu_enumerated(p: &RelativePosetPair, field: FieldSpec, budgets: &Budgets) -> Result<MuVector> {
    use itertools::Itertools;
    let n = p.delta.n_vertices();
    if n > budgets.enumerate {
        return Err(Error::Budget {
            what: "enumeration",
            limit: budgets.enumerate,
            actual: n,
        });
    }
    let len = poset_mu_len(p);
    let mut total = vec![0u64; len];
    let mut count = 0u64;
    for perm in (0..n).map(idx).permutations(n) {
        let m = poset_mu_ordering(p, &VertexOrdering::new(perm), field)?;
        for (t, x) in total.iter_mut().zip(&m.mu) {
            *t += x.to_integer().try_into().unwrap_or(0u64);
        }
        count += 1;
    }
    let count = count.max(1);
    Ok(MuVector {
        mu: total
            .into_iter()
            .map(|t| BigRational::new(BigInt::from(t), BigInt::from(count)))
            .collect(),
        field,
        provenance: Provenance::Enumerated { orderings: count },
    })
}

/// Random simplicial poset of rank ≤ 3: `n` vertices, `edges` edges between
/// random distinct endpoints (parallel edges allowed) and up to `triangles`
/// triangles, each on a random triple whose pairs are already joined, using a
/// random choice among parallel edges.
pub fn random_poset(n: usize, edges: usize, triangles: usize, seed: u64) -> SimplicialPoset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut recs: Vec<PosetRecord> = (1..=n as u64)
        .map(|id| PosetRecord {
            id,
            rank: 1,
            covers: Vec::new(),
        })
        .collect();
    let mut next = n as u64 + 1;
    let mut by_pair: HashMap<(u64, u64), Vec<u64>> = HashMap::new();
    if n >= 2 {
        for _ in 0..edges {
            let a = rng.gen_range(1..=n as u64);
            let mut b = rng.gen_range(1..n as u64);
            if b >= a {
                b += 1;
            }
            let key = (a.min(b), a.max(b));
            by_pair.entry(key).or_default().push(next);
            recs.push(PosetRecord {
                id: next,
                rank: 2,
                covers: vec![key.0, key.1],
            });
            next += 1;
        }
    }
    if n >= 3 {
        for _ in 0..triangles {
            let mut t: Vec<u64> = (1..=n as u64).collect();
            t.shuffle(&mut rng);
            let mut t = t[..3].to_vec();
            t.sort_unstable();
            let pairs = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])];
            if pairs.iter().all(|p| by_pair.contains_key(p)) {
                let covers = pairs.iter().map(|p| *by_pair[p].choose(&mut rng).unwrap()).collect();
                recs.push(PosetRecord {
                    id: next,
                    rank: 3,
                    covers,
                });
                next += 1;
            }
        }
    }
    build_poset(&recs).expect("generator emits valid simplicial posets")
}

/// Random lower ideal: void with probability 1/4, otherwise the downward
/// closure of faces picked with probability `p`.
pub fn random_lower_ideal(d: &SimplicialPoset, p: f64, seed: u64) -> Option<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.25) {
        return None;
    }
    let mut mask = vec![false; d.len()];
    for i in 1..d.len() {
        if rng.gen_bool(p) {
            for g in d.below[i].vertices() {
                mask[g as usize] = true;
            }
        }
    }
    Some((1..d.len()).filter(|&i| mask[i]).map(|i| d.id_of(i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::simplex_boundary;
    use crate::mu::{mu_exact, mu_ordering};
    use crate::num::int;
    use proptest::prelude::*;

    fn rec(id: u64, rank: usize, covers: &[u64]) -> PosetRecord {
        PosetRecord {
            id,
            rank,
            covers: covers.to_vec(),
        }
    }

    fn parallel_edges() -> SimplicialPoset {
        build_poset(&[
            rec(1, 1, &[]),
            rec(2, 1, &[]),
            rec(3, 2, &[1, 2]),
            rec(4, 2, &[1, 2]),
            rec(5, 2, &[1, 2]),
        ])
        .unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn build_examples() {
        let p = parallel_edges();
        assert_eq!(p.n_vertices(), 2);
        assert_eq!(p.len(), 6);
        assert_eq!(p.dim(), 1);
        let c = build_complex(&[vec!["a", "b", "c"], vec!["c", "d"]]).unwrap();
        assert!(SimplicialPoset::from_complex(&c).is_ok());
        let err = build_poset(&[
            rec(1, 1, &[]),
            rec(2, 1, &[]),
            rec(3, 1, &[]),
            rec(4, 2, &[1, 2, 3]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Poset { id: 4, .. }), "{err}");
        // three edges over a hollow triangle, but a 2-face on two of them only
        let err = build_poset(&[
            rec(1, 1, &[]),
            rec(2, 1, &[]),
            rec(3, 1, &[]),
            rec(4, 2, &[1, 2]),
            rec(5, 2, &[1, 2]),
            rec(6, 3, &[4, 5, 4]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Poset { id: 6, .. }), "{err}");
        let err = build_poset(&[rec(1, 1, &[]), rec(2, 2, &[1, 9])]).unwrap_err();
        assert!(matches!(err, Error::Poset { id: 2, .. }));
    }

    use crate::complex::build_complex;

    #[test]
    fn boolean_interval_violation() {
        // two rank-2 faces on the same pair, then a rank-3 face whose covers
        // are both of them and a third edge: vertex set has size 2, not 3
        let err = build_poset(&[
            rec(1, 1, &[]),
            rec(2, 1, &[]),
            rec(3, 1, &[]),
            rec(4, 2, &[1, 2]),
            rec(5, 2, &[1, 2]),
            rec(6, 2, &[1, 3]),
            rec(7, 3, &[4, 5, 6]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Poset { id: 7, .. }), "{err}");
    }

    #[test]
    fn link_examples() {
        let p = parallel_edges();
        let l = poset_link(1, &p).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(l.n_vertices(), 3);
        assert_eq!(l.dim(), 0);
        let lone = build_poset(&[rec(1, 1, &[]), rec(2, 1, &[]), rec(3, 2, &[1, 2]), rec(7, 1, &[])]).unwrap();
        let l = poset_link(7, &lone).unwrap();
        assert_eq!(l.len(), 1);
        assert!(poset_link(3, &p).is_err());

        let c = build_complex(&[vec!["a", "b", "c"], vec!["a", "d"], vec!["b", "d"]]).unwrap();
        let q = SimplicialPoset::from_complex(&c).unwrap();
        for (k, v) in c.vertices().into_iter().enumerate() {
            let lp = q.link_face(q.vertex_face(k)).0;
            let link = c.link(&Face::singleton(v));
            assert_eq!(lp.len() - 1, link.faces().len() - 1);
            let sd_link = barycentric_subdivision(&lp);
            let sd_full = barycentric_subdivision(&q);
            let vid = sd_full.table().id(&q.id_of(q.vertex_face(k)).to_string()).unwrap();
            let l2 = sd_full.link(&Face::singleton(vid));
            let mut a = sd_link.labeled_facets();
            let mut b = l2.labeled_facets();
            for f in a.iter_mut().chain(b.iter_mut()) {
                f.sort();
            }
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn restriction_examples() {
        let p = parallel_edges();
        assert_eq!(poset_restriction(&p, &[1, 2]).unwrap().len(), p.len());
        let one = poset_restriction(&p, &[1]).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(one.n_vertices(), 1);
        assert_eq!(poset_restriction(&p, &[]).unwrap().len(), 1);
    }

    #[test]
    fn sd_examples() {
        let p = parallel_edges();
        let sd = barycentric_subdivision(&p);
        let f = sd.f_vector();
        assert_eq!(f.f, vec![1, 5, 6]);
        let b = RelativePair::absolute(sd).family().reduced_betti(FieldSpec::Rational);
        assert_eq!(b, vec![0, 0, 2]);
        let v = build_poset(&[rec(1, 1, &[])]).unwrap();
        assert_eq!(barycentric_subdivision(&v).f_vector().f, vec![1, 1]);

        let c = build_complex(&[vec!["a", "b", "c"], vec!["c", "d"], vec!["b", "d"]]).unwrap();
        let q = RelativePosetPair::absolute(SimplicialPoset::from_complex(&c).unwrap());
        for field in [FieldSpec::Rational, FieldSpec::prime(2).unwrap()] {
            let direct = RelativePair::absolute(c.clone()).family().reduced_betti(field);
            assert_eq!(q.reduced_betti(field), direct);
            assert_eq!(q.cellular_betti(field), direct);
        }
    }

    #[test]
    fn sd_ordering_examples() {
        let e = build_poset(&[rec(1, 1, &[]), rec(2, 1, &[]), rec(3, 2, &[1, 2])]).unwrap();
        let s = poset_ordering(&e, &[1, 2]).unwrap();
        let sd = sd_ordering(&e, &s, None).unwrap();
        let ids: Vec<u64> = sd.as_slice().iter().map(|&v| e.id_of(v as usize + 1)).collect();
        assert_eq!(ids, vec![1, 3, 2]);

        let p = parallel_edges();
        let s = poset_ordering(&p, &[2, 1]).unwrap();
        let sd = sd_ordering(&p, &s, None).unwrap();
        let ids: Vec<u64> = sd.as_slice().iter().map(|&v| p.id_of(v as usize + 1)).collect();
        assert_eq!(ids, vec![2, 3, 4, 5, 1]);

        let c = build_complex(&[vec!["x", "y"]]).unwrap();
        let q = SimplicialPoset::from_complex(&c).unwrap();
        let sd = sd_ordering(&q, &poset_ordering(&q, &[1, 2]).unwrap(), None).unwrap();
        assert_eq!(sd.as_slice(), &[0, 2, 1]);
    }

    #[test]
    fn f_h_examples() {
        let p = RelativePosetPair::absolute(parallel_edges());
        let (f, h) = poset_f_h(&p);
        assert_eq!(f.f, vec![1, 2, 3]);
        assert_eq!(h.h, vec![1, 0, 2]);

        let rel = RelativePosetPair::new(parallel_edges(), Some(&[1, 2, 3])).unwrap();
        assert_eq!(rel.f_vector().f, vec![0, 0, 2]);
        assert!(RelativePosetPair::new(parallel_edges(), Some(&[3])).is_err());

        let c = build_complex(&[vec!["a", "b", "c"], vec!["c", "d"]]).unwrap();
        let q = RelativePosetPair::absolute(SimplicialPoset::from_complex(&c).unwrap());
        let (fc, hc) = RelativePair::absolute(c).f_h_vectors();
        assert_eq!(poset_f_h(&q), (fc, hc));
    }

    #[test]
    fn mu_examples() {
        let p = RelativePosetPair::absolute(parallel_edges());
        for ids in [[1, 2], [2, 1]] {
            let s = poset_ordering(&p.delta, &ids).unwrap();
            assert_eq!(poset_mu_ordering(&p, &s, FieldSpec::Rational).unwrap().mu, ints(&[1, 2]));
        }
        let b = Budgets::default();
        assert_eq!(poset_mu_exact(&p, FieldSpec::Rational, &b).unwrap().mu, ints(&[1, 2]));
        let v = RelativePosetPair::absolute(build_poset(&[rec(1, 1, &[])]).unwrap());
        assert_eq!(poset_mu_exact(&v, FieldSpec::Rational, &b).unwrap().mu, ints(&[1]));

        let c = simplex_boundary(3).unwrap().complex;
        let pair = RelativePair::absolute(c.clone());
        let q = RelativePosetPair::absolute(SimplicialPoset::from_complex(&c).unwrap());
        assert_eq!(
            poset_mu_exact(&q, FieldSpec::Rational, &b).unwrap().mu,
            mu_exact(&pair, FieldSpec::Rational, &b).unwrap().mu
        );
        let ord = VertexOrdering::new(vec![2, 0, 4, 3, 1]);
        assert_eq!(
            poset_mu_ordering(&q, &ord, FieldSpec::Rational).unwrap().mu,
            mu_ordering(&pair, &ord, FieldSpec::Rational).unwrap().mu
        );
    }

    fn sd_mu(p: &RelativePosetPair, s: &VertexOrdering, tie: Option<u64>, field: FieldSpec) -> Vec<Rational> {
        let sd = p.sd_pair();
        let ord = sd_ordering(&p.delta, s, tie).unwrap();
        mu_ordering(&sd, &ord, field).unwrap().mu
    }

    fn padded(mut v: Vec<Rational>, len: usize) -> Vec<Rational> {
        v.resize(len, crate::num::zero());
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mu_matches_subdivision_for_all_orderings(seed in any::<u64>(), n in 2usize..=5, e in 1usize..9, t in 0usize..6) {
            let d = random_poset(n, e, t, seed);
            let gamma = random_lower_ideal(&d, 0.2, seed ^ 0x5a5a);
            let p = RelativePosetPair::new(d, gamma.as_deref()).unwrap();
            let field = FieldSpec::Rational;
            for (k, perm) in itertools::Itertools::permutations((0..n).map(idx), n).enumerate() {
                let s = VertexOrdering::new(perm);
                let direct = poset_mu_ordering(&p, &s, field).unwrap().mu;
                let len = direct.len();
                prop_assert_eq!(&direct, &padded(sd_mu(&p, &s, None, field), len));
                prop_assert_eq!(&direct, &padded(sd_mu(&p, &s, Some(seed.wrapping_add(k as u64)), field), len));
            }
        }

        #[test]
        fn exact_is_ordering_average(seed in any::<u64>(), n in 1usize..=5, e in 0usize..8, t in 0usize..5) {
            let d = random_poset(n, e, t, seed);
            let gamma = random_lower_ideal(&d, 0.2, seed.rotate_left(7));
            let p = RelativePosetPair::new(d, gamma.as_deref()).unwrap();
            let b = Budgets::default();
            for field in [FieldSpec::Rational, FieldSpec::prime(2).unwrap()] {
                prop_assert_eq!(
                    poset_mu_exact(&p, field, &b).unwrap().mu,
                    poset_mu_enumerated(&p, field, &b).unwrap().mu
                );
            }
        }

        #[test]
        fn sd_betti_matches_cellular(seed in any::<u64>(), n in 1usize..=6, e in 0usize..10, t in 0usize..8) {
            let d = random_poset(n, e, t, seed);
            let gamma = random_lower_ideal(&d, 0.3, !seed);
            let p = RelativePosetPair::new(d, gamma.as_deref()).unwrap();
            for field in [FieldSpec::Rational, FieldSpec::prime(2).unwrap(), FieldSpec::prime(3).unwrap()] {
                let via_sd = p.reduced_betti(field);
                let cell = p.cellular_betti(field);
                let len = via_sd.len().max(cell.len());
                let pad = |mut v: Vec<usize>| { v.resize(len, 0); v };
                prop_assert_eq!(pad(via_sd), pad(cell));
            }
        }

        #[test]
        fn sd_link_is_link_of_sd(seed in any::<u64>(), n in 1usize..=5, e in 0usize..8, t in 0usize..5) {
            let d = random_poset(n, e, t, seed);
            let sd = barycentric_subdivision(&d);
            for k in 0..d.n_vertices() {
                let lp = d.link_face(d.vertex_face(k)).0;
                let vid = sd.table().id(&d.id_of(d.vertex_face(k)).to_string()).unwrap();
                let canon = |c: &SimplicialComplex| {
                    let mut f = c.labeled_facets();
                    for x in f.iter_mut() { x.sort(); }
                    f.sort();
                    f
                };
                prop_assert_eq!(canon(&barycentric_subdivision(&lp)), canon(&sd.link(&Face::singleton(vid))));
            }
        }

        #[test]
        fn betti_invariant_under_id_relabel(seed in any::<u64>(), n in 1usize..=5, e in 0usize..8, t in 0usize..5, shift in 1u64..1000) {
            let d = random_poset(n, e, t, seed);
            let mut recs: Vec<PosetRecord> = d.faces()[1..]
                .iter()
                .map(|f| PosetRecord {
                    id: f.id.unwrap() * 7 + shift,
                    rank: f.rank,
                    covers: if f.rank == 1 { vec![] } else { f.covers.iter().map(|&c| d.id_of(c) * 7 + shift).collect() },
                })
                .collect();
            recs.reverse();
            let d2 = build_poset(&recs).unwrap();
            let a = RelativePosetPair::absolute(d).reduced_betti(FieldSpec::Rational);
            let b = RelativePosetPair::absolute(d2).reduced_betti(FieldSpec::Rational);
            prop_assert_eq!(a, b);
        }
    }
}
