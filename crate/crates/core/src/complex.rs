//! Simplicial complexes, relative pairs and their face numbers.
//!
//! A complex is stored as its facets over a shared vertex table; membership
//! descends from the facets. The void complex (no faces) and the empty
//! complex `{∅}` are different values: the former has no facets, the latter
//! has the single facet `∅`. Derived complexes (links, induced subcomplexes)
//! keep their parent's table, so vertex ids stay comparable; vertices of the
//! table that lie in no face are simply not vertices of the complex.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::face::{graded_cmp, Face, VertexId};
use crate::family::FaceFamily;

/// Label ↔ id map, ids dense from 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexTable {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
}

impl VertexTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut t = VertexTable::new();
        for l in labels {
            let l = l.into();
            if t.index.contains_key(&l) {
                return Err(Error::DuplicateVertex(l));
            }
            t.intern(&l);
        }
        Ok(t)
    }

    /// Id for `label`, inserting it if new.
    pub fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as VertexId;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: VertexId) -> &str {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Clone)]
pub struct SimplicialComplex {
    table: Arc<VertexTable>,
    /// Inclusion-maximal faces, sorted; `[]` is void, `[∅]` is `{∅}`.
    facets: Vec<Face>,
}

impl SimplicialComplex {
    /// Complex generated by `faces`; dominated faces and duplicates are dropped.
    pub fn from_faces(table: Arc<VertexTable>, faces: Vec<Face>) -> Self {
        SimplicialComplex {
            table,
            facets: maximal_faces(faces),
        }
    }

    pub fn void(table: Arc<VertexTable>) -> Self {
        SimplicialComplex {
            table,
            facets: Vec::new(),
        }
    }

    /// The complex `{∅}`.
    pub fn empty(table: Arc<VertexTable>) -> Self {
        SimplicialComplex {
            table,
            facets: vec![Face::empty()],
        }
    }

    pub fn table(&self) -> &Arc<VertexTable> {
        &self.table
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn is_void(&self) -> bool {
        self.facets.is_empty()
    }

    /// `None` for the void complex, −1 for `{∅}`.
    pub fn dim(&self) -> Option<isize> {
        self.facets.iter().map(Face::dim).max()
    }

    /// Vertices lying in some face.
    pub fn vertex_set(&self) -> Face {
        self.facets.iter().fold(Face::empty(), |acc, f| acc.union(f))
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.vertex_set().to_vec()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_set().card()
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.facets.iter().any(|g| f.is_subset(g))
    }

    /// All faces, sorted by dimension and then lexicographically.
    pub fn faces(&self) -> Vec<Face> {
        let mut seen: HashSet<Face> = HashSet::new();
        for facet in &self.facets {
            let vs = facet.to_vec();
            for mask in 0u64..(1u64 << vs.len()) {
                seen.insert(Face::from_mask(mask, &vs));
            }
        }
        let mut faces: Vec<Face> = seen.into_iter().collect();
        faces.sort_by(graded_cmp);
        faces
    }

    pub fn family(&self) -> FaceFamily {
        FaceFamily::from_faces(self.faces())
    }

    /// `{G : F ∪ G ∈ Δ, F ∩ G = ∅}`; void if `F ∉ Δ`.
    pub fn link(&self, f: &Face) -> SimplicialComplex {
        let faces: Vec<Face> = self
            .facets
            .iter()
            .filter(|g| f.is_subset(g))
            .map(|g| g.difference(f))
            .collect();
        SimplicialComplex::from_faces(self.table.clone(), faces)
    }

    /// Induced subcomplex `Δ_W`.
    pub fn induced(&self, w: &Face) -> SimplicialComplex {
        let faces = self.facets.iter().map(|g| g.intersection(w)).collect();
        SimplicialComplex::from_faces(self.table.clone(), faces)
    }

    pub fn induced_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<SimplicialComplex> {
        let w = self.face_of(labels)?;
        Ok(self.induced(&w))
    }

    /// Cone `v * Δ` with a new apex labelled `apex`.
    pub fn cone(&self, apex: &str) -> Result<SimplicialComplex> {
        if self.table.id(apex).is_some() {
            return Err(Error::DuplicateVertex(apex.to_string()));
        }
        let mut table = (*self.table).clone();
        let v = table.intern(apex);
        let facets = self.facets.iter().map(|f| f.with(v)).collect();
        Ok(SimplicialComplex::from_faces(Arc::new(table), facets))
    }

    /// Connected components as vertex lists, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let verts = self.vertices();
        let pos: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for facet in &self.facets {
            let mut it = facet.vertices();
            if let Some(first) = it.next() {
                let a = pos[&first];
                for v in it {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, pos[&v]));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<VertexId>> = Vec::new();
        let mut root_to_group: HashMap<usize, usize> = HashMap::new();
        for (i, &v) in verts.iter().enumerate() {
            let r = find(&mut parent, i);
            let g = *root_to_group.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(v);
        }
        groups
    }

    /// Number of connected components; 0 for void and `{∅}`.
    pub fn b0(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.b0() == 1
    }

    /// Same complex re-indexed so that its vertices are exactly `0..n`.
    pub fn compact(&self) -> SimplicialComplex {
        let verts = self.vertices();
        let mut table = VertexTable::new();
        let mut map = HashMap::new();
        for &v in &verts {
            map.insert(v, table.intern(self.table.label(v)));
        }
        let facets = self
            .facets
            .iter()
            .map(|f| Face::from_vertices(f.vertices().map(|v| map[&v])))
            .collect();
        SimplicialComplex::from_faces(Arc::new(table), facets)
    }

    pub fn label(&self, v: VertexId) -> &str {
        self.table.label(v)
    }

    pub fn face_labels(&self, f: &Face) -> Vec<String> {
        f.vertices().map(|v| self.table.label(v).to_string()).collect()
    }

    pub fn face_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Face> {
        let mut f = Face::empty();
        for l in labels {
            let id = self
                .table
                .id(l.as_ref())
                .ok_or_else(|| Error::UnknownVertex(l.as_ref().to_string()))?;
            f.insert(id);
        }
        Ok(f)
    }

    /// Facets as sorted label lists, sorted; the representation used for equality.
    pub fn labeled_facets(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .facets
            .iter()
            .map(|f| {
                let mut l = self.face_labels(f);
                l.sort();
                l
            })
            .collect();
        out.sort();
        out
    }

    /// Same complex over another table containing all of its labels.
    pub fn relabel_into(&self, table: &Arc<VertexTable>) -> Result<SimplicialComplex> {
        let mut facets = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let mut g = Face::empty();
            for v in f.vertices() {
                let l = self.table.label(v);
                g.insert(table.id(l).ok_or_else(|| Error::UnknownVertex(l.to_string()))?);
            }
            facets.push(g);
        }
        Ok(SimplicialComplex::from_faces(table.clone(), facets))
    }

    pub fn f_vector(&self) -> FVector {
        RelativePair::absolute(self.clone()).f_vector()
    }

    pub fn h_vector(&self) -> HVector {
        RelativePair::absolute(self.clone()).h_vector(None)
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labeled_facets() == other.labeled_facets()
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("facets", &self.labeled_facets())
            .finish()
    }
}

fn maximal_faces(mut faces: Vec<Face>) -> Vec<Face> {
    faces.sort_by(|a, b| b.card().cmp(&a.card()).then_with(|| a.cmp(b)));
    faces.dedup();
    let mut kept: Vec<Face> = Vec::with_capacity(faces.len());
    let mut larger_end = 0;
    for i in 0..faces.len() {
        if i > 0 && faces[i].card() < faces[i - 1].card() {
            larger_end = kept.len();
        }
        let f = &faces[i];
        if !kept[..larger_end].iter().any(|g| f.is_subset(g)) {
            kept.push(f.clone());
        }
    }
    kept.sort();
    kept
}

/// Builds a complex from facet label lists; labels get ids in order of first
/// appearance. A facet repeating a vertex is malformed. An empty list yields
/// the void complex; an empty facet yields `∅`.
pub fn build_complex<S: AsRef<str>>(facets: &[Vec<S>]) -> Result<SimplicialComplex> {
    let mut table = VertexTable::new();
    let faces = intern_facets(&mut table, facets)?;
    Ok(SimplicialComplex::from_faces(Arc::new(table), faces))
}

pub(crate) fn intern_facets<S: AsRef<str>>(table: &mut VertexTable, facets: &[Vec<S>]) -> Result<Vec<Face>> {
    let mut faces = Vec::with_capacity(facets.len());
    for facet in facets {
        let mut f = Face::empty();
        for label in facet {
            let v = table.intern(label.as_ref());
            if f.contains(v) {
                return Err(Error::Malformed(format!(
                    "vertex `{}` repeated within one facet",
                    label.as_ref()
                )));
            }
            f.insert(v);
        }
        faces.push(f);
    }
    Ok(faces)
}

/// A relative complex `(Δ, Γ)`, identified with `Δ ∖ Γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativePair {
    pub delta: SimplicialComplex,
    pub gamma: SimplicialComplex,
}

impl RelativePair {
    /// Validates that `gamma ⊆ delta`; `gamma` is re-indexed into `delta`'s table.
    pub fn new(delta: SimplicialComplex, gamma: SimplicialComplex) -> Result<Self> {
        let gamma = if Arc::ptr_eq(&delta.table, &gamma.table) {
            gamma
        } else {
            gamma.relabel_into(&delta.table)?
        };
        if let Some(bad) = gamma.facets.iter().find(|g| !delta.contains(g)) {
            return Err(Error::NotSubcomplex(format!(
                "face {:?} of Γ is not a face of Δ",
                gamma.face_labels(bad)
            )));
        }
        Ok(RelativePair { delta, gamma })
    }

    /// `(Δ, void)`.
    pub fn absolute(delta: SimplicialComplex) -> Self {
        let gamma = SimplicialComplex::void(delta.table.clone());
        RelativePair { delta, gamma }
    }

    pub fn is_absolute(&self) -> bool {
        self.gamma.is_void()
    }

    pub fn table(&self) -> &Arc<VertexTable> {
        &self.delta.table
    }

    /// Faces of `Δ ∖ Γ`.
    pub fn faces(&self) -> Vec<Face> {
        self.delta
            .faces()
            .into_iter()
            .filter(|f| !self.gamma.contains(f))
            .collect()
    }

    pub fn family(&self) -> FaceFamily {
        FaceFamily::from_faces(self.faces())
    }

    pub fn is_void(&self) -> bool {
        self.delta.facets.iter().all(|f| self.gamma.contains(f))
    }

    /// Facets of the pair: facets of Δ outside Γ.
    pub fn facets(&self) -> Vec<Face> {
        self.delta
            .facets
            .iter()
            .filter(|f| !self.gamma.contains(f))
            .cloned()
            .collect()
    }

    /// Largest dimension of a face of `Δ ∖ Γ`; `None` for a void pair.
    pub fn dim(&self) -> Option<isize> {
        self.facets().iter().map(Face::dim).max()
    }

    /// Vertex set `V` of the pair: the vertices of Δ.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.delta.vertices()
    }

    pub fn link(&self, f: &Face) -> RelativePair {
        RelativePair {
            delta: self.delta.link(f),
            gamma: self.gamma.link(f),
        }
    }

    pub fn vertex_link(&self, v: VertexId) -> RelativePair {
        self.link(&Face::singleton(v))
    }

    pub fn induced(&self, w: &Face) -> RelativePair {
        RelativePair {
            delta: self.delta.induced(w),
            gamma: self.gamma.induced(w),
        }
    }

    /// `f_{−1} … f_{dim}` counted over `Δ ∖ Γ`. A void pair gets the single
    /// entry `f_{−1} = 0`.
    pub fn f_vector(&self) -> FVector {
        FVector {
            f: self.family().f_counts(),
        }
    }

    /// h-vector with `d = dim + 1`, or `d_override` when given.
    pub fn h_vector(&self, d_override: Option<usize>) -> HVector {
        HVector::from_f(&self.f_vector(), d_override)
    }

    pub fn f_h_vectors(&self) -> (FVector, HVector) {
        let f = self.f_vector();
        let h = HVector::from_f(&f, None);
        (f, h)
    }
}

/// `f[k] = f_{k−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FVector {
    pub f: Vec<u64>,
}

impl FVector {
    /// `f_i` for `i ≥ −1`, zero beyond the top dimension.
    pub fn get(&self, i: isize) -> u64 {
        if i < -1 {
            return 0;
        }
        self.f.get((i + 1) as usize).copied().unwrap_or(0)
    }

    /// The `d` with `dim = d − 1`.
    pub fn natural_d(&self) -> usize {
        self.f.len() - 1
    }

    /// `Σ_{i≥0} (−1)^i f_i`.
    pub fn euler(&self) -> i64 {
        self.f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &x)| if k % 2 == 1 { x as i64 } else { -(x as i64) })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HVector {
    pub d: usize,
    pub h: Vec<i64>,
    /// `h_2 − h_1`, when `d ≥ 2`.
    pub g2: Option<i64>,
}

pub(crate) fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc as i64
}

impl HVector {
    /// `h_i = Σ_{j=0}^{i} (−1)^{i−j} C(d−j, i−j) f_{j−1}`.
    pub fn from_f(f: &FVector, d_override: Option<usize>) -> HVector {
        let d = d_override.unwrap_or_else(|| f.natural_d());
        let h: Vec<i64> = (0..=d as i64)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        let sign = if (i - j) % 2 == 0 { 1 } else { -1 };
                        sign * binomial(d as i64 - j, i - j) * f.get(j as isize - 1) as i64
                    })
                    .sum()
            })
            .collect();
        let g2 = (d >= 2).then(|| h[2] - h[1]);
        HVector { d, h, g2 }
    }

    pub fn get(&self, i: usize) -> i64 {
        self.h.get(i).copied().unwrap_or(0)
    }
}

/// `(f, h)` of a pair with the natural `d`.
pub fn f_h_vectors(pair: &RelativePair) -> (FVector, HVector) {
    pair.f_h_vectors()
}

/// Distinct labels of a facet list, in first-appearance order.
pub fn labels_of<S: AsRef<str>>(facets: &[Vec<S>]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in facets {
        for l in f {
            if seen.insert(l.as_ref().to_string()) {
                out.push(l.as_ref().to_string());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::FieldSpec;

    fn cx(facets: &[&[&str]]) -> SimplicialComplex {
        let v: Vec<Vec<&str>> = facets.iter().map(|f| f.to_vec()).collect();
        build_complex(&v).unwrap()
    }

    fn simplex_boundary_4() -> SimplicialComplex {
        let labels = ["0", "1", "2", "3", "4"];
        let facets: Vec<Vec<&str>> = (0..5)
            .map(|skip| labels.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, l)| *l).collect())
            .collect();
        build_complex(&facets).unwrap()
    }

    #[test]
    fn build_examples() {
        let tri = cx(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        assert_eq!(tri.vertex_count(), 3);
        assert_eq!(tri.dim(), Some(1));

        let absorbed = cx(&[&["a", "b", "c"], &["a", "b"]]);
        assert_eq!(absorbed.facets().len(), 1);
        assert_eq!(absorbed.dim(), Some(2));

        assert_eq!(simplex_boundary_4().f_vector().f, vec![1, 5, 10, 10, 5]);

        let err = build_complex(&[vec!["a", "a"]]);
        assert!(matches!(err, Err(Error::Malformed(_))));
    }

    #[test]
    fn link_examples() {
        let s = simplex_boundary_4();
        let v0 = s.face_of(&["0"]).unwrap();
        let lk = s.link(&v0);
        assert_eq!(lk.vertex_count(), 4);
        assert_eq!(lk.facets().len(), 4);
        assert_eq!(lk.dim(), Some(2));
        assert_eq!(s.link(&Face::empty()), s);

        // Edge {a,b} of the hollow triangle is a facet: its link is {∅}, not void.
        let tri = cx(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        let ab = tri.face_of(&["a", "b"]).unwrap();
        let lk = tri.link(&ab);
        assert!(!lk.is_void());
        assert_eq!(lk.dim(), Some(-1));
        // Brute force over all faces G with G ∩ F = ∅ and F ∪ G ∈ Δ.
        let brute: Vec<Face> = tri
            .faces()
            .into_iter()
            .filter(|g| g.is_disjoint(&ab) && tri.contains(&g.union(&ab)))
            .collect();
        assert_eq!(brute, vec![Face::empty()]);
        // A non-face has the void link.
        let abc = tri.face_of(&["a", "b", "c"]).unwrap();
        assert!(tri.link(&abc).is_void());
    }

    #[test]
    fn induced_examples() {
        let s = simplex_boundary_4();
        let w = s.face_of(&["0", "1", "2"]).unwrap();
        let sub = s.induced(&w);
        assert_eq!(sub.facets(), &[w.clone()]);
        let e = s.induced(&Face::empty());
        assert_eq!(e.facets(), &[Face::empty()]);

        let hex = cx(&[&["1", "2"], &["2", "3"], &["3", "4"], &["4", "5"], &["5", "6"], &["6", "1"]]);
        let alt = hex.induced_labels(&["1", "3", "5"]).unwrap();
        assert_eq!(alt.b0(), 3);
        let b = RelativePair::absolute(alt).family().betti(FieldSpec::Rational);
        assert_eq!(b.reduced(0), 2);
        assert!(hex.induced_labels(&["zz"]).is_err());
    }

    #[test]
    fn cone_examples() {
        let s3 = cx(&[&["1", "2", "3"], &["1", "2", "4"], &["1", "3", "4"], &["2", "3", "4"]]);
        let c = s3.cone("v").unwrap();
        let b = RelativePair::absolute(c.clone()).family().betti(FieldSpec::Rational);
        assert!(b.reduced.iter().all(|&x| x == 0));
        let v = c.face_of(&["v"]).unwrap();
        assert_eq!(c.link(&v), s3);
        assert!(s3.cone("1").is_err());

        let e = SimplicialComplex::empty(Arc::new(VertexTable::new()));
        let pt = e.cone("v").unwrap();
        assert_eq!(pt.labeled_facets(), vec![vec!["v".to_string()]]);

        let two = cx(&[&["a"], &["b"]]);
        let path = two.cone("v").unwrap();
        assert_eq!(path.facets().len(), 2);
        assert_eq!(path.b0(), 1);
    }

    #[test]
    fn f_h_examples() {
        let s = simplex_boundary_4();
        let h = s.h_vector();
        assert_eq!(h.h, vec![1, 1, 1, 1, 1]);
        assert_eq!(h.g2, Some(0));

        let oct = cx(&[
            &["1", "2", "3"], &["1", "2", "-3"], &["1", "-2", "3"], &["1", "-2", "-3"],
            &["-1", "2", "3"], &["-1", "2", "-3"], &["-1", "-2", "3"], &["-1", "-2", "-3"],
        ]);
        assert_eq!(oct.f_vector().f, vec![1, 6, 12, 8]);
        assert_eq!(oct.h_vector().h, vec![1, 3, 3, 1]);

        // void pair: all zeros by convention
        let void = RelativePair::new(s.clone(), s.clone()).unwrap();
        assert!(void.is_void());
        assert_eq!(void.f_vector().f, vec![0]);
    }

    #[test]
    fn h_override_pads() {
        let tri = cx(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        let p = RelativePair::absolute(tri);
        let h = p.h_vector(Some(3));
        assert_eq!(h.h.len(), 4);
        // Σ h_i = f_{d−1} with d = 3 → f_2 = 0.
        assert_eq!(h.h.iter().sum::<i64>(), 0);
    }

    #[test]
    fn components() {
        assert_eq!(simplex_boundary_4().b0(), 1);
        let two = cx(&[&["a", "b", "c"], &["x", "y", "z"]]);
        assert_eq!(two.b0(), 2);
        let pts = cx(&[&["1"], &["2"], &["3"], &["4"], &["5"]]);
        assert_eq!(pts.b0(), 5);
        let t = Arc::new(VertexTable::new());
        assert_eq!(SimplicialComplex::void(t.clone()).b0(), 0);
        assert_eq!(SimplicialComplex::empty(t).b0(), 0);
    }

    #[test]
    fn relative_pair_rejects_non_subcomplex() {
        let a = cx(&[&["a", "b"]]);
        let b = cx(&[&["a", "c"]]);
        assert!(RelativePair::new(a, b).is_err());
    }
}
