//! Generators with known invariants.
//!
//! Each generator returns its complex together with a certificate: the values
//! of `m`, `b_1` and `g_2` that follow from how it was built. Tests compare the
//! certificates against the homology, π₁ and face-count routes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{binomial, build_complex, SimplicialComplex, VertexTable};
use crate::error::{Error, Result};
use crate::face::{Face, VertexId};
use crate::homology::FieldSpec;
use crate::recognize::is_normal_pseudomanifold;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Minimum number of generators of π₁, when known.
    pub m: Option<usize>,
    /// `b_1` keyed by field (`"q"`, `"p:2"`, …).
    pub b1: BTreeMap<String, usize>,
    pub g2: Option<i64>,
    pub trace: Vec<String>,
}

impl Certificate {
    fn uniform(m: usize, b1: usize, g2: Option<i64>, step: impl Into<String>) -> Self {
        let b1 = ["q", "p:2", "p:3", "p:5"].iter().map(|k| (k.to_string(), b1)).collect();
        Certificate {
            m: Some(m),
            b1,
            g2,
            trace: vec![step.into()],
        }
    }

    /// `b_1` over `field`, if certified.
    pub fn b1_over(&self, field: FieldSpec) -> Option<usize> {
        self.b1.get(&field.to_string()).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedComplex {
    #[serde(skip)]
    pub complex: SimplicialComplex,
    pub certificate: Certificate,
}

fn labels(range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|i| i.to_string()).collect()
}

fn all_but_one(labels: &[String]) -> Vec<Vec<String>> {
    (0..labels.len())
        .map(|s| {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != s)
                .map(|(_, l)| l.clone())
                .collect()
        })
        .collect()
}

/// `∂Δ^{d+1}` on the vertices `0, …, d+1`.
pub fn simplex_boundary(d: usize) -> Result<CertifiedComplex> {
    if d < 1 {
        return Err(Error::Construction("simplex boundary needs d ≥ 1".into()));
    }
    let complex = build_complex(&all_but_one(&labels(0..d + 2)))?;
    Ok(CertifiedComplex {
        complex,
        certificate: Certificate::uniform(0, 0, Some(0), format!("boundary of the {}-simplex", d + 1)),
    })
}

fn require_facet(c: &SimplicialComplex, f: &Face, what: &str) -> Result<()> {
    if !c.facets().contains(f) {
        return Err(Error::Construction(format!("{what} {:?} is not a facet", c.face_labels(f))));
    }
    Ok(())
}

fn sorted_matching(from: &Face, to: &Face) -> Vec<(VertexId, VertexId)> {
    from.vertices().zip(to.vertices()).collect()
}

fn check_matching(m: &[(VertexId, VertexId)], from: &Face, to: &Face) -> Result<()> {
    let a: Face = Face::from_vertices(m.iter().map(|p| p.0));
    let b: Face = Face::from_vertices(m.iter().map(|p| p.1));
    if m.len() != from.card() || a != *from || b != *to {
        return Err(Error::Construction("matching is not a bijection between the two facets".into()));
    }
    Ok(())
}

fn unique_label(table: &VertexTable, base: &str) -> String {
    if table.id(base).is_none() {
        return base.to_string();
    }
    (1..).map(|k| format!("{base}_{k}")).find(|l| table.id(l).is_none()).unwrap()
}

fn combine_b1(a: &Certificate, b: &Certificate, extra: usize) -> BTreeMap<String, usize> {
    a.b1
        .iter()
        .filter_map(|(k, x)| b.b1.get(k).map(|y| (k.clone(), x + y + extra)))
        .collect()
}

/// Connected sum along facets `fa ∈ a` and `fb ∈ b`: both facets are removed
/// and `fa`'s vertices are identified with their matches in `fb`. Vertices of
/// `b` keep their labels unless they clash with `a`'s.
pub fn connected_sum(
    a: &CertifiedComplex,
    b: &CertifiedComplex,
    fa: &Face,
    fb: &Face,
    matching: Option<&[(VertexId, VertexId)]>,
) -> Result<CertifiedComplex> {
    let (ca, cb) = (&a.complex, &b.complex);
    require_facet(ca, fa, "first facet")?;
    require_facet(cb, fb, "second facet")?;
    if ca.dim() != cb.dim() || fa.dim() != ca.dim().unwrap_or(-1) || fb.dim() != fa.dim() {
        return Err(Error::Construction("connected sum needs equal-dimensional top facets".into()));
    }
    let default = sorted_matching(fa, fb);
    let m = matching.unwrap_or(&default);
    check_matching(m, fa, fb)?;

    let mut table = (**ca.table()).clone();
    let mut map: HashMap<VertexId, VertexId> = m.iter().map(|&(x, y)| (y, x)).collect();
    for v in cb.vertices() {
        if let std::collections::hash_map::Entry::Vacant(e) = map.entry(v) {
            let label = unique_label(&table, cb.label(v));
            e.insert(table.intern(&label));
        }
    }
    let mut facets: Vec<Face> = ca.facets().iter().filter(|f| *f != fa).cloned().collect();
    facets.extend(
        cb.facets()
            .iter()
            .filter(|f| *f != fb)
            .map(|f| Face::from_vertices(f.vertices().map(|v| map[&v]))),
    );
    let complex = SimplicialComplex::from_faces(Arc::new(table), facets);

    let (x, y) = (&a.certificate, &b.certificate);
    let mut trace = x.trace.clone();
    trace.extend(y.trace.iter().cloned());
    trace.push(format!("connected sum along {:?} and {:?}", ca.face_labels(fa), cb.face_labels(fb)));
    Ok(CertifiedComplex {
        complex,
        certificate: Certificate {
            m: x.m.zip(y.m).map(|(p, q)| p + q),
            b1: combine_b1(x, y, 0),
            g2: x.g2.zip(y.g2).map(|(p, q)| p + q),
            trace,
        },
    })
}

/// Result of identifying `f2` onto `f1` after deleting both, or a reason the
/// identification is not a simplicial handle.
fn glue_handle(c: &SimplicialComplex, f1: &Face, f2: &Face, m: &[(VertexId, VertexId)]) -> std::result::Result<SimplicialComplex, String> {
    if !f1.is_disjoint(f2) {
        return Err("facets share a vertex".into());
    }
    let to: HashMap<VertexId, VertexId> = m.iter().map(|&(x, y)| (y, x)).collect();
    let image = |f: &Face| Face::from_vertices(f.vertices().map(|v| to.get(&v).copied().unwrap_or(v)));
    let kept: Vec<Face> = c.facets().iter().filter(|f| *f != f1 && *f != f2).cloned().collect();
    for f in &kept {
        if let Some(&(x, y)) = m.iter().find(|&&(x, y)| f.contains(x) && f.contains(y)) {
            return Err(format!(
                "facet {:?} contains both {} and its match {}",
                c.face_labels(f),
                c.label(x),
                c.label(y)
            ));
        }
    }
    let rest = SimplicialComplex::from_faces(c.table().clone(), kept.clone());
    let before = rest.faces();
    let mut after: HashSet<Face> = HashSet::with_capacity(before.len());
    for f in &before {
        after.insert(image(f));
    }
    let merged = (1usize << f1.card()) - 2;
    if after.len() + merged != before.len() {
        return Err(format!(
            "identification merges {} faces, expected {merged}",
            before.len() - after.len()
        ));
    }
    let facets = kept.iter().map(image).collect();
    Ok(SimplicialComplex::from_faces(c.table().clone(), facets).compact())
}

/// Handle addition: deletes facets `f1`, `f2` of one component and identifies
/// each vertex of `f2` with its match in `f1`. Rejected unless exactly the
/// proper faces of the two facets get identified and the result is a normal
/// pseudomanifold.
pub fn handle_addition(
    a: &CertifiedComplex,
    f1: &Face,
    f2: &Face,
    matching: Option<&[(VertexId, VertexId)]>,
) -> Result<CertifiedComplex> {
    let c = &a.complex;
    require_facet(c, f1, "first facet")?;
    require_facet(c, f2, "second facet")?;
    let default = sorted_matching(f1, f2);
    let m = matching.unwrap_or(&default);
    check_matching(m, f1, f2)?;
    let comps = c.connected_components();
    let comp_of = |v: VertexId| comps.iter().position(|g| g.contains(&v));
    if comp_of(f1.vertices().next().unwrap_or(0)) != comp_of(f2.vertices().next().unwrap_or(0)) {
        return Err(Error::Construction("handle facets lie in different components".into()));
    }
    let glued = glue_handle(c, f1, f2, m).map_err(|why| {
        Error::Construction(format!("handle on {:?}, {:?} rejected: {why}", c.face_labels(f1), c.face_labels(f2)))
    })?;
    let verdict = is_normal_pseudomanifold(&glued);
    if !verdict.holds {
        return Err(Error::Construction(format!(
            "handle result is not a normal pseudomanifold: {:?}",
            verdict.witnesses.first()
        )));
    }
    let d = c.dim().unwrap_or(0) as i64;
    let x = &a.certificate;
    let mut trace = x.trace.clone();
    trace.push(format!("handle along {:?} and {:?}", c.face_labels(f1), c.face_labels(f2)));
    Ok(CertifiedComplex {
        complex: glued,
        certificate: Certificate {
            m: x.m.map(|m| m + 1),
            b1: x.b1.iter().map(|(k, v)| (k.clone(), v + 1)).collect(),
            g2: x.g2.map(|g| g + binomial(d + 2, 2)),
            trace,
        },
    })
}

/// Stellar subdivision of the facet on the last `d + 1` vertices, which is a
/// connected sum with a fresh `∂Δ^{d+1}`. The new vertex gets the next
/// integer label, so adjacency stays `|i − j| ≤ d + 1`.
fn stack_front(c: &SimplicialComplex, d: usize) -> SimplicialComplex {
    let n = c.table().len();
    let front = Face::from_vertices((n - d - 1) as u32..n as u32);
    let mut table = (**c.table()).clone();
    let apex = table.intern(&n.to_string());
    let mut facets: Vec<Face> = c.facets().iter().filter(|f| **f != front).cloned().collect();
    facets.extend(front.vertices().map(|x| front.without(x).with(apex)));
    SimplicialComplex::from_faces(Arc::new(table), facets)
}

/// A stacked `d`-manifold: `∂Δ^{d+1}` stacked `stackings` times, then
/// `handles` handle additions on seeded-shuffled facet pairs. If the handles
/// do not fit, the construction restarts with one more stacking.
pub fn stacked_manifold(d: usize, stackings: usize, handles: usize, seed: u64) -> Result<CertifiedComplex> {
    if d < 2 {
        return Err(Error::Construction("stacked manifolds need d ≥ 2".into()));
    }
    let mut s = stackings;
    loop {
        if let Some(mut out) = try_stacked(d, s, handles, seed)? {
            if s != stackings {
                out.certificate
                    .trace
                    .insert(1, format!("{stackings} stackings requested, grown to {s} to fit {handles} handles"));
            }
            return Ok(out);
        }
        s += 1;
        if s > stackings + 64 + 8 * handles * (d + 1) {
            return Err(Error::Construction(format!("no room for {handles} handles")));
        }
    }
}

fn try_stacked(d: usize, s: usize, handles: usize, seed: u64) -> Result<Option<CertifiedComplex>> {
    let mut cur = simplex_boundary(d)?;
    for _ in 0..s {
        cur.complex = stack_front(&cur.complex, d);
    }
    cur.certificate.trace.push(format!("{s} stackings on the front facet"));
    for k in 0..handles {
        let facets = cur.complex.facets().to_vec();
        let mut pairs: Vec<(usize, usize)> = (0..facets.len())
            .flat_map(|i| (i + 1..facets.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| facets[i].is_disjoint(&facets[j]))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        pairs.shuffle(&mut rng);
        let found = pairs.into_iter().find_map(|(i, j)| {
            let m = sorted_matching(&facets[i], &facets[j]);
            glue_handle(&cur.complex, &facets[i], &facets[j], &m)
                .ok()
                .map(|_| (facets[i].clone(), facets[j].clone()))
        });
        let Some((f1, f2)) = found else { return Ok(None) };
        match handle_addition(&cur, &f1, &f2, None) {
            Ok(next) => cur = next,
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(cur))
}

/// Gale's evenness condition for a sorted subset of `1..=n`: every maximal
/// run of consecutive elements not touching `1` or `n` has even length.
pub fn gale_even(s: &[usize], n: usize) -> bool {
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[j] + 1 {
            j += 1;
        }
        let interior = s[i] > 1 && s[j] < n;
        if interior && (j - i + 1) % 2 == 1 {
            return false;
        }
        i = j + 1;
    }
    true
}

/// Boundary of the cyclic 4-polytope with `n ≥ 6` vertices labelled `1..=n`.
pub fn cyclic_boundary(n: usize) -> Result<CertifiedComplex> {
    if n < 6 {
        return Err(Error::Construction("cyclic polytope boundary needs n ≥ 6".into()));
    }
    use itertools::Itertools;
    let facets: Vec<Vec<String>> = (1..=n)
        .combinations(4)
        .filter(|s| gale_even(s, n))
        .map(|s| s.iter().map(|v| v.to_string()).collect())
        .collect();
    let mut table = VertexTable::new();
    for v in 1..=n {
        table.intern(&v.to_string());
    }
    let faces = crate::complex::intern_facets(&mut table, &facets)?;
    let complex = SimplicialComplex::from_faces(Arc::new(table), faces);
    let n = n as i64;
    Ok(CertifiedComplex {
        complex,
        certificate: Certificate::uniform(
            0,
            0,
            Some(binomial(n - 3, 2) - (n - 4)),
            format!("boundary of the cyclic 4-polytope on {n} vertices"),
        ),
    })
}

/// Disjoint union; labels are kept when they do not clash, otherwise every
/// label becomes `"<index>.<label>"`.
pub fn disjoint_union(parts: &[SimplicialComplex]) -> SimplicialComplex {
    let live: Vec<(usize, &SimplicialComplex)> = parts.iter().enumerate().filter(|(_, c)| !c.is_void()).collect();
    let mut seen = HashSet::new();
    let clash = live
        .iter()
        .flat_map(|(_, c)| c.vertices().into_iter().map(move |v| c.label(v).to_string()))
        .any(|l| !seen.insert(l));
    let mut table = VertexTable::new();
    let mut facets = Vec::new();
    for (i, c) in &live {
        for f in c.facets() {
            facets.push(Face::from_vertices(f.vertices().map(|v| {
                let l = if clash { format!("{i}.{}", c.label(v)) } else { c.label(v).to_string() };
                table.intern(&l)
            })));
        }
    }
    if live.is_empty() {
        return SimplicialComplex::void(Arc::new(table));
    }
    SimplicialComplex::from_faces(Arc::new(table), facets)
}

fn fixed(facets: &[[u32; 3]], cert: Certificate) -> CertifiedComplex {
    let f: Vec<Vec<String>> = facets.iter().map(|t| t.iter().map(|v| v.to_string()).collect()).collect();
    CertifiedComplex {
        complex: build_complex(&f).expect("fixed facet list"),
        certificate: cert,
    }
}

/// Császár's 7-vertex torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
pub fn csaszar_torus() -> CertifiedComplex {
    let facets: Vec<[u32; 3]> = (0..7)
        .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    fixed(&facets, Certificate::uniform(2, 2, None, "7-vertex torus"))
}

/// The 6-vertex real projective plane.
pub fn projective_plane() -> CertifiedComplex {
    let facets = [
        [1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 2, 6],
        [2, 3, 5], [2, 4, 5], [2, 4, 6], [3, 4, 6], [3, 5, 6],
    ];
    let mut cert = Certificate::uniform(1, 0, None, "6-vertex projective plane");
    cert.b1.insert("p:2".into(), 1);
    fixed(&facets, cert)
}

/// Boundary of the 3-dimensional cross-polytope.
pub fn octahedron() -> CertifiedComplex {
    let mut facets = Vec::new();
    for a in [1, 2] {
        for b in [3, 4] {
            for c in [5, 6] {
                facets.push([a, b, c]);
            }
        }
    }
    fixed(&facets, Certificate::uniform(0, 0, Some(0), "octahedron"))
}

/// Seeded random complex on `n` vertices `0..n` with up to `facets` random
/// faces of dimension at most `max_dim`; isolated vertices fill the rest.
pub fn random_complex(n: usize, max_dim: usize, facets: usize, seed: u64) -> SimplicialComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts: Vec<u32> = (0..n as u32).collect();
    let mut out: Vec<Vec<String>> = Vec::new();
    for _ in 0..facets {
        let k = rng.gen_range(1..=(max_dim + 1).min(n));
        let pick: Vec<u32> = verts.choose_multiple(&mut rng, k).copied().collect();
        out.push(pick.iter().map(|v| v.to_string()).collect());
    }
    for v in &verts {
        out.push(vec![v.to_string()]);
    }
    build_complex(&out).expect("random complex")
}
