//! Hypothesis checks: purity, normal pseudomanifolds, Serre's condition and
//! Buchsbaumness of relative complexes.

use std::collections::HashMap;

use serde::Serialize;

use crate::complex::{RelativePair, SimplicialComplex};
use crate::error::{Error, Result};
use crate::face::Face;
use crate::family::FaceFamily;
use crate::homology::FieldSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub face: Vec<String>,
    pub clause: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecognizerVerdict {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RecognizerVerdict {
    fn from_witnesses(witnesses: Vec<Witness>, field: Option<FieldSpec>, notes: Vec<String>) -> Self {
        RecognizerVerdict {
            holds: witnesses.is_empty(),
            witnesses,
            field,
            notes,
        }
    }
}

fn witness(c: &SimplicialComplex, f: &Face, clause: impl Into<String>) -> Witness {
    Witness {
        face: c.face_labels(f),
        clause: clause.into(),
    }
}

/// All facets of `Δ ∖ Γ` have the same dimension. Vacuously true when void.
pub fn is_pure(pair: &RelativePair) -> RecognizerVerdict {
    let facets = pair.facets();
    let Some(top) = facets.iter().map(Face::dim).max() else {
        return RecognizerVerdict::from_witnesses(vec![], None, vec!["void pair: purity holds vacuously".into()]);
    };
    let witnesses = facets
        .iter()
        .filter(|f| f.dim() < top)
        .map(|f| witness(&pair.delta, f, format!("facet of dimension {} below top dimension {top}", f.dim())))
        .collect();
    RecognizerVerdict::from_witnesses(witnesses, None, vec![])
}

/// Pure of dimension `d ≥ 1`, every ridge in exactly two facets, and every
/// nonempty face of dimension `≤ d − 2` has a connected link.
pub fn is_normal_pseudomanifold(c: &SimplicialComplex) -> RecognizerVerdict {
    let mut w = Vec::new();
    let d = match c.dim() {
        Some(d) if d >= 1 => d,
        other => {
            w.push(Witness {
                face: vec![],
                clause: format!("dimension {other:?} is below 1"),
            });
            return RecognizerVerdict::from_witnesses(w, None, vec![]);
        }
    };
    for f in c.facets().iter().filter(|f| f.dim() < d) {
        w.push(witness(c, f, format!("not pure: facet of dimension {}", f.dim())));
    }
    let mut ridges: HashMap<Face, usize> = HashMap::new();
    for f in c.facets().iter().filter(|f| f.dim() == d) {
        for r in f.boundary() {
            *ridges.entry(r).or_default() += 1;
        }
    }
    let mut bad: Vec<(&Face, &usize)> = ridges.iter().filter(|(_, &k)| k != 2).collect();
    bad.sort();
    for (r, k) in bad {
        w.push(witness(c, r, format!("ridge lies in {k} facets")));
    }
    for f in c.faces() {
        if f.is_empty() || f.dim() > d - 2 {
            continue;
        }
        let b0 = c.link(&f).b0();
        if b0 != 1 {
            w.push(witness(c, &f, format!("link has {b0} components")));
        }
    }
    RecognizerVerdict::from_witnesses(w, None, vec![])
}

/// Faces `F` of `delta_faces` (in the order given) whose link in `fam`
/// violates `H̃_i = 0` for `i < min(r − 1, dim lk)`. `fam` is the family of
/// `Δ ∖ Γ`, whose link at `F` is the link pair of `F`.
fn serre_violations(
    fam: &FaceFamily,
    delta_faces: &[Face],
    r: usize,
    field: FieldSpec,
    all: bool,
) -> Vec<(Face, String)> {
    let mut out = Vec::new();
    for f in delta_faces {
        let lk = fam.link(f);
        let Some(dim) = lk.top_dim() else { continue };
        let bound = (r as isize - 1).min(dim);
        if bound <= -1 {
            continue;
        }
        // b̃_i for i < bound needs faces with at most bound + 1 vertices.
        let b = lk.skeleton(bound as usize + 1).reduced_betti(field);
        if let Some(i) = (-1..bound).find(|&i| b.get((i + 1) as usize).copied().unwrap_or(0) != 0) {
            out.push((f.clone(), format!("H̃_{i} of link is nonzero (link dimension {dim}, r = {r})")));
            if !all {
                break;
            }
        }
    }
    out
}

fn faces_descending(c: &SimplicialComplex) -> Vec<Face> {
    let mut faces = c.faces();
    faces.reverse();
    faces
}

fn check_r(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::Malformed("Serre condition needs r ≥ 1".into()));
    }
    Ok(())
}

/// Serre's condition `(S_r)` over `field`; faces are scanned from the top
/// dimension down and the scan stops at the first witness unless `all`.
pub fn serre_condition(pair: &RelativePair, r: usize, field: FieldSpec, all: bool) -> Result<RecognizerVerdict> {
    check_r(r)?;
    let fam = pair.family();
    let w = serre_violations(&fam, &faces_descending(&pair.delta), r, field, all)
        .into_iter()
        .map(|(f, clause)| witness(&pair.delta, &f, clause))
        .collect();
    Ok(RecognizerVerdict::from_witnesses(w, Some(field), vec![]))
}

/// `(S_r)` for every vertex-link pair. Witness faces are `F ∪ {v}`.
pub fn vertex_links_serre(pair: &RelativePair, r: usize, field: FieldSpec, all: bool) -> Result<RecognizerVerdict> {
    check_r(r)?;
    let fam = pair.family();
    let mut w = Vec::new();
    let mut notes = Vec::new();
    for v in pair.vertices() {
        let vf = Face::singleton(v);
        let lk = fam.link(&vf);
        if lk.top_dim() == Some(-1) {
            notes.push(format!("vertex {} is isolated: its link {{∅}} satisfies (S_r) vacuously", pair.delta.label(v)));
        }
        let faces = faces_descending(&pair.delta.link(&vf));
        for (f, clause) in serre_violations(&lk, &faces, r, field, all) {
            w.push(witness(&pair.delta, &f.with(v), format!("in link of {}: {clause}", pair.delta.label(v))));
            if !all {
                return Ok(RecognizerVerdict::from_witnesses(w, Some(field), notes));
            }
        }
    }
    Ok(RecognizerVerdict::from_witnesses(w, Some(field), notes))
}

/// Pure, and every vertex link satisfies `(S_d)` where `d` is the dimension
/// of the pair.
pub fn is_buchsbaum(pair: &RelativePair, field: FieldSpec) -> RecognizerVerdict {
    let pure = is_pure(pair);
    if !pure.holds {
        return RecognizerVerdict {
            field: Some(field),
            ..pure
        };
    }
    let d = pair.dim().unwrap_or(0).max(1) as usize;
    vertex_links_serre(pair, d, field, false).expect("r ≥ 1")
}

/// `(S_2)` for a complex of dimension `D`, decided without homology: pure,
/// and every face of dimension `≤ D − 2` (the empty face included) has a
/// connected link.
pub fn serre2_by_connectivity(c: &SimplicialComplex) -> RecognizerVerdict {
    let pure = is_pure(&RelativePair::absolute(c.clone()));
    if !pure.holds {
        return pure;
    }
    let d = c.dim().unwrap_or(-1);
    let w = c
        .faces()
        .into_iter()
        .filter(|f| f.dim() <= d - 2)
        .filter_map(|f| {
            let b0 = c.link(&f).b0();
            (b0 != 1).then(|| witness(c, &f, format!("link has {b0} components")))
        })
        .collect();
    RecognizerVerdict::from_witnesses(w, None, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn cx(facets: &[&[&str]]) -> SimplicialComplex {
        let v: Vec<Vec<&str>> = facets.iter().map(|f| f.to_vec()).collect();
        build_complex(&v).unwrap()
    }

    fn boundary(n: usize) -> SimplicialComplex {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let facets: Vec<Vec<String>> = (0..n)
            .map(|s| labels.iter().enumerate().filter(|(i, _)| *i != s).map(|(_, l)| l.clone()).collect())
            .collect();
        build_complex(&facets).unwrap()
    }

    fn wedge() -> SimplicialComplex {
        // Two tetrahedron boundaries sharing the vertex 0.
        let mut facets: Vec<Vec<String>> = Vec::new();
        for base in [["0", "1", "2", "3"], ["0", "4", "5", "6"]] {
            for s in 0..4 {
                facets.push(base.iter().enumerate().filter(|(i, _)| *i != s).map(|(_, l)| l.to_string()).collect());
            }
        }
        build_complex(&facets).unwrap()
    }

    fn abs(c: SimplicialComplex) -> RelativePair {
        RelativePair::absolute(c)
    }

    #[test]
    fn purity() {
        assert!(is_pure(&abs(boundary(5))).holds);
        let pendant = cx(&[&["a", "b", "c"], &["c", "d"]]);
        let v = is_pure(&abs(pendant));
        assert!(!v.holds);
        assert_eq!(v.witnesses[0].face, vec!["c", "d"]);
        let s = boundary(4);
        let void = RelativePair::new(s.clone(), s).unwrap();
        let v = is_pure(&void);
        assert!(v.holds && !v.notes.is_empty());
    }

    #[test]
    fn pseudomanifolds() {
        assert!(is_normal_pseudomanifold(&boundary(6)).holds);
        let v = is_normal_pseudomanifold(&wedge());
        assert!(!v.holds);
        assert!(v.witnesses.iter().any(|w| w.face == vec!["0"]));
        assert!(!is_normal_pseudomanifold(&cx(&[&["a"], &["b"]])).holds);
    }

    #[test]
    fn serre_examples() {
        let s = abs(boundary(5));
        assert!(serre_condition(&s, 4, FieldSpec::Rational, false).unwrap().holds);
        let w = abs(wedge());
        let v = serre_condition(&w, 2, FieldSpec::Prime(2), false).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witnesses[0].face, vec!["0"]);
        assert!(serre_condition(&w, 1, FieldSpec::Rational, true).unwrap().holds);
        assert!(serre_condition(&w, 0, FieldSpec::Rational, true).is_err());
    }

    #[test]
    fn buchsbaum_examples() {
        assert!(is_buchsbaum(&abs(boundary(5)), FieldSpec::Rational).holds);
        let pendant = cx(&[&["a", "b", "c"], &["c", "d"]]);
        assert!(!is_buchsbaum(&abs(pendant), FieldSpec::Rational).holds);
        // The wedge point's link is two circles: not Cohen–Macaulay.
        assert!(!is_buchsbaum(&abs(wedge()), FieldSpec::Rational).holds);
    }

    #[test]
    fn vertex_links() {
        let s = abs(boundary(6));
        for r in 1..=4 {
            assert!(vertex_links_serre(&s, r, FieldSpec::Rational, false).unwrap().holds);
        }
        let with_point = abs(cx(&[&["a", "b"], &["b", "c"], &["c", "a"], &["z"]]));
        let v = vertex_links_serre(&with_point, 2, FieldSpec::Rational, false).unwrap();
        assert!(v.holds);
        assert_eq!(v.notes.len(), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn complex_strategy() -> impl Strategy<Value = SimplicialComplex> {
            (2usize..=7).prop_flat_map(|n| {
                proptest::collection::vec(1u64..(1u64 << n), 1..7).prop_map(move |masks| {
                    let base: Vec<u32> = (0..n as u32).collect();
                    let facets: Vec<Vec<String>> = masks
                        .iter()
                        .map(|&m| Face::from_mask(m, &base).vertices().map(|v| v.to_string()).collect())
                        .collect();
                    build_complex(&facets).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(96))]

            #[test]
            fn s2_matches_connectivity_form(c in complex_strategy()) {
                let by_homology = serre_condition(&abs(c.clone()), 2, FieldSpec::Rational, false).unwrap().holds;
                prop_assert_eq!(by_homology, serre2_by_connectivity(&c).holds);
            }

            #[test]
            fn buchsbaum_is_sd_on_links(c in complex_strategy()) {
                let p = abs(c.clone());
                if is_pure(&p).holds {
                    let d = p.dim().unwrap().max(1) as usize;
                    let per_link = p
                        .vertices()
                        .into_iter()
                        .all(|v| serre_condition(&p.vertex_link(v), d, FieldSpec::Prime(2), false).unwrap().holds);
                    prop_assert_eq!(is_buchsbaum(&p, FieldSpec::Prime(2)).holds, per_link);
                }
                if is_normal_pseudomanifold(&c).holds {
                    prop_assert!(is_pure(&p).holds);
                }
            }
        }
    }
}
