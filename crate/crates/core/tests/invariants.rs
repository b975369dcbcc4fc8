use proptest::prelude::*;

use mulab_core::construct::{
    csaszar_torus, cyclic_boundary, disjoint_union, projective_plane, random_complex, simplex_boundary, stacked_manifold,
};
use mulab_core::pi1::{edge_path_presentation, m_bracket};
use mulab_core::recognize::is_normal_pseudomanifold;
use mulab_core::{
    boundary_matrices, mu_enumerated, reduced_betti, Budgets, Face, FieldSpec, HVector, RelativePair, SimplicialComplex,
};

fn complex() -> impl Strategy<Value = SimplicialComplex> {
    (1usize..=7, 0usize..=3, 0usize..=8, any::<u64>()).prop_map(|(n, d, k, s)| random_complex(n, d, k, s))
}

fn subset_of(c: &SimplicialComplex, mask: u64) -> Face {
    Face::from_vertices(c.vertices().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v))
}

fn all_subsets(c: &SimplicialComplex) -> Vec<Face> {
    let n = c.vertex_count();
    (0..1u64 << n).map(|m| subset_of(c, m)).collect()
}

const PRIMES: [u32; 5] = [2, 3, 5, 7, 11];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_poincare(c in complex()) {
        let pair = RelativePair::absolute(c);
        let f = pair.f_vector();
        let b = reduced_betti(&pair, FieldSpec::Rational, &Budgets::default()).unwrap();
        let alt: i64 = (0..b.unreduced.len()).map(|i| if i % 2 == 0 { b.unreduced[i] as i64 } else { -(b.unreduced[i] as i64) }).sum();
        prop_assert_eq!(f.euler(), alt);
    }

    #[test]
    fn top_h_is_reduced_euler(c in complex()) {
        let pair = RelativePair::absolute(c);
        let (f, h) = pair.f_h_vectors();
        let d = h.d;
        let chi: i64 = f.euler() - 1;
        let sign = if (d + 1) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(h.get(d), sign * chi);
    }

    #[test]
    fn h_polynomial_identity(c in complex(), extra in 0usize..3) {
        let f = RelativePair::absolute(c).f_vector();
        let d = f.natural_d() + extra;
        let h = HVector::from_f(&f, Some(d));
        for x in -3i64..=3 {
            let lhs: i64 = (0..=d).map(|i| h.get(i) * x.pow((d - i) as u32)).sum();
            let rhs: i64 = (0..=d).map(|j| f.get(j as isize - 1) as i64 * (x - 1).pow((d - j) as u32)).sum();
            prop_assert_eq!(lhs, rhs, "x = {}", x);
        }
    }

    #[test]
    fn cone_link_and_acyclicity(c in complex()) {
        let cone = c.cone("apex").unwrap();
        let apex = Face::singleton(cone.table().id("apex").unwrap());
        let link = cone.link(&apex);
        prop_assert_eq!(link.faces().len(), c.faces().len());
        for f in c.faces() {
            let labels = c.face_labels(&f);
            prop_assert!(link.contains(&link.face_of(&labels).unwrap()));
        }
        for p in [None, Some(2), Some(3)] {
            let field = p.map_or(FieldSpec::Rational, |p| FieldSpec::Prime(p));
            let b = reduced_betti(&RelativePair::absolute(cone.clone()), field, &Budgets::default()).unwrap();
            prop_assert!(b.reduced.iter().all(|&x| x == 0), "{:?}", b.reduced);
        }
    }

    #[test]
    fn induced_composes(c in complex(), wm in any::<u64>(), um in any::<u64>()) {
        let w = subset_of(&c, wm);
        let u = subset_of(&c, wm & um);
        prop_assert_eq!(c.induced(&w).induced(&u).faces(), c.induced(&u).faces());
    }

    #[test]
    fn membership_matches_closure(c in complex()) {
        let mut closure = std::collections::BTreeSet::new();
        for f in c.facets() {
            for m in 0..1u64 << f.card() {
                closure.insert(Face::from_vertices(f.vertices().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| v)));
            }
        }
        for s in all_subsets(&c) {
            prop_assert_eq!(c.contains(&s), closure.contains(&s), "{:?}", s);
        }
        prop_assert_eq!(c.faces().len(), closure.len());
    }

    #[test]
    fn rank_nullity(c in complex(), p in prop::sample::select(vec![0u32, 2, 3])) {
        let field = if p == 0 { FieldSpec::Rational } else { FieldSpec::Prime(p) };
        let pair = RelativePair::absolute(c);
        let cc = boundary_matrices(&pair, field, &Budgets::default()).unwrap();
        let ranks = cc.ranks();
        let b = cc.betti();
        for k in 0..cc.bases.len() {
            // dim C = rank ∂_out + dim ker ∂_out, dim ker = b̃ + rank ∂_in
            prop_assert_eq!(cc.bases[k].len(), ranks[k] + b.reduced[k] + ranks[k + 1]);
        }
        prop_assert_eq!(b.reduced_euler(), pair.f_vector().euler() - 1);
    }

    #[test]
    fn relative_euler(c in complex(), wm in any::<u64>(), p in prop::sample::select(vec![0u32, 2, 5])) {
        let field = if p == 0 { FieldSpec::Rational } else { FieldSpec::Prime(p) };
        let gamma = c.induced(&subset_of(&c, wm));
        let pair = RelativePair::new(c, gamma).unwrap();
        let b = reduced_betti(&pair, field, &Budgets::default()).unwrap();
        let f = pair.f_vector();
        let chi: i64 = (0..f.f.len()).map(|k| if k % 2 == 1 { f.f[k] as i64 } else { -(f.f[k] as i64) }).sum();
        prop_assert_eq!(b.reduced_euler(), chi);
    }

    #[test]
    fn mu_of_disjoint_union_adds_up(a in complex(), b in complex()) {
        prop_assume!(a.vertex_count() + b.vertex_count() <= 7);
        let budgets = Budgets::default();
        let mu = |c: &SimplicialComplex| mu_enumerated(&RelativePair::absolute(c.clone()), FieldSpec::Rational, &budgets).unwrap();
        let u = disjoint_union(&[a.clone(), b.clone()]);
        let (ma, mb, mu_u) = (mu(&a), mu(&b), mu(&u));
        let len = mu_u.mu.len().max(ma.mu.len()).max(mb.mu.len());
        for i in 0..len {
            prop_assert_eq!(mu_u.get(i), ma.get(i) + mb.get(i), "mu_{}", i);
        }
        prop_assert_eq!(mu_u.get(0), mu(&a).get(0) + mu(&b).get(0));
    }

    #[test]
    fn bracket_is_ordered_and_covers_h1(c in complex()) {
        prop_assume!(c.is_connected());
        let b = m_bracket(&c, &[2, 3, 5, 7, 11], 10_000).unwrap();
        prop_assert!(b.m_lb <= b.m_ub);
        for f in std::iter::once(FieldSpec::Rational).chain(PRIMES.map(FieldSpec::Prime)) {
            let h1 = reduced_betti(&RelativePair::absolute(c.clone()), f, &Budgets::default()).unwrap().reduced(1);
            prop_assert!(b.m_lb >= h1);
        }
    }
}

#[test]
fn prime_fields_agree_with_rationals_without_torsion() {
    let budgets = Budgets::default();
    let torsion_free = [
        csaszar_torus().complex,
        simplex_boundary(3).unwrap().complex,
        cyclic_boundary(7).unwrap().complex,
        stacked_manifold(3, 4, 0, 7).unwrap().complex,
    ];
    for c in torsion_free {
        let pair = RelativePair::absolute(c);
        let q = reduced_betti(&pair, FieldSpec::Rational, &budgets).unwrap();
        for p in PRIMES {
            let fp = reduced_betti(&pair, FieldSpec::Prime(p), &budgets).unwrap();
            assert_eq!(fp.reduced, q.reduced, "p = {p}");
        }
    }
    // RP² and this non-orientable handle have 2-torsion; only F2 sees it
    for c in [projective_plane().complex, stacked_manifold(3, 4, 1, 7).unwrap().complex] {
        let pair = RelativePair::absolute(c);
        let q = reduced_betti(&pair, FieldSpec::Rational, &budgets).unwrap();
        let f2 = reduced_betti(&pair, FieldSpec::Prime(2), &budgets).unwrap();
        assert_ne!(f2.reduced, q.reduced);
        for p in [3, 5, 7, 11] {
            assert_eq!(reduced_betti(&pair, FieldSpec::Prime(p), &budgets).unwrap().reduced, q.reduced, "p = {p}");
        }
    }
}

#[test]
fn stacked_family_is_certified() {
    let budgets = Budgets::default();
    for d in 3..=5 {
        for h in 0..=2 {
            let c = stacked_manifold(d, d + 1, h, 5).unwrap();
            assert!(is_normal_pseudomanifold(&c.complex).holds, "d={d} h={h}");
            let g2 = c.complex.h_vector().g2.unwrap();
            let binom = ((d + 2) * (d + 1) / 2) as i64;
            assert_eq!(g2, binom * h as i64, "d={d} h={h}");
            let pair = RelativePair::absolute(c.complex.clone());
            for f in [FieldSpec::Rational, FieldSpec::Prime(2)] {
                assert_eq!(reduced_betti(&pair, f, &budgets).unwrap().reduced(1), h);
            }
            assert_eq!(c.certificate.m, Some(h));
            let b = m_bracket(&c.complex, &[2, 3, 5], 10_000).unwrap();
            assert_eq!((b.m_lb, b.m_ub), (h, h));
        }
    }
}

#[test]
fn cyclic_links_are_stacked_spheres() {
    for n in 6..=10 {
        let c = cyclic_boundary(n).unwrap().complex;
        assert!(is_normal_pseudomanifold(&c).holds);
        for v in c.vertices() {
            let link = c.link(&Face::singleton(v));
            assert_eq!(link.h_vector().g2, Some(0), "n={n}");
            assert!(is_normal_pseudomanifold(&link).holds);
            let b = reduced_betti(&RelativePair::absolute(link), FieldSpec::Rational, &Budgets::default()).unwrap();
            assert_eq!(b.reduced, vec![0, 0, 0, 1]);
        }
    }
}

#[test]
fn graphs_are_free() {
    for seed in 0..20 {
        let g = random_complex(6, 1, 9, seed);
        if !g.is_connected() {
            continue;
        }
        let p = edge_path_presentation(&g).unwrap();
        assert!(p.relators.is_empty());
        let b1 = reduced_betti(&RelativePair::absolute(g.clone()), FieldSpec::Rational, &Budgets::default())
            .unwrap()
            .reduced(1);
        assert_eq!(m_bracket(&g, &[2], 100).unwrap().m_ub, b1);
    }
}
