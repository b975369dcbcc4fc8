use mulab_core::construct::{csaszar_torus, cyclic_boundary, projective_plane, stacked_manifold};
use mulab_core::mu::Provenance;
use mulab_core::verify::{Context, Outcome, Subject, Theorem, VerifyOptions};
use mulab_core::{mu_exact, mu_sampled, Budgets, FieldSpec, RelativePair};

#[test]
fn sampled_mu_on_torus_is_within_three_standard_errors() {
    let pair = RelativePair::absolute(csaszar_torus().complex);
    let exact = mu_exact(&pair, FieldSpec::Rational, &Budgets::default()).unwrap();
    let sampled = mu_sampled(&pair, FieldSpec::Rational, 10_000, 3).unwrap();
    let Provenance::Sampled { stderr, .. } = &sampled.provenance else {
        panic!("sampled provenance expected");
    };
    for (i, se) in stderr.iter().enumerate() {
        let to_f = |r: &mulab_core::Rational| {
            use num_traits::ToPrimitive;
            r.to_f64().unwrap()
        };
        let diff = (to_f(&sampled.get(i)) - to_f(&exact.get(i))).abs();
        assert!(diff <= 3.0 * se + 1e-12, "mu_{i}: diff {diff}, se {se}");
    }
    // same seed, same answer
    assert_eq!(mu_sampled(&pair, FieldSpec::Rational, 10_000, 3).unwrap(), sampled);
}

fn run(t: Theorem, subject: &Subject) -> mulab_core::verify::VerificationReport {
    let opts = VerifyOptions {
        samples: 10,
        ..VerifyOptions::default()
    };
    t.run(&Context::new("x", subject, FieldSpec::Rational, &opts))
}

#[test]
fn cyclic_nine_meets_the_mu_bound_with_equality() {
    let c = cyclic_boundary(9).unwrap();
    let s = Subject::complex(c.complex);
    let r = run(Theorem::G2Bound, &s);
    assert_eq!(r.outcome, Outcome::Verified);
    assert_eq!(r.g2, Some(10));
    assert_eq!(r.m.as_ref().map(|m| (m.m_lb, m.m_ub)), Some((0, 0)));
    assert!(r.equalities.iter().any(|e| e == "g2 = C(d+2,2)(mu1-mu0+1)"));
}

#[test]
fn torus_h2_has_slack_four() {
    let s = Subject::certified(csaszar_torus().complex, csaszar_torus().certificate);
    let r = run(Theorem::H2Bound, &s);
    assert_eq!(r.outcome, Outcome::Verified);
    assert_eq!(r.h[2], 10);
    assert_eq!(r.slack, Some(mulab_core::Rational::from_integer(4.into())));
}

#[test]
fn projective_plane_mu_is_field_independent() {
    let pair = RelativePair::absolute(projective_plane().complex);
    let b = Budgets::default();
    let q = mu_exact(&pair, FieldSpec::Rational, &b).unwrap();
    let f2 = mu_exact(&pair, FieldSpec::Prime(2), &b).unwrap();
    // every vertex link is a circle, so the field never matters here
    assert_eq!(q.mu, f2.mu);
}

#[test]
fn handles_raise_mu_gap_one_at_a_time() {
    for h in 0..=2 {
        let c = stacked_manifold(4, 4, h, 11).unwrap();
        let pair = RelativePair::absolute(c.complex);
        let mu = mu_exact(&pair, FieldSpec::Prime(3), &Budgets::default()).unwrap();
        assert_eq!(mu.mu1_minus_mu0_plus_1(), mulab_core::Rational::from_integer((h as i64).into()));
    }
}
