//! Checks of the lower-bound inequalities and their equality cases on one
//! subject at a time.
//!
//! Every check is exact. When a quantity is only bracketed (the generator
//! count `m` of π₁) a check is verified if it holds at the upper end,
//! violated if it fails at the lower end, and inconclusive otherwise. Failed
//! hypotheses never stop the computation: the report keeps every number and
//! its outcome becomes `not-asserted`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::complex::{binomial, FVector, HVector, RelativePair, SimplicialComplex};
use crate::construct::Certificate;
use crate::error::Result;
use crate::homology::{reduced_betti, BettiVector, FieldSpec};
use crate::mu::{family_sigma, morse_defects_from, mu_exact, mu_ordering, MuVector, VertexOrdering};
use crate::num::{int, ser_opt_rational, ser_rational, zero, Rational};
use crate::pi1::m_bracket;
use crate::poset::{
    poset_disconnected_links, poset_link_sigma, poset_mu_exact, poset_mu_ordering, poset_seeded_ordering, poset_serre,
    sd_ordering, RelativePosetPair,
};
use crate::recognize::{is_normal_pseudomanifold, serre_condition};
use crate::Budgets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Verified,
    Inconclusive,
    Violated,
    /// A hypothesis failed; numbers are reported but nothing is claimed.
    NotAsserted,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Verified => "verified",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Violated => "violated",
            Outcome::NotAsserted => "not-asserted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `lhs ≥ rhs`.
    Ge,
    /// `lhs = rhs`.
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: Rational,
    /// Right-hand side; for bracketed checks, evaluated at `m_ub`.
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    /// `lhs − rhs`.
    #[serde(serialize_with = "ser_rational")]
    pub slack: Rational,
    /// `lhs − rhs` at `m_lb`, for bracketed checks.
    #[serde(serialize_with = "ser_opt_rational", skip_serializing_if = "Option::is_none")]
    pub slack_at_m_lb: Option<Rational>,
    pub outcome: Outcome,
}

impl Check {
    fn exact(name: impl Into<String>, relation: Relation, lhs: Rational, rhs: Rational) -> Check {
        let slack = &lhs - &rhs;
        let ok = match relation {
            Relation::Ge => !slack.is_negative(),
            Relation::Eq => slack == zero(),
        };
        Check {
            name: name.into(),
            relation,
            lhs,
            rhs,
            slack,
            slack_at_m_lb: None,
            outcome: if ok { Outcome::Verified } else { Outcome::Violated },
        }
    }

    /// `lhs ≥ c·m + offset` with `m ∈ [m_lb, m_ub]`.
    fn bracket(name: impl Into<String>, lhs: Rational, c: i64, offset: i64, m: &MInfo) -> Check {
        let at = |x: usize| int(c * x as i64 + offset);
        let rhs = at(m.m_ub);
        let slack = &lhs - &rhs;
        let slack_lb = &lhs - at(m.m_lb);
        let outcome = if !slack.is_negative() {
            Outcome::Verified
        } else if slack_lb.is_negative() {
            Outcome::Violated
        } else {
            Outcome::Inconclusive
        };
        Check {
            name: name.into(),
            relation: Relation::Ge,
            lhs,
            rhs,
            slack,
            slack_at_m_lb: (m.m_lb != m.m_ub).then_some(slack_lb),
            outcome,
        }
    }

    fn inconclusive(name: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            relation: Relation::Ge,
            lhs: zero(),
            rhs: zero(),
            slack: zero(),
            slack_at_m_lb: None,
            outcome: Outcome::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn hyp(name: &str, holds: bool, detail: Option<String>) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        holds,
        detail,
    }
}

/// Bracket on `m(Δ)`, the minimum number of generators of π₁.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MInfo {
    pub m_lb: usize,
    pub m_ub: usize,
    /// `certificate` or `bracket`.
    pub source: String,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub theorem: String,
    pub field: FieldSpec,
    /// Dimension of the subject.
    pub d: Option<isize>,
    /// Number of vertices.
    pub n: usize,
    pub f: Vec<u64>,
    pub h: Vec<i64>,
    pub g2: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<MInfo>,
    /// Reduced Betti numbers `b̃_{−1}, b̃_0, …`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betti: Option<Vec<usize>>,
    pub hypotheses: Vec<Hypothesis>,
    pub asserted: bool,
    pub checks: Vec<Check>,
    pub equalities: Vec<String>,
    pub outcome: Outcome,
    /// Slack of the first check.
    #[serde(serialize_with = "ser_opt_rational")]
    pub slack: Option<Rational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn finish(mut self) -> Self {
        self.asserted = self.hypotheses.iter().all(|h| h.holds);
        let worst = self.checks.iter().map(|c| c.outcome).max().unwrap_or(Outcome::Verified);
        self.outcome = if self.asserted { worst } else { Outcome::NotAsserted };
        self.slack = self.checks.first().map(|c| c.slack.clone());
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One CSV row: subject, theorem@field, d, n, g2, mu0, mu1, m_lb, m_ub,
    /// outcome, slack.
    pub fn csv_row(&self) -> Vec<String> {
        let opt = |x: Option<String>| x.unwrap_or_default();
        vec![
            self.subject.clone(),
            format!("{}@{}", self.theorem, self.field),
            opt(self.d.map(|d| d.to_string())),
            self.n.to_string(),
            opt(self.g2.map(|g| g.to_string())),
            opt(self.mu.as_ref().map(|m| m.get(0).to_string())),
            opt(self.mu.as_ref().map(|m| m.get(1).to_string())),
            opt(self.m.as_ref().map(|m| m.m_lb.to_string())),
            opt(self.m.as_ref().map(|m| m.m_ub.to_string())),
            self.outcome.as_str().to_string(),
            opt(self.slack.as_ref().map(|s| s.to_string())),
        ]
    }
}

pub const CSV_HEADER: [&str; 11] = ["subject", "theorem", "d", "n", "g2", "mu0", "mu1", "m_lb", "m_ub", "outcome", "slack"];

/// What is being checked.
#[derive(Clone, Debug)]
pub enum Subject {
    Complex {
        pair: RelativePair,
        certificate: Option<Certificate>,
    },
    Poset(RelativePosetPair),
}

impl Subject {
    pub fn complex(c: SimplicialComplex) -> Subject {
        Subject::Complex {
            pair: RelativePair::absolute(c),
            certificate: None,
        }
    }

    pub fn certified(c: SimplicialComplex, certificate: Certificate) -> Subject {
        Subject::Complex {
            pair: RelativePair::absolute(c),
            certificate: Some(certificate),
        }
    }

    pub fn is_poset(&self) -> bool {
        matches!(self, Subject::Poset(_))
    }

    pub fn is_absolute(&self) -> bool {
        match self {
            Subject::Complex { pair, .. } => pair.is_absolute(),
            Subject::Poset(p) => p.is_void_gamma(),
        }
    }

    pub fn dim(&self) -> Option<isize> {
        match self {
            Subject::Complex { pair, .. } => pair.dim(),
            Subject::Poset(p) => p.dim(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Subject::Complex { pair, .. } => pair.vertices().len(),
            Subject::Poset(p) => p.delta.n_vertices(),
        }
    }

    pub fn f_vector(&self) -> FVector {
        match self {
            Subject::Complex { pair, .. } => pair.f_vector(),
            Subject::Poset(p) => p.f_vector(),
        }
    }

    fn is_pure(&self) -> bool {
        match self {
            Subject::Complex { pair, .. } => crate::recognize::is_pure(pair).holds,
            Subject::Poset(p) => p.is_pure(),
        }
    }

    fn betti(&self, field: FieldSpec, budgets: &Budgets) -> Result<BettiVector> {
        match self {
            Subject::Complex { pair, .. } => reduced_betti(pair, field, budgets),
            Subject::Poset(p) => reduced_betti(&p.sd_pair(), field, budgets),
        }
    }

    fn mu_exact(&self, field: FieldSpec, budgets: &Budgets) -> Result<MuVector> {
        match self {
            Subject::Complex { pair, .. } => mu_exact(pair, field, budgets),
            Subject::Poset(p) => poset_mu_exact(p, field, budgets),
        }
    }

    fn mu_sampled_ordering(&self, field: FieldSpec, seed: u64, index: u64) -> Result<MuVector> {
        match self {
            Subject::Complex { pair, .. } => mu_ordering(pair, &VertexOrdering::seeded(pair, seed, index), field),
            Subject::Poset(p) => poset_mu_ordering(p, &poset_seeded_ordering(&p.delta, seed, index), field),
        }
    }

    /// Complex whose π₁ is meant by `m`: Δ itself, or sd Δ for a poset.
    fn pi1_complex(&self) -> SimplicialComplex {
        match self {
            Subject::Complex { pair, .. } => pair.delta.clone(),
            Subject::Poset(p) => p.sd_pair().delta,
        }
    }

    fn certificate(&self) -> Option<&Certificate> {
        match self {
            Subject::Complex { certificate, .. } => certificate.as_ref(),
            Subject::Poset(_) => None,
        }
    }

    /// Labels of faces of dimension `≤ max_dim` with a disconnected link.
    fn disconnected_low_links(&self, max_dim: isize) -> Vec<String> {
        if max_dim < -1 {
            return Vec::new();
        }
        match self {
            Subject::Complex { pair, .. } => {
                let c = &pair.delta;
                c.faces()
                    .into_iter()
                    .filter(|f| f.dim() <= max_dim)
                    .filter(|f| !c.link(f).is_connected())
                    .map(|f| format!("{{{}}}", c.face_labels(&f).join(",")))
                    .collect()
            }
            Subject::Poset(p) => poset_disconnected_links(&p.delta, (max_dim + 1) as usize)
                .into_iter()
                .map(|id| if id == 0 { "∅".to_string() } else { format!("#{id}") })
                .collect(),
        }
    }

    fn is_connected(&self) -> bool {
        match self {
            Subject::Complex { pair, .. } => pair.delta.is_connected(),
            Subject::Poset(p) => poset_disconnected_links(&p.delta, 0).is_empty(),
        }
    }

    fn vertex_labels(&self) -> Vec<String> {
        match self {
            Subject::Complex { pair, .. } => pair.vertices().iter().map(|&v| pair.delta.label(v).to_string()).collect(),
            Subject::Poset(p) => (0..p.delta.n_vertices())
                .map(|k| p.delta.id_of(p.delta.vertex_face(k)).to_string())
                .collect(),
        }
    }

    fn link_h(&self, k: usize, d: usize) -> HVector {
        match self {
            Subject::Complex { pair, .. } => pair.vertex_link(pair.vertices()[k]).h_vector(Some(d)),
            Subject::Poset(p) => p.vertex_link(k).h_vector(Some(d)),
        }
    }

    fn link_sigma(&self, k: usize, len: usize, field: FieldSpec, budgets: &Budgets) -> Result<Vec<Rational>> {
        match self {
            Subject::Complex { pair, .. } => family_sigma(&pair.family().vertex_link(pair.vertices()[k]), len, field, budgets),
            Subject::Poset(p) => poset_link_sigma(p, k, len, field, budgets),
        }
    }

    fn link_serre(&self, k: usize, r: usize, field: FieldSpec) -> bool {
        match self {
            Subject::Complex { pair, .. } => serre_condition(&pair.vertex_link(pair.vertices()[k]), r, field, false)
                .map(|v| v.holds)
                .unwrap_or(true),
            Subject::Poset(p) => poset_serre(&p.vertex_link(k), r, field).is_none(),
        }
    }
}

/// Sampling and resource settings shared by the verifiers.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    /// Orderings sampled per subject for ordering-wise checks.
    pub samples: usize,
    pub seed: u64,
    /// Primes whose `dim H_1` bounds `m` from below.
    pub primes: Vec<u32>,
    pub budgets: Budgets,
    /// Serre parameter for the h_i bounds; `None` picks the largest `r ≤ d`
    /// that every vertex link satisfies.
    pub hi_r: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 50,
            seed: 1,
            primes: vec![2, 3, 5, 7],
            budgets: Budgets::default(),
            hi_r: None,
        }
    }
}

/// Per-subject, per-field cache of the expensive quantities.
pub struct Context<'a> {
    pub subject: &'a Subject,
    pub id: String,
    pub field: FieldSpec,
    pub opts: &'a VerifyOptions,
    mu: OnceLock<std::result::Result<MuVector, String>>,
    m: OnceLock<std::result::Result<MInfo, String>>,
    betti: OnceLock<std::result::Result<BettiVector, String>>,
}

impl<'a> Context<'a> {
    pub fn new(id: impl Into<String>, subject: &'a Subject, field: FieldSpec, opts: &'a VerifyOptions) -> Self {
        Context {
            subject,
            id: id.into(),
            field,
            opts,
            mu: OnceLock::new(),
            m: OnceLock::new(),
            betti: OnceLock::new(),
        }
    }

    fn mu(&self) -> std::result::Result<&MuVector, &String> {
        self.mu
            .get_or_init(|| self.subject.mu_exact(self.field, &self.opts.budgets).map_err(|e| e.to_string()))
            .as_ref()
    }

    fn betti(&self) -> std::result::Result<&BettiVector, &String> {
        self.betti
            .get_or_init(|| self.subject.betti(self.field, &self.opts.budgets).map_err(|e| e.to_string()))
            .as_ref()
    }

    /// `m` from the certificate when there is one, otherwise bracketed from
    /// π₁ of the complex (its subdivision, for posets).
    fn m(&self) -> std::result::Result<&MInfo, &String> {
        self.m
            .get_or_init(|| {
                if let Some(m) = self.subject.certificate().and_then(|c| c.m) {
                    return Ok(MInfo {
                        m_lb: m,
                        m_ub: m,
                        source: "certificate".into(),
                        budget_exhausted: false,
                    });
                }
                m_bracket(&self.subject.pi1_complex(), &self.opts.primes, self.opts.budgets.tietze)
                    .map(|b| MInfo {
                        m_lb: b.m_lb,
                        m_ub: b.m_ub,
                        source: "bracket".into(),
                        budget_exhausted: b.budget_exhausted,
                    })
                    .map_err(|e| e.to_string())
            })
            .as_ref()
    }

    fn report(&self, theorem: &str) -> VerificationReport {
        let f = self.subject.f_vector();
        let h = HVector::from_f(&f, None);
        VerificationReport {
            subject: self.id.clone(),
            theorem: theorem.to_string(),
            field: self.field,
            d: self.subject.dim(),
            n: self.subject.n(),
            f: f.f,
            g2: h.g2,
            h: h.h,
            mu: None,
            m: None,
            betti: None,
            hypotheses: Vec::new(),
            asserted: true,
            checks: Vec::new(),
            equalities: Vec::new(),
            outcome: Outcome::Verified,
            slack: None,
            notes: Vec::new(),
        }
    }

    fn d(&self) -> isize {
        self.subject.dim().unwrap_or(-1)
    }
}

/// Adds μ to the report, or a note and `None` when it could not be computed.
fn attach_mu(ctx: &Context, r: &mut VerificationReport) -> Option<MuVector> {
    match ctx.mu() {
        Ok(mu) => {
            r.mu = Some(mu.clone());
            Some(mu.clone())
        }
        Err(e) => {
            r.notes.push(format!("exact μ unavailable: {e}"));
            None
        }
    }
}

fn attach_m(ctx: &Context, r: &mut VerificationReport) -> Option<MInfo> {
    match ctx.m() {
        Ok(m) => {
            if m.budget_exhausted {
                r.notes.push("Tietze budget exhausted; m_ub may be loose".into());
            }
            r.m = Some(m.clone());
            Some(m.clone())
        }
        Err(e) => {
            r.notes.push(format!("m unavailable: {e}"));
            None
        }
    }
}

fn absolute_hypothesis(ctx: &Context) -> Hypothesis {
    hyp("absolute", ctx.subject.is_absolute(), None)
}

/// `g₂ ≥ C(d+2,2)·(μ₁ − μ₀ + 1)`, `μ₁ − μ₀ + 1 ≥ m`, `μ₁^ς − μ₀^ς ≥ m − b₀`
/// on sampled orderings, and `g₂ ≥ C(d+2,2)·m`, for connected normal
/// pseudomanifolds of dimension `d ≥ 3`.
pub fn verify_g2_bound(ctx: &Context) -> VerificationReport {
    let mut r = ctx.report("g2_bound");
    let d = ctx.d();
    r.hypotheses.push(absolute_hypothesis(ctx));
    match ctx.subject {
        Subject::Complex { pair, .. } => {
            let npm = is_normal_pseudomanifold(&pair.delta);
            let detail = npm.witnesses.first().map(|w| format!("{{{}}}: {}", w.face.join(","), w.clause));
            r.hypotheses.push(hyp("normal_pseudomanifold", npm.holds, detail));
        }
        Subject::Poset(_) => r.hypotheses.push(hyp("normal_pseudomanifold", false, Some("posets are not covered".into()))),
    }
    r.hypotheses.push(hyp("connected", ctx.subject.is_connected(), None));
    r.hypotheses.push(hyp("dim_at_least_3", d >= 3, None));

    let Some(g2) = r.g2 else {
        r.checks.push(Check::inconclusive("g2 defined"));
        r.notes.push("g2 needs dimension ≥ 1".into());
        return r.finish();
    };
    let c = binomial(d as i64 + 2, 2);
    let g2r = int(g2);
    let mu = attach_mu(ctx, &mut r);
    let m = attach_m(ctx, &mut r);
    match &mu {
        Some(mu) => {
            let x = mu.mu1_minus_mu0_plus_1();
            r.checks.push(Check::exact("g2 >= C(d+2,2)(mu1-mu0+1)", Relation::Ge, g2r.clone(), int(c) * &x));
            if g2r == int(c) * &x {
                r.equalities.push("g2 = C(d+2,2)(mu1-mu0+1)".into());
            }
            if let Some(m) = &m {
                r.checks.push(Check::bracket("mu1-mu0+1 >= m", x.clone(), 1, 0, m));
                if m.m_lb == m.m_ub && x == int(m.m_ub as i64) {
                    r.equalities.push("mu1-mu0+1 = m".into());
                }
            }
        }
        None => r.checks.push(Check::inconclusive("g2 >= C(d+2,2)(mu1-mu0+1)")),
    }
    if let Some(m) = &m {
        r.checks.push(ordering_check(ctx, m, &mut r.notes));
        r.checks.push(Check::bracket("g2 >= C(d+2,2) m", g2r.clone(), c, 0, m));
        if m.m_lb == m.m_ub && g2 == c * m.m_ub as i64 {
            r.equalities.push("g2 = C(d+2,2) m".into());
        }
    } else {
        r.checks.push(Check::inconclusive("g2 >= C(d+2,2) m"));
    }
    r.finish()
}

/// `min_ς (μ₁^ς − μ₀^ς) ≥ m − b₀` over the sampled orderings.
fn ordering_check(ctx: &Context, m: &MInfo, notes: &mut Vec<String>) -> Check {
    let b0 = match ctx.betti() {
        Ok(b) => b.unreduced(0) as i64,
        Err(e) => {
            notes.push(format!("Betti numbers unavailable: {e}"));
            return Check::inconclusive("mu1^s-mu0^s >= m-b0");
        }
    };
    let mut worst: Option<Rational> = None;
    for i in 0..ctx.opts.samples.max(1) {
        match ctx.subject.mu_sampled_ordering(ctx.field, ctx.opts.seed, i as u64) {
            Ok(mu) => {
                let x = mu.get(1) - mu.get(0);
                if worst.as_ref().is_none_or(|w| &x < w) {
                    worst = Some(x);
                }
            }
            Err(e) => {
                notes.push(format!("ordering {i}: {e}"));
                return Check::inconclusive("mu1^s-mu0^s >= m-b0");
            }
        }
    }
    Check::bracket("mu1^s-mu0^s >= m-b0", worst.unwrap_or_else(zero), 1, -b0, m)
}

/// `μ₁ − μ₀ + 1 ≥ m` and, per sampled ordering, `μ₁^ς − μ₀^ς ≥ m − b₀`, for
/// connected subjects.
pub fn verify_mu_vs_m(ctx: &Context) -> VerificationReport {
    let mut r = ctx.report("mu_vs_m");
    r.hypotheses.push(absolute_hypothesis(ctx));
    r.hypotheses.push(hyp("connected", ctx.subject.is_connected(), None));
    if !r.hypotheses.iter().all(|h| h.holds) {
        return r.finish();
    }
    let mu = attach_mu(ctx, &mut r);
    let Some(m) = attach_m(ctx, &mut r) else {
        r.checks.push(Check::inconclusive("mu1-mu0+1 >= m"));
        return r.finish();
    };
    match mu {
        Some(mu) => {
            let x = mu.mu1_minus_mu0_plus_1();
            if m.m_lb == m.m_ub && x == int(m.m_ub as i64) {
                r.equalities.push("mu1-mu0+1 = m".into());
            }
            r.checks.push(Check::bracket("mu1-mu0+1 >= m", x, 1, 0, &m));
        }
        None => r.checks.push(Check::inconclusive("mu1-mu0+1 >= m")),
    }
    r.checks.push(ordering_check(ctx, &m, &mut r.notes));
    r.finish()
}

/// Morse inequalities: every partial alternating sum of `μ − b` is
/// nonnegative, for exact μ and for each sampled μ^ς.
pub fn verify_morse(ctx: &Context) -> VerificationReport {
    let mut r = ctx.report("morse");
    let betti = match ctx.betti() {
        Ok(b) => b.clone(),
        Err(e) => {
            r.notes.push(format!("Betti numbers unavailable: {e}"));
            r.checks.push(Check::inconclusive("morse defects"));
            return r.finish();
        }
    };
    r.betti = Some(betti.reduced.clone());
    let min_defect = |mu: &[Rational]| morse_defects_from(mu, &betti).into_iter().min().unwrap_or_else(zero);
    match attach_mu(ctx, &mut r) {
        Some(mu) => r.checks.push(Check::exact("min defect (exact mu)", Relation::Ge, min_defect(&mu.mu), zero())),
        None => r.checks.push(Check::inconclusive("min defect (exact mu)")),
    }
    let mut worst: Option<Rational> = None;
    for i in 0..ctx.opts.samples {
        match ctx.subject.mu_sampled_ordering(ctx.field, ctx.opts.seed, i as u64) {
            Ok(mu) => {
                let x = min_defect(&mu.mu);
                if worst.as_ref().is_none_or(|w| &x < w) {
                    worst = Some(x);
                }
            }
            Err(e) => r.notes.push(format!("ordering {i}: {e}")),
        }
    }
    if let Some(w) = worst {
        r.checks.push(Check::exact("min defect (sampled orderings)", Relation::Ge, w, zero()));
    }
    r.finish()
}

/// `h₂ ≥ C(d+1,2)·m` for pure connected subjects of dimension `d ≥ 2` whose
/// faces of dimension `≤ d − 2` have connected links.
pub fn verify_h2_bound(ctx: &Context) -> VerificationReport {
    let mut r = ctx.report("h2_bound");
    let d = ctx.d();
    r.hypotheses.push(absolute_hypothesis(ctx));
    r.hypotheses.push(hyp("pure", ctx.subject.is_pure(), None));
    r.hypotheses.push(hyp("connected", ctx.subject.is_connected(), None));
    r.hypotheses.push(hyp("dim_at_least_2", d >= 2, None));
    let bad = ctx.subject.disconnected_low_links(d - 2);
    let detail = (!bad.is_empty()).then(|| format!("disconnected links at {}", bad.iter().take(5).cloned().collect::<Vec<_>>().join(" ")));
    r.hypotheses.push(hyp("low_links_connected", bad.is_empty(), detail));
    if d < 2 || !ctx.subject.is_connected() {
        r.checks.push(Check::inconclusive("h2 >= C(d+1,2) m"));
        return r.finish();
    }
    let h2 = int(r.h[2]);
    match attach_m(ctx, &mut r) {
        Some(m) => {
            let c = binomial(d as i64 + 1, 2);
            if m.m_lb == m.m_ub && r.h[2] == c * m.m_ub as i64 {
                r.equalities.push("h2 = C(d+1,2) m".into());
            }
            r.checks.push(Check::bracket("h2 >= C(d+1,2) m", h2, c, 0, &m));
        }
        None => r.checks.push(Check::inconclusive("h2 >= C(d+1,2) m")),
    }
    r.finish()
}

/// The `h_i` lower bounds for `i ≤ r`, the link inequality on every vertex
/// link that satisfies `(S_r)`, and the exact link-sum identity for h.
pub fn verify_hi_bounds(ctx: &Context) -> VerificationReport {
    let mut r = ctx.report("hi_bounds");
    let Some(dim) = ctx.subject.dim().filter(|&d| d >= 0) else {
        r.notes.push("void or {∅}: nothing to check".into());
        return r.finish();
    };
    let d = dim as usize;
    let n = ctx.subject.n();
    let pure = ctx.subject.is_pure();
    r.hypotheses.push(hyp("pure", pure, None));
    let field = ctx.field;
    let link_ok = |rr: usize| (0..n).filter(|&k| !ctx.subject.link_serre(k, rr, field)).collect::<Vec<_>>();
    let (rr, failing) = match ctx.opts.hi_r {
        Some(rr) => (rr.clamp(1, d.max(1)), link_ok(rr.clamp(1, d.max(1)))),
        None => {
            let mut rr = d.max(1);
            let mut failing = link_ok(rr);
            while !failing.is_empty() && rr > 1 {
                rr -= 1;
                failing = link_ok(rr);
            }
            (rr, failing)
        }
    };
    let labels = ctx.subject.vertex_labels();
    r.hypotheses.push(hyp(
        &format!("vertex_links_serre_{rr}"),
        failing.is_empty(),
        (!failing.is_empty()).then(|| format!("vertex {} fails", labels[failing[0]])),
    ));
    if pure && rr == d.max(1) && failing.is_empty() {
        r.notes.push(format!("Buchsbaum over {field}: bounds checked for all i ≤ {d}"));
    }
    r.notes.push(format!("r = {rr}"));

    let h = r.h.clone();
    let hget = |i: usize| h.get(i).copied().unwrap_or(0);
    let fm1 = r.f.first().copied().unwrap_or(0) as i64;

    // h_i ≥ C(d+1,i)(Σ_{j=1}^{i} (−1)^{i−j} μ_{j−1} + (−1)^i f_{−1})
    match attach_mu(ctx, &mut r) {
        Some(mu) => {
            for i in 0..=rr.min(d) {
                let mut alt = if i % 2 == 0 { int(fm1) } else { int(-fm1) };
                for j in 1..=i {
                    let t = mu.get(j - 1);
                    if (i - j) % 2 == 0 {
                        alt += t;
                    } else {
                        alt -= t;
                    }
                }
                let rhs = int(binomial(d as i64 + 1, i as i64)) * alt;
                r.checks.push(Check::exact(format!("h{i} bound"), Relation::Ge, int(hget(i)), rhs));
            }
        }
        None => r.checks.push(Check::inconclusive("h_i bounds")),
    }

    // i·h_i + (d−i+2)·h_{i−1} = Σ_v h_{i−1}(lk v) with link parameter d
    let link_h: Vec<HVector> = (0..n).map(|k| ctx.subject.link_h(k, d)).collect();
    for i in 1..=d + 1 {
        let lhs = i as i64 * hget(i) + (d as i64 - i as i64 + 2) * hget(i - 1);
        let rhs: i64 = link_h.iter().map(|lh| lh.get(i - 1)).sum();
        r.checks.push(Check::exact(format!("link-sum identity i={i}"), Relation::Eq, int(lhs), int(rhs)));
    }

    // Σ_{j≤i} (−1)^{i−j} σ̃_{j−1} ≤ (1/(d+1)) Σ_{j≤i} (−1)^{i−j} h_j(lk)/C(d,j), i ≤ r−1
    let len = rr.max(1);
    let mut worst: Option<(Rational, Rational, Rational)> = None;
    let mut checked = 0usize;
    for k in 0..n {
        if !ctx.subject.link_serre(k, rr, field) {
            continue;
        }
        let sigma = match ctx.subject.link_sigma(k, len, field, &ctx.opts.budgets) {
            Ok(s) => s,
            Err(e) => {
                r.notes.push(format!("σ̃ of link of {} unavailable: {e}", labels[k]));
                r.checks.push(Check::inconclusive("link sigma bound"));
                continue;
            }
        };
        checked += 1;
        for i in 0..rr {
            let mut lhs = zero();
            let mut rhs = zero();
            for j in 0..=i {
                let s = sigma.get(j).cloned().unwrap_or_else(zero);
                let t = Rational::new(BigInt::from(link_h[k].get(j)), BigInt::from(binomial(d as i64, j as i64).max(1)));
                if (i - j) % 2 == 0 {
                    lhs += s;
                    rhs += t;
                } else {
                    lhs -= s;
                    rhs -= t;
                }
            }
            rhs /= int(d as i64 + 1);
            // stored as rhs − lhs ≥ 0
            let slack = &rhs - &lhs;
            if worst.as_ref().is_none_or(|w| slack < w.0) {
                worst = Some((slack, rhs, lhs));
            }
        }
    }
    if let Some((_, rhs, lhs)) = worst {
        r.checks.push(Check::exact("link sigma bound (min over links, i < r)", Relation::Ge, rhs, lhs));
    }
    r.notes.push(format!("link sigma bound checked on {checked} of {n} vertex links"));
    r.finish()
}

/// Poset μ^ς against μ^{sd ς} of the subdivision for every ordering (all of
/// them up to `enumerate` vertices, otherwise `samples` seeded ones), plus
/// Betti numbers through sd against the cellular chain complex.
pub fn verify_poset_sd(ctx: &Context) -> VerificationReport {
    let mut r = ctx.report("poset_sd");
    let Subject::Poset(p) = ctx.subject else {
        r.hypotheses.push(hyp("poset", false, None));
        return r.finish();
    };
    let n = p.delta.n_vertices();
    let orderings: Vec<VertexOrdering> = if n <= ctx.opts.budgets.enumerate.min(5) {
        use itertools::Itertools;
        (0..n as u32).permutations(n).map(VertexOrdering::new).collect()
    } else {
        (0..ctx.opts.samples.max(1) as u64)
            .map(|i| poset_seeded_ordering(&p.delta, ctx.opts.seed, i))
            .collect()
    };
    let sd = p.sd_pair();
    let mut mismatches = 0i64;
    for (i, s) in orderings.iter().enumerate() {
        let a = poset_mu_ordering(p, s, ctx.field);
        let b = sd_ordering(&p.delta, s, None).and_then(|o| mu_ordering(&sd, &o, ctx.field));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let len = a.mu.len().max(b.mu.len());
                if (0..len).any(|j| a.get(j) != b.get(j)) {
                    mismatches += 1;
                    if mismatches == 1 {
                        r.notes.push(format!("ordering {i}: {:?} vs {:?}", a.mu, b.mu));
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => r.notes.push(format!("ordering {i}: {e}")),
        }
    }
    r.notes.push(format!("{} orderings compared", orderings.len()));
    r.checks.push(Check::exact("orderings with mu^s != mu^sd(s)", Relation::Eq, int(mismatches), zero()));
    let via_sd = p.reduced_betti(ctx.field);
    let cell = p.cellular_betti(ctx.field);
    let len = via_sd.len().max(cell.len());
    let differ = (0..len).filter(|&i| via_sd.get(i).unwrap_or(&0) != cell.get(i).unwrap_or(&0)).count();
    r.betti = Some(via_sd);
    r.checks.push(Check::exact("Betti degrees where sd != cellular", Relation::Eq, int(differ as i64), zero()));
    r.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    G2Bound,
    MuVsM,
    Morse,
    H2Bound,
    HiBounds,
    PosetSd,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::Morse,
        Theorem::MuVsM,
        Theorem::G2Bound,
        Theorem::H2Bound,
        Theorem::HiBounds,
        Theorem::PosetSd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::G2Bound => "g2_bound",
            Theorem::MuVsM => "mu_vs_m",
            Theorem::Morse => "morse",
            Theorem::H2Bound => "h2_bound",
            Theorem::HiBounds => "hi_bounds",
            Theorem::PosetSd => "poset_sd",
        }
    }

    pub fn parse(s: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Whether the theorem is meaningful for the subject at all; hypotheses
    /// are checked separately.
    pub fn applies_to(self, s: &Subject) -> bool {
        let d = s.dim().unwrap_or(-1);
        match self {
            Theorem::Morse => true,
            Theorem::MuVsM => s.is_absolute() && d >= 1,
            Theorem::G2Bound => s.is_absolute() && d >= 2,
            Theorem::H2Bound => s.is_absolute() && d >= 1,
            Theorem::HiBounds => d >= 0,
            Theorem::PosetSd => s.is_poset(),
        }
    }

    pub fn run(self, ctx: &Context) -> VerificationReport {
        match self {
            Theorem::G2Bound => verify_g2_bound(ctx),
            Theorem::MuVsM => verify_mu_vs_m(ctx),
            Theorem::Morse => verify_morse(ctx),
            Theorem::H2Bound => verify_h2_bound(ctx),
            Theorem::HiBounds => verify_hi_bounds(ctx),
            Theorem::PosetSd => verify_poset_sd(ctx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{csaszar_torus, cyclic_boundary, projective_plane, simplex_boundary, stacked_manifold};
    use crate::poset::{build_poset, PosetRecord};

    fn opts() -> VerifyOptions {
        VerifyOptions {
            samples: 10,
            ..VerifyOptions::default()
        }
    }

    fn run(t: Theorem, s: &Subject) -> VerificationReport {
        let o = opts();
        let ctx = Context::new("x", s, FieldSpec::Rational, &o);
        t.run(&ctx)
    }

    fn parallel_edges() -> Subject {
        let rec = |id, rank, covers: &[u64]| PosetRecord {
            id,
            rank,
            covers: covers.to_vec(),
        };
        let d = build_poset(&[rec(1, 1, &[]), rec(2, 1, &[]), rec(3, 2, &[1, 2]), rec(4, 2, &[1, 2]), rec(5, 2, &[1, 2])])
            .unwrap();
        Subject::Poset(RelativePosetPair::absolute(d))
    }

    #[test]
    fn stacked_equality() {
        let s = stacked_manifold(4, 5, 1, 7).unwrap();
        let subj = Subject::certified(s.complex, s.certificate);
        let r = run(Theorem::G2Bound, &subj);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        assert_eq!(r.g2, Some(15));
        assert_eq!(r.check("g2 >= C(d+2,2) m").unwrap().slack, zero());
        assert_eq!(r.check("g2 >= C(d+2,2)(mu1-mu0+1)").unwrap().slack, zero());
        assert!(r.equalities.contains(&"mu1-mu0+1 = m".to_string()));
    }

    #[test]
    fn sphere_trivial() {
        let s = simplex_boundary(5).unwrap();
        let subj = Subject::certified(s.complex, s.certificate);
        let r = run(Theorem::G2Bound, &subj);
        assert_eq!(r.outcome, Outcome::Verified);
        assert_eq!(r.g2, Some(0));
        let r = run(Theorem::HiBounds, &subj);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        for c in r.checks.iter().filter(|c| c.name.starts_with("link-sum")) {
            assert_eq!(c.slack, zero());
        }
        assert_eq!(r.check("h0 bound").unwrap().slack, zero());
    }

    #[test]
    fn cyclic_hi_bounds() {
        let c = cyclic_boundary(8).unwrap();
        let subj = Subject::certified(c.complex, c.certificate);
        let r = run(Theorem::HiBounds, &subj);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        assert!(r.check("h3 bound").is_some());
    }

    #[test]
    fn torus_h2() {
        let t = csaszar_torus();
        let subj = Subject::complex(t.complex);
        let r = run(Theorem::H2Bound, &subj);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        assert_eq!(r.h[2], 10);
        let m = r.m.unwrap();
        assert_eq!((m.m_lb, m.m_ub), (2, 2));
        assert_eq!(r.slack, Some(int(4)));
    }

    #[test]
    fn corrupted_input_not_asserted() {
        let s = stacked_manifold(4, 5, 1, 7).unwrap();
        let facets: Vec<_> = s.complex.facets()[1..].to_vec();
        let broken = SimplicialComplex::from_faces(s.complex.table().clone(), facets);
        let r = run(Theorem::G2Bound, &Subject::complex(broken));
        assert!(!r.asserted);
        assert_eq!(r.outcome, Outcome::NotAsserted);
    }

    #[test]
    fn poset_reports() {
        let p = parallel_edges();
        let r = run(Theorem::PosetSd, &p);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        let r = run(Theorem::Morse, &p);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        let r = run(Theorem::H2Bound, &p);
        assert!(!r.asserted);
        let r = run(Theorem::HiBounds, &p);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        let r = run(Theorem::MuVsM, &p);
        assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        assert_eq!(r.m.unwrap().m_ub, 2);
    }

    #[test]
    fn projective_plane_reports() {
        let rp = projective_plane();
        let subj = Subject::certified(rp.complex.clone(), rp.certificate);
        for t in [Theorem::Morse, Theorem::MuVsM, Theorem::H2Bound, Theorem::HiBounds] {
            let r = run(t, &subj);
            assert_eq!(r.outcome, Outcome::Verified, "{r:#?}");
        }
        let cone = Subject::complex(rp.complex.cone("apex").unwrap());
        let r = run(Theorem::H2Bound, &cone);
        assert!(r.asserted, "{r:#?}");
        assert_eq!(r.outcome, Outcome::Verified);
    }

    #[test]
    fn csv_row_shape() {
        let s = simplex_boundary(3).unwrap();
        let subj = Subject::certified(s.complex, s.certificate);
        let r = run(Theorem::G2Bound, &subj);
        let row = r.csv_row();
        assert_eq!(row.len(), CSV_HEADER.len());
        assert_eq!(row[1], "g2_bound@q");
        assert_eq!(row[9], "verified");
    }
}
