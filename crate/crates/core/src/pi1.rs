//! Fundamental groups: edge-path presentations, Tietze simplification (an
//! upper bound on the number of generators) and homological lower bounds.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::complex::{RelativePair, SimplicialComplex};
use crate::error::{Error, Result};
use crate::face::VertexId;
use crate::homology::{column_rank, Column, FieldSpec};

/// Letters are `±(k + 1)` for generator `k`; the sign is the exponent.
pub type Word = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|x| -x).collect()
}

fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cyclic_reduce(w: &[i32]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

/// Smallest rotation of `w` or of its inverse; equal for conjugate relators.
fn canonical(w: &[i32]) -> Word {
    let mut best: Option<Word> = None;
    for v in [w.to_vec(), inverse(w)] {
        for i in 0..v.len().max(1) {
            let mut r = v[i..].to_vec();
            r.extend_from_slice(&v[..i]);
            if best.as_ref().map_or(true, |b| r < *b) {
                best = Some(r);
            }
        }
    }
    best.unwrap_or_default()
}

impl GroupPresentation {
    pub fn free(k: usize) -> Self {
        GroupPresentation {
            generators: (0..k).map(|i| format!("x{i}")).collect(),
            relators: vec![],
        }
    }

    /// Cyclically reduces every relator and drops empty and repeated ones.
    fn normalize(&mut self) {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in &self.relators {
            let r = cyclic_reduce(r);
            if !r.is_empty() && seen.insert(canonical(&r)) {
                out.push(r);
            }
        }
        self.relators = out;
    }

    /// Exponent-sum matrix as columns (one per relator) over the generators.
    fn exponent_columns(&self) -> Vec<Column> {
        self.relators
            .iter()
            .map(|r| {
                let mut sums: BTreeMap<u32, i64> = BTreeMap::new();
                for &x in r {
                    *sums.entry(x.unsigned_abs() - 1).or_default() += x.signum() as i64;
                }
                sums.into_iter().filter(|e| e.1 != 0).collect()
            })
            .collect()
    }

    /// `dim_𝕂 H_1` of the presented group: generators minus the rank of the
    /// exponent matrix.
    pub fn abelian_rank(&self, field: FieldSpec) -> usize {
        self.generators.len() - column_rank(&self.exponent_columns(), self.generators.len(), field)
    }

    /// Invariant factors of the abelianization.
    pub fn abelianization(&self) -> Abelianization {
        let n = self.generators.len();
        let mut m: Vec<Vec<BigInt>> = self
            .exponent_columns()
            .iter()
            .map(|c| {
                let mut row = vec![BigInt::zero(); n];
                for &(g, x) in c {
                    row[g as usize] = BigInt::from(x);
                }
                row
            })
            .collect();
        let diag = smith_diagonal(&mut m, n);
        Abelianization {
            free_rank: n - diag.len(),
            torsion: diag.into_iter().filter(|d| *d > BigInt::from(1)).collect(),
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |w: &Word| {
            if w.is_empty() {
                return "1".to_string();
            }
            w.iter()
                .map(|&x| {
                    let g = &self.generators[x.unsigned_abs() as usize - 1];
                    if x > 0 { g.clone() } else { format!("{g}^-1") }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "< {} | {} >",
            self.generators.join(", "),
            self.relators.iter().map(word).collect::<Vec<_>>().join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abelianization {
    pub free_rank: usize,
    /// Invariant factors `d_1 | d_2 | …`, all `> 1`.
    pub torsion: Vec<BigInt>,
}

impl fmt::Display for Abelianization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Nonzero diagonal of the Smith normal form of `m` (rows × `ncols`).
fn smith_diagonal(m: &mut [Vec<BigInt>], ncols: usize) -> Vec<BigInt> {
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // Pivot: nonzero entry of least absolute value in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !m[i][j].is_zero() && pivot.map_or(true, |(a, b)| m[i][j].abs() < m[a][b].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut dirty = false;
        for i in t + 1..nrows {
            if !m[i][t].is_zero() {
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..ncols {
                    let x = &m[t][j] * &q;
                    m[i][j] -= x;
                }
                dirty |= !m[i][t].is_zero();
            }
        }
        for j in t + 1..ncols {
            if !m[t][j].is_zero() {
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let x = &row[t] * &q;
                    row[j] -= x;
                }
                dirty |= !m[t][j].is_zero();
            }
        }
        if dirty {
            continue;
        }
        // Divisibility: fold a row that the pivot does not divide into row t.
        if let Some(i) = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !(&m[i][j] % &m[t][t]).is_zero())) {
            for j in t..ncols {
                let x = m[i][j].clone();
                m[t][j] += x;
            }
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// Edge-path presentation: BFS spanning tree from the lowest vertex, one
/// generator per non-tree edge (in edge order), and one relator
/// `g_ab g_bc g_ac⁻¹` per triangle with tree edges deleted. Empty relators
/// are omitted.
pub fn edge_path_presentation(c: &SimplicialComplex) -> Result<GroupPresentation> {
    let b0 = c.b0();
    if b0 != 1 {
        return Err(Error::Disconnected(b0));
    }
    let faces = c.family().skeleton(3).into_levels();
    let edges: Vec<(VertexId, VertexId)> = faces
        .get(2)
        .map(|l| {
            l.iter()
                .map(|e| {
                    let v = e.to_vec();
                    (v[0], v[1])
                })
                .collect()
        })
        .unwrap_or_default();
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in &edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let root = c.vertices()[0];
    let mut tree: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut seen: HashSet<VertexId> = HashSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let mut nbrs = adj.get(&u).cloned().unwrap_or_default();
        nbrs.sort_unstable();
        for w in nbrs {
            if seen.insert(w) {
                tree.insert((u.min(w), u.max(w)));
                queue.push_back(w);
            }
        }
    }
    let mut generators = Vec::new();
    let mut letter: HashMap<(VertexId, VertexId), i32> = HashMap::new();
    for &e in &edges {
        if !tree.contains(&e) {
            generators.push(format!("{}-{}", c.label(e.0), c.label(e.1)));
            letter.insert(e, generators.len() as i32);
        }
    }
    let g = |a: VertexId, b: VertexId| letter.get(&(a, b)).copied();
    let relators = faces
        .get(3)
        .map(|l| {
            l.iter()
                .map(|t| {
                    let v = t.to_vec();
                    let (a, b, c) = (v[0], v[1], v[2]);
                    [g(a, b), g(b, c), g(a, c).map(|x| -x)].into_iter().flatten().collect::<Word>()
                })
                .filter(|w| !w.is_empty())
                .collect()
        })
        .unwrap_or_default();
    Ok(GroupPresentation { generators, relators })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TietzeOutcome {
    pub presentation: GroupPresentation,
    pub m_ub: usize,
    pub moves: usize,
    pub budget_exhausted: bool,
    /// `generators − rank` of the exponent matrix agrees before and after,
    /// over F_2, F_3 and F_5.
    pub abelian_invariants_preserved: bool,
}

/// Removes generator `x` (0-based) using relator `ri`, in which it occurs once.
fn eliminate(p: &mut GroupPresentation, ri: usize, x: usize) {
    let r = p.relators.remove(ri);
    let pos = r.iter().position(|&l| l.unsigned_abs() as usize == x + 1).unwrap();
    let sign = r[pos].signum();
    // r = u x^ε w  ⇒  x^ε = u⁻¹ w⁻¹, i.e. x = (w u)^{-ε}.
    let mut wu: Word = r[pos + 1..].to_vec();
    wu.extend_from_slice(&r[..pos]);
    let value = if sign > 0 { inverse(&wu) } else { wu };
    let value_inv = inverse(&value);
    let letter = (x + 1) as i32;
    for rel in &mut p.relators {
        let mut out = Vec::with_capacity(rel.len());
        for &l in rel.iter() {
            if l == letter {
                out.extend_from_slice(&value);
            } else if l == -letter {
                out.extend_from_slice(&value_inv);
            } else {
                out.push(l);
            }
        }
        *rel = out;
    }
    p.generators.remove(x);
    for rel in &mut p.relators {
        for l in rel.iter_mut() {
            if l.unsigned_abs() as usize > x + 1 {
                *l -= l.signum();
            }
        }
    }
}

fn find_elimination(p: &GroupPresentation) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..p.relators.len()).collect();
    order.sort_by_key(|&i| (p.relators[i].len(), i));
    for ri in order {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in &p.relators[ri] {
            *counts.entry(l.unsigned_abs() as usize - 1).or_default() += 1;
        }
        if let Some((&x, _)) = counts.iter().find(|(_, &k)| k == 1) {
            return Some((ri, x));
        }
    }
    None
}

/// Finds `p` (length `k > L/2`) from a rotation of `s^{±1}` = `p q` occurring
/// cyclically in `r`, and returns `r` with that occurrence replaced by `q⁻¹`.
fn shorten_with(s: &[i32], r: &[i32]) -> Option<Word> {
    let l = s.len();
    for v in [s.to_vec(), inverse(s)] {
        for rot in 0..l {
            let mut w = v[rot..].to_vec();
            w.extend_from_slice(&v[..rot]);
            for k in (l / 2 + 1..=l).rev() {
                if k > r.len() {
                    continue;
                }
                let (pre, rest) = w.split_at(k);
                for start in 0..r.len() {
                    if (0..k).all(|j| r[(start + j) % r.len()] == pre[j]) {
                        let mut out = inverse(rest);
                        out.extend((k..r.len()).map(|j| r[(start + j) % r.len()]));
                        return Some(out);
                    }
                }
            }
        }
    }
    None
}

fn find_shortening(p: &GroupPresentation) -> Option<(usize, Word)> {
    let mut order: Vec<usize> = (0..p.relators.len()).collect();
    order.sort_by_key(|&i| (p.relators[i].len(), i));
    for &si in &order {
        for ri in 0..p.relators.len() {
            if ri == si || p.relators[ri].len() < p.relators[si].len() {
                continue;
            }
            if let Some(w) = shorten_with(&p.relators[si], &p.relators[ri]) {
                if cyclic_reduce(&w).len() < p.relators[ri].len() {
                    return Some((ri, w));
                }
            }
        }
    }
    None
}

fn abelian_profile(p: &GroupPresentation) -> [usize; 3] {
    [2, 3, 5].map(|q| p.abelian_rank(FieldSpec::Prime(q)))
}

/// Deterministic Tietze simplification: normalize, eliminate a generator
/// occurring once in some relator (shortest relator, lowest generator first),
/// otherwise shorten a relator by a long piece of a shorter one. Stops at a
/// fixpoint or after `budget` moves.
pub fn tietze_simplify(g: &GroupPresentation, budget: usize) -> TietzeOutcome {
    let before = abelian_profile(g);
    let mut p = g.clone();
    let mut moves = 0;
    let mut exhausted = false;
    loop {
        p.normalize();
        let step = find_elimination(&p)
            .map(|(ri, x)| eliminate(&mut p, ri, x))
            .or_else(|| find_shortening(&p).map(|(ri, w)| p.relators[ri] = w));
        if step.is_none() {
            break;
        }
        moves += 1;
        if moves >= budget {
            p.normalize();
            exhausted = find_elimination(&p).is_some() || find_shortening(&p).is_some();
            break;
        }
    }
    let preserved = abelian_profile(&p) == before;
    TietzeOutcome {
        m_ub: p.generators.len(),
        presentation: p,
        moves,
        budget_exhausted: exhausted,
        abelian_invariants_preserved: preserved,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketStatus {
    Exact,
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MBracket {
    pub m_lb: usize,
    pub m_ub: usize,
    /// `dim H_1` per field.
    pub field_evidence: BTreeMap<String, usize>,
    pub status: BracketStatus,
    pub budget_exhausted: bool,
    pub abelianization: String,
    pub abelian_invariants_preserved: bool,
}

/// `m_lb` = largest `dim H_1` over ℚ and `F_p` for `p ∈ primes`; `m_ub` from
/// Tietze simplification of the edge-path presentation.
pub fn m_bracket(c: &SimplicialComplex, primes: &[u32], budget: usize) -> Result<MBracket> {
    let g = edge_path_presentation(c)?;
    let low = RelativePair::absolute(c.clone()).family().skeleton(3);
    let mut evidence = BTreeMap::new();
    let mut fields = vec![FieldSpec::Rational];
    for &p in primes {
        fields.push(FieldSpec::prime(p)?);
    }
    for f in fields {
        evidence.insert(f.to_string(), low.betti(f).reduced(1));
    }
    let m_lb = evidence.values().copied().max().unwrap_or(0);
    let t = tietze_simplify(&g, budget);
    Ok(MBracket {
        m_lb,
        m_ub: t.m_ub,
        field_evidence: evidence,
        status: if m_lb == t.m_ub { BracketStatus::Exact } else { BracketStatus::Bracket },
        budget_exhausted: t.budget_exhausted,
        abelianization: t.presentation.abelianization().to_string(),
        abelian_invariants_preserved: t.abelian_invariants_preserved,
    })
}
