//! Reduced and relative simplicial homology over prime fields and ℚ.
//!
//! Ranks come from exact column reduction in lexicographic face order. Over
//! `F_p` the arithmetic is modular; over ℚ columns are combined fraction-free
//! (`b·c − a·p`, then divided by their content), first in checked `i64` and,
//! should that overflow, again in `BigInt`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::RelativePair;
use crate::error::{Error, Result};
use crate::face::Face;
use crate::Budgets;

/// Coefficient field: ℚ or `F_p` for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rational,
    Prime(u32),
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::Field(format!("{p} is not below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::Field(format!("{p} is not prime")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            FieldSpec::Rational => 0,
            FieldSpec::Prime(p) => p,
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "p:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rational);
        }
        let digits = s
            .strip_prefix("p:")
            .or_else(|| s.strip_prefix("F"))
            .unwrap_or(s);
        let p: u32 = digits
            .parse()
            .map_err(|_| Error::Field(format!("expected `q` or `p:<prime>`, got `{s}`")))?;
        FieldSpec::prime(p)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sparse column: `(row, coefficient)` pairs sorted by row.
pub type Column = Vec<(u32, i64)>;

/// Rank of the matrix with the given columns over `field`.
pub fn column_rank(cols: &[Column], nrows: usize, field: FieldSpec) -> usize {
    match field {
        FieldSpec::Prime(p) => rank_mod_p(cols, nrows, p as u64),
        FieldSpec::Rational => rank_integer::<i64>(cols, nrows)
            .or_else(|| rank_integer::<BigInt>(cols, nrows))
            .expect("BigInt elimination cannot overflow"),
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a ≠ 0.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn rank_mod_p(cols: &[Column], nrows: usize, p: u64) -> usize {
    let mut pivot_at: Vec<Option<u32>> = vec![None; nrows];
    let mut pivots: Vec<Vec<(u32, u64)>> = Vec::new();
    let mut scratch = Vec::new();
    for col in cols {
        let mut c: Vec<(u32, u64)> = col
            .iter()
            .map(|&(r, v)| (r, v.rem_euclid(p as i64) as u64))
            .filter(|&(_, v)| v != 0)
            .collect();
        while let Some(&(low, val)) = c.last() {
            match pivot_at[low as usize] {
                None => {
                    let inv = inv_mod(val, p);
                    for e in c.iter_mut() {
                        e.1 = e.1 * inv % p;
                    }
                    pivot_at[low as usize] = Some(pivots.len() as u32);
                    pivots.push(c);
                    break;
                }
                Some(j) => {
                    // c ← c − val·pivot, pivot normalized to low entry 1.
                    let piv = &pivots[j as usize];
                    scratch.clear();
                    let (mut i, mut k) = (0, 0);
                    while i < c.len() || k < piv.len() {
                        let take_c = k >= piv.len() || (i < c.len() && c[i].0 < piv[k].0);
                        let take_p = i >= c.len() || (k < piv.len() && piv[k].0 < c[i].0);
                        if take_c {
                            scratch.push(c[i]);
                            i += 1;
                        } else if take_p {
                            scratch.push((piv[k].0, (p - val * piv[k].1 % p) % p));
                            k += 1;
                        } else {
                            let v = (c[i].1 + p - val * piv[k].1 % p) % p;
                            if v != 0 {
                                scratch.push((c[i].0, v));
                            }
                            i += 1;
                            k += 1;
                        }
                    }
                    std::mem::swap(&mut c, &mut scratch);
                }
            }
        }
    }
    pivots.len()
}

trait IntCoeff: Clone + Integer + Signed + CheckedMul + CheckedSub + From<i64> {}
impl<T: Clone + Integer + Signed + CheckedMul + CheckedSub + From<i64>> IntCoeff for T {}

/// Fraction-free elimination over ℤ ⊂ ℚ. `None` on overflow.
fn rank_integer<T: IntCoeff>(cols: &[Column], nrows: usize) -> Option<usize> {
    let mut pivot_at: Vec<Option<u32>> = vec![None; nrows];
    let mut pivots: Vec<Vec<(u32, T)>> = Vec::new();
    for col in cols {
        let mut c: Vec<(u32, T)> = col
            .iter()
            .filter(|&&(_, v)| v != 0)
            .map(|&(r, v)| (r, T::from(v)))
            .collect();
        while let Some((low, a)) = c.last().cloned() {
            match pivot_at[low as usize] {
                None => {
                    normalize(&mut c);
                    pivot_at[low as usize] = Some(pivots.len() as u32);
                    pivots.push(c);
                    break;
                }
                Some(j) => {
                    let piv = &pivots[j as usize];
                    let b = piv.last().expect("pivot columns are nonzero").1.clone();
                    let mut next = Vec::with_capacity(c.len() + piv.len());
                    let (mut i, mut k) = (0, 0);
                    while i < c.len() || k < piv.len() {
                        let take_c = k >= piv.len() || (i < c.len() && c[i].0 < piv[k].0);
                        let take_p = i >= c.len() || (k < piv.len() && piv[k].0 < c[i].0);
                        if take_c {
                            next.push((c[i].0, b.checked_mul(&c[i].1)?));
                            i += 1;
                        } else if take_p {
                            next.push((piv[k].0, T::zero().checked_sub(&a.checked_mul(&piv[k].1)?)?));
                            k += 1;
                        } else {
                            let v = b.checked_mul(&c[i].1)?.checked_sub(&a.checked_mul(&piv[k].1)?)?;
                            if !v.is_zero() {
                                next.push((c[i].0, v));
                            }
                            i += 1;
                            k += 1;
                        }
                    }
                    normalize(&mut next);
                    c = next;
                }
            }
        }
    }
    Some(pivots.len())
}

fn normalize<T: IntCoeff>(c: &mut [(u32, T)]) {
    let mut g = T::zero();
    for (_, v) in c.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() {
        for e in c.iter_mut() {
            e.1 = e.1.clone() / g.clone();
        }
    }
}

/// Boundary columns from `upper` (faces with `k` vertices) into `lower`
/// (faces with `k − 1` vertices, sorted). Subfaces absent from `lower` are
/// treated as lying in the relative subcomplex and dropped.
pub(crate) fn boundary_columns(upper: &[Face], lower: &[Face]) -> Vec<Column> {
    upper
        .iter()
        .map(|f| {
            let mut col: Column = f
                .boundary()
                .enumerate()
                .filter_map(|(i, g)| {
                    lower
                        .binary_search(&g)
                        .ok()
                        .map(|r| (r as u32, if i % 2 == 0 { 1 } else { -1 }))
                })
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect()
}

/// Ranks of `∂_k : C_{k−1} → C_{k−2}` for each level `k ≥ 1`, where
/// `levels[k]` holds the sorted faces with `k` vertices. Entry 0 is 0.
pub(crate) fn level_ranks(levels: &[Vec<Face>], field: FieldSpec) -> Vec<usize> {
    let mut ranks = vec![0; levels.len() + 1];
    for k in 1..levels.len() {
        if levels[k].is_empty() || levels[k - 1].is_empty() {
            continue;
        }
        let cols = boundary_columns(&levels[k], &levels[k - 1]);
        ranks[k] = column_rank(&cols, levels[k - 1].len(), field);
    }
    ranks
}

/// Reduced Betti numbers from graded face levels; entry `k` is `b̃_{k−1}`.
/// Reduced Betti numbers of a family given as vertex bitmasks; `levels[k]`
/// holds the masks of popcount `k`, sorted numerically. Entry `k` is `b̃_{k−1}`.
pub(crate) fn reduced_betti_masks(levels: &[Vec<u64>], field: FieldSpec) -> Vec<usize> {
    let mut ranks = vec![0; levels.len() + 1];
    for k in 1..levels.len() {
        let (upper, lower) = (&levels[k], &levels[k - 1]);
        if upper.is_empty() || lower.is_empty() {
            continue;
        }
        let cols: Vec<Column> = upper
            .iter()
            .map(|&m| {
                let mut col = Column::with_capacity(k);
                let mut rest = m;
                let mut i = 0;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    if let Ok(r) = lower.binary_search(&(m & !bit)) {
                        col.push((r as u32, if i % 2 == 0 { 1 } else { -1 }));
                    }
                    rest &= rest - 1;
                    i += 1;
                }
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();
        ranks[k] = column_rank(&cols, lower.len(), field);
    }
    (0..levels.len())
        .map(|k| levels[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

pub(crate) fn reduced_betti_levels(levels: &[Vec<Face>], field: FieldSpec) -> Vec<usize> {
    let ranks = level_ranks(levels, field);
    (0..levels.len())
        .map(|k| levels[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

/// Augmented chain complex of a relative pair.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub field: FieldSpec,
    /// `bases[k]`: chain basis in dimension `k − 1`, lexicographically sorted.
    pub bases: Vec<Vec<Face>>,
    /// `boundaries[k]`: columns of `∂` on `bases[k]`, rows indexing `bases[k − 1]`.
    /// `boundaries[0]` is empty.
    pub boundaries: Vec<Vec<Column>>,
}

impl ChainComplex {
    pub fn from_levels(levels: Vec<Vec<Face>>, field: FieldSpec) -> Result<Self> {
        let boundaries = (0..levels.len())
            .map(|k| {
                if k == 0 {
                    Vec::new()
                } else {
                    boundary_columns(&levels[k], &levels[k - 1])
                }
            })
            .collect();
        let cc = ChainComplex {
            field,
            bases: levels,
            boundaries,
        };
        if !cc.boundary_squares_to_zero() {
            return Err(Error::Malformed(
                "boundary of boundary is nonzero; face set is not a relative complex".into(),
            ));
        }
        Ok(cc)
    }

    /// Dimension of the chain group in degree `i` (`i ≥ −1`).
    pub fn rank_of_chain_group(&self, i: isize) -> usize {
        self.bases.get((i + 1) as usize).map_or(0, Vec::len)
    }

    pub fn boundary_squares_to_zero(&self) -> bool {
        for k in 2..self.bases.len() {
            for col in &self.boundaries[k] {
                let mut acc: HashMap<u32, i64> = HashMap::new();
                for &(r, v) in col {
                    for &(r2, v2) in &self.boundaries[k - 1][r as usize] {
                        *acc.entry(r2).or_insert(0) += v * v2;
                    }
                }
                let p = self.field.characteristic() as i64;
                let nonzero = acc.values().any(|&x| if p == 0 { x != 0 } else { x % p != 0 });
                if nonzero {
                    return false;
                }
            }
        }
        true
    }

    /// `ranks()[k]` is the rank of `∂` leaving degree `k − 1`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.bases.len() + 1];
        for k in 1..self.bases.len() {
            if !self.bases[k - 1].is_empty() {
                ranks[k] = column_rank(&self.boundaries[k], self.bases[k - 1].len(), self.field);
            }
        }
        ranks
    }

    pub fn betti(&self) -> BettiVector {
        let ranks = self.ranks();
        let reduced: Vec<usize> = (0..self.bases.len())
            .map(|k| self.bases[k].len() - ranks[k] - ranks[k + 1])
            .collect();
        BettiVector::from_reduced(reduced, ranks.get(1).copied().unwrap_or(0), self.field)
    }
}

/// Reduced and unreduced Betti numbers of a pair over one field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub field: FieldSpec,
    /// `reduced[k] = b̃_{k−1}`, starting at degree −1.
    pub reduced: Vec<usize>,
    /// `unreduced[j] = b_j`, starting at degree 0.
    pub unreduced: Vec<usize>,
}

impl BettiVector {
    /// `augmentation_rank` is the rank of `∂ : C_0 → C_{−1}`.
    pub(crate) fn from_reduced(reduced: Vec<usize>, augmentation_rank: usize, field: FieldSpec) -> Self {
        let mut unreduced: Vec<usize> = reduced.iter().skip(1).copied().collect();
        if let Some(b0) = unreduced.first_mut() {
            *b0 += augmentation_rank;
        }
        BettiVector {
            field,
            reduced,
            unreduced,
        }
    }

    /// `b̃_i` for `i ≥ −1`; zero outside the computed range.
    pub fn reduced(&self, i: isize) -> usize {
        if i < -1 {
            return 0;
        }
        self.reduced.get((i + 1) as usize).copied().unwrap_or(0)
    }

    /// `b_i` for `i ≥ 0`; zero outside the computed range.
    pub fn unreduced(&self, i: isize) -> usize {
        if i < 0 {
            return 0;
        }
        self.unreduced.get(i as usize).copied().unwrap_or(0)
    }

    /// `Σ (−1)^i b̃_i` over `i ≥ −1`.
    pub fn reduced_euler(&self) -> i64 {
        self.reduced
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 1 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

/// Augmented chain complex of `pair`, checked for `∂∂ = 0`.
pub fn boundary_matrices(pair: &RelativePair, field: FieldSpec, budgets: &Budgets) -> Result<ChainComplex> {
    let family = pair.family();
    if family.len() > budgets.faces {
        return Err(Error::Budget {
            what: "face",
            limit: budgets.faces,
            actual: family.len(),
        });
    }
    ChainComplex::from_levels(family.into_levels(), field)
}

/// Reduced (and unreduced) Betti numbers of `pair` over `field`.
pub fn reduced_betti(pair: &RelativePair, field: FieldSpec, budgets: &Budgets) -> Result<BettiVector> {
    let family = pair.family();
    if family.len() > budgets.faces {
        return Err(Error::Budget {
            what: "face",
            limit: budgets.faces,
            actual: family.len(),
        });
    }
    Ok(family.betti(field))
}
