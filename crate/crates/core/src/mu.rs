//! μ-numbers of relative complexes.
//!
//! Four routes to the same numbers: a single ordering (the defining sum), the
//! average over all orderings (enumeration oracle, small `n` only), the
//! link-sum of σ̃-numbers computed by Hochster subset sums, and a seeded
//! Monte Carlo mean. The subset sums and the per-ordering sums share no code
//! beyond the rank kernel: orderings go through complex links and induced
//! subcomplexes, subset sums through packed face masks.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::RelativePair;
use crate::error::{Error, Result};
use crate::face::{Face, VertexId};
use crate::family::{FaceFamily, MaskFamily};
use crate::homology::{BettiVector, FieldSpec};
use crate::num::{binomial_big, factorial, ser_rationals, Rational};
use crate::Budgets;

/// A linear ordering of all vertices of Δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    perm: Vec<VertexId>,
}

impl VertexOrdering {
    pub fn new(perm: Vec<VertexId>) -> Self {
        VertexOrdering { perm }
    }

    /// Ordering given by vertex labels of the pair.
    pub fn from_labels<S: AsRef<str>>(pair: &RelativePair, labels: &[S]) -> Result<Self> {
        let perm = labels
            .iter()
            .map(|l| {
                pair.table()
                    .id(l.as_ref())
                    .ok_or_else(|| Error::UnknownVertex(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VertexOrdering { perm })
    }

    /// Vertices in increasing id order.
    pub fn identity(pair: &RelativePair) -> Self {
        VertexOrdering {
            perm: pair.vertices(),
        }
    }

    /// The `index`-th ordering of the stream keyed by `seed`; independent of
    /// how many other orderings are drawn or in which order.
    pub fn seeded(pair: &RelativePair, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut perm = pair.vertices();
        perm.shuffle(&mut rng);
        VertexOrdering { perm }
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.perm
    }

    pub fn labels(&self, pair: &RelativePair) -> Vec<String> {
        self.perm.iter().map(|&v| pair.table().label(v).to_string()).collect()
    }

    fn check(&self, pair: &RelativePair) -> Result<()> {
        let mut sorted = self.perm.clone();
        sorted.sort_unstable();
        if sorted != pair.vertices() {
            return Err(Error::Ordering(format!(
                "ordering has {} entries but must list each of the {} vertices exactly once",
                self.perm.len(),
                pair.vertices().len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Provenance {
    Ordering { ordering: Vec<String> },
    ExactHochster,
    Enumerated { orderings: u64 },
    Sampled { samples: usize, seed: u64, stderr: Vec<f64> },
}

/// `mu[i] = μ_i` for `0 ≤ i ≤ dim`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuVector {
    #[serde(serialize_with = "ser_rationals")]
    pub mu: Vec<Rational>,
    pub field: FieldSpec,
    pub provenance: Provenance,
}

impl MuVector {
    pub fn get(&self, i: usize) -> Rational {
        self.mu.get(i).cloned().unwrap_or_else(crate::num::zero)
    }

    /// `μ_1 − μ_0 + 1`.
    pub fn mu1_minus_mu0_plus_1(&self) -> Rational {
        self.get(1) - self.get(0) + crate::num::one()
    }
}

/// `β_{i,j}` keyed by `(i, j)`; zero entries omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedBettiTable {
    pub n: usize,
    pub field: FieldSpec,
    #[serde(serialize_with = "ser_beta")]
    pub beta: BTreeMap<(usize, usize), u64>,
}

fn ser_beta<S: serde::Serializer>(b: &BTreeMap<(usize, usize), u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(b.len()))?;
    for (&(i, j), &v) in b {
        seq.serialize_element(&serde_json::json!({"i": i, "j": j, "value": v}))?;
    }
    seq.end()
}

impl GradedBettiTable {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.beta.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.beta.values().sum()
    }
}

/// `sigma[k] = σ̃_{k−1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaVector {
    pub n: usize,
    pub field: FieldSpec,
    #[serde(serialize_with = "ser_rationals")]
    pub sigma: Vec<Rational>,
}

impl SigmaVector {
    /// `σ̃_i` for `i ≥ −1`.
    pub fn get(&self, i: isize) -> Rational {
        if i < -1 {
            return crate::num::zero();
        }
        self.sigma.get((i + 1) as usize).cloned().unwrap_or_else(crate::num::zero)
    }
}

fn mu_len(pair: &RelativePair) -> usize {
    pair.dim().map_or(0, |d| (d + 1).max(0) as usize)
}

/// `b̃_{-1}, b̃_0, …` of `(lk(v, Δ_W), lk(v, Γ_W))`, via complex operations.
fn prefix_link_betti(pair: &RelativePair, v: VertexId, w: &Face, field: FieldSpec) -> Vec<usize> {
    let b = pair.vertex_link(v).induced(w).family().reduced_betti(field);
    #[cfg(debug_assertions)]
    {
        // Degrees −1 and 0 do not depend on the field.
        let low = pair.vertex_link(v).induced(w).family().skeleton(2);
        let a = low.reduced_betti(FieldSpec::Prime(2));
        let q = low.reduced_betti(FieldSpec::Rational);
        debug_assert_eq!(a.iter().take(2).collect::<Vec<_>>(), q.iter().take(2).collect::<Vec<_>>());
    }
    b
}

fn ordering_counts(pair: &RelativePair, ord: &VertexOrdering, field: FieldSpec) -> Vec<u64> {
    let len = mu_len(pair);
    let mut mu = vec![0u64; len];
    let mut prefix = Face::empty();
    for &v in ord.as_slice() {
        prefix.insert(v);
        let b = prefix_link_betti(pair, v, &prefix, field);
        for (i, m) in mu.iter_mut().enumerate() {
            *m += b.get(i).copied().unwrap_or(0) as u64;
        }
    }
    mu
}

/// μ^ς: `μ_i = Σ_k b̃_{i−1}(lk(v_k, Δ_{v_1..v_k}), lk(v_k, Γ_{v_1..v_k}))`.
pub fn mu_ordering(pair: &RelativePair, ord: &VertexOrdering, field: FieldSpec) -> Result<MuVector> {
    ord.check(pair)?;
    let mu = ordering_counts(pair, ord, field)
        .into_iter()
        .map(|x| BigRational::from_integer(BigInt::from(x)))
        .collect();
    Ok(MuVector {
        mu,
        field,
        provenance: Provenance::Ordering {
            ordering: ord.labels(pair),
        },
    })
}

/// `sums[k][i] = Σ_{|W|=k} b̃_{i−1}` over the induced sub-families on subsets
/// of `mf.base`.
fn hochster_sums(mf: &MaskFamily, field: FieldSpec) -> Vec<Vec<u64>> {
    let n = mf.base.len();
    let width = mf.levels.len().max(1);
    let zero = || vec![vec![0u64; width]; n + 1];
    let add = |mut a: Vec<Vec<u64>>, b: Vec<Vec<u64>>| {
        for (ra, rb) in a.iter_mut().zip(b) {
            for (x, y) in ra.iter_mut().zip(rb) {
                *x += y;
            }
        }
        a
    };
    (0u64..1u64 << n)
        .into_par_iter()
        .fold(zero, |mut acc, w| {
            let b = mf.restricted_betti(w, field);
            let k = w.count_ones() as usize;
            for (i, x) in b.into_iter().enumerate() {
                acc[k][i] += x as u64;
            }
            acc
        })
        .reduce(zero, add)
}

pub(crate) fn check_subset_budget(n: usize, budgets: &Budgets) -> Result<()> {
    let limit = budgets.subsets.min(63);
    if n > limit {
        return Err(Error::Budget {
            what: "subset",
            limit,
            actual: n,
        });
    }
    Ok(())
}

/// `σ̃_{i−1} = (1/(n+1)) Σ_k sums[k][i] / C(n,k)`, entries `0..len`.
pub(crate) fn sigma_from_sums(sums: &[Vec<u64>], n: usize, len: usize) -> Vec<Rational> {
    (0..len)
        .map(|i| {
            let mut acc = crate::num::zero();
            for (k, row) in sums.iter().enumerate() {
                let x = row.get(i).copied().unwrap_or(0);
                if x != 0 {
                    acc += BigRational::new(BigInt::from(x), binomial_big(n, k));
                }
            }
            acc / BigRational::from_integer(BigInt::from(n + 1))
        })
        .collect()
}

fn pair_masks(pair: &RelativePair, budgets: &Budgets) -> Result<(MaskFamily, usize)> {
    let verts = pair.vertices();
    check_subset_budget(verts.len(), budgets)?;
    let n = verts.len();
    Ok((MaskFamily::new(&pair.family(), verts), n))
}

/// `β_{k−i,k} = Σ_{|W|=k} b̃_{i−1}(Δ_W, Γ_W)` over all `W ⊆ V`.
pub fn graded_betti(pair: &RelativePair, field: FieldSpec, budgets: &Budgets) -> Result<GradedBettiTable> {
    let (mf, n) = pair_masks(pair, budgets)?;
    let sums = hochster_sums(&mf, field);
    let mut beta = BTreeMap::new();
    for (k, row) in sums.iter().enumerate() {
        for (i, &x) in row.iter().enumerate() {
            if x != 0 {
                beta.insert((k - i, k), x);
            }
        }
    }
    Ok(GradedBettiTable { n, field, beta })
}

/// σ̃-numbers `σ̃_{−1} … σ̃_{dim}` of the pair.
pub fn sigma_tilde(pair: &RelativePair, field: FieldSpec, budgets: &Budgets) -> Result<SigmaVector> {
    let (mf, n) = pair_masks(pair, budgets)?;
    let len = pair.dim().map_or(1, |d| (d + 2) as usize);
    let sums = hochster_sums(&mf, field);
    Ok(SigmaVector {
        n,
        field,
        sigma: sigma_from_sums(&sums, n, len),
    })
}

/// σ̃ of a family on its own support. Vertices of Δ lying in no face of the
/// family do not change σ̃ (the binomial weights of `W` and `W ∪ {u}` add up
/// to the weight of `W` one level down), so the support is enough.
pub(crate) fn family_sigma(fam: &FaceFamily, len: usize, field: FieldSpec, budgets: &Budgets) -> Result<Vec<Rational>> {
    let base = fam.support().to_vec();
    check_subset_budget(base.len(), budgets)?;
    let n = base.len();
    let mf = MaskFamily::new(fam, base);
    Ok(sigma_from_sums(&hochster_sums(&mf, field), n, len))
}

/// Exact μ as the link-sum `μ_i = Σ_v σ̃_{i−1}(lk(v,Δ), lk(v,Γ))`. The subset
/// budget applies to each link's vertex count.
pub fn mu_exact(pair: &RelativePair, field: FieldSpec, budgets: &Budgets) -> Result<MuVector> {
    let len = mu_len(pair);
    let fam = pair.family();
    let per_vertex: Vec<Vec<Rational>> = pair
        .vertices()
        .into_par_iter()
        .map(|v| family_sigma(&fam.vertex_link(v), len, field, budgets))
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

/// Exact average of μ^ς over all `n!` orderings.
pub fn mu_enumerated(pair: &RelativePair, field: FieldSpec, budgets: &Budgets) -> Result<MuVector> {
    let verts = pair.vertices();
    let n = verts.len();
    if n > budgets.enumerate {
        return Err(Error::Budget {
            what: "enumeration",
            limit: budgets.enumerate,
            actual: n,
        });
    }
    let len = mu_len(pair);
    let mut memo: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    let mut totals = vec![0u64; len];
    let mut count = 0u64;
    for perm in (0..n).permutations(n) {
        let mut before = 0u64;
        for &idx in &perm {
            let now = before | 1 << idx;
            let b = memo.entry((idx, before)).or_insert_with(|| {
                prefix_link_betti(pair, verts[idx], &Face::from_mask(now, &verts), field)
            });
            for (t, x) in totals.iter_mut().zip(b.iter()) {
                *t += *x as u64;
            }
            before = now;
        }
        count += 1;
    }
    let denom = factorial(n);
    debug_assert_eq!(BigInt::from(count), denom);
    Ok(MuVector {
        mu: totals
            .into_iter()
            .map(|t| BigRational::new(BigInt::from(t), denom.clone()))
            .collect(),
        field,
        provenance: Provenance::Enumerated { orderings: count },
    })
}

/// Mean of μ^ς over `samples` seeded orderings; the exact mean is returned
/// and the standard error of each entry is recorded in the provenance.
pub fn mu_sampled(pair: &RelativePair, field: FieldSpec, samples: usize, seed: u64) -> Result<MuVector> {
    if samples == 0 {
        return Err(Error::Malformed("sample count must be at least 1".into()));
    }
    let len = mu_len(pair);
    let draws: Vec<Vec<u64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| ordering_counts(pair, &VertexOrdering::seeded(pair, seed, i), field))
        .collect();
    let mut mu = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    for i in 0..len {
        let sum: u64 = draws.iter().map(|d| d[i]).sum();
        let mean = sum as f64 / samples as f64;
        let var = if samples > 1 {
            draws.iter().map(|d| (d[i] as f64 - mean).powi(2)).sum::<f64>() / (samples - 1) as f64
        } else {
            0.0
        };
        mu.push(BigRational::new(BigInt::from(sum), BigInt::from(samples)));
        stderr.push((var / samples as f64).sqrt());
    }
    Ok(MuVector {
        mu,
        field,
        provenance: Provenance::Sampled { samples, seed, stderr },
    })
}

/// Morse defects `Σ_{j≤i} (−1)^{i−j} (μ_j − b_j)` from unreduced Betti numbers.
pub fn morse_defects_from(mu: &[Rational], betti: &BettiVector) -> Vec<Rational> {
    let mut out = Vec::with_capacity(mu.len());
    let mut acc = crate::num::zero();
    for (i, m) in mu.iter().enumerate() {
        acc = -acc + m - BigRational::from_integer(BigInt::from(betti.unreduced(i as isize)));
        out.push(acc.clone());
    }
    out
}

pub fn morse_defect(pair: &RelativePair, mu: &MuVector, field: FieldSpec) -> Result<Vec<Rational>> {
    if mu.field != field {
        return Err(Error::Field(format!("μ-vector computed over {} but defects requested over {}", mu.field, field)));
    }
    Ok(morse_defects_from(&mu.mu, &pair.family().betti(field)))
}
