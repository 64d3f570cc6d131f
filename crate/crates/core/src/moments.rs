//! Exact first moments `E[F_τ(T_n^S)]` through the one-step recurrence
//!
//! `E[F_τ(T_{n+1}) | T_n] = (1 + w/W_n) F_τ(T_n) + (1/W_n) Σ_σ c(σ,τ) F_σ(T_n)`
//!
//! with `W_n = (1+α)n - 2`, swept forward from the seed over the closure of
//! `τ` under its reduction children.

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::alpha::AlphaParam;
use crate::error::{Error, Result};
use crate::observables::count_F;
use crate::trees::{CanonicalCode, DecoratedTree, Tree};

pub fn weight(tau: &DecoratedTree) -> u64 {
    tau.weight()
}

/// The strict order on decorated trees: `σ ≺ τ` when `w(σ) < w(τ)` and
/// `|σ| ≤ |τ|`, or the weights agree and `|σ| < |τ|`, or weights and sizes
/// agree and `|ℓ_σ| < |ℓ_τ|`.
pub fn precedes(sigma: &DecoratedTree, tau: &DecoratedTree) -> bool {
    let (ws, wt) = (sigma.weight(), tau.weight());
    let (ss, st) = (sigma.size(), tau.size());
    (ws < wt && ss <= st)
        || (ws == wt && ss < st)
        || (ws == wt && ss == st && sigma.total_ell() < tau.total_ell())
}

/// A child `σ` of `τ` in the recurrence with its coefficient `c(σ, τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub child: DecoratedTree,
    pub coefficient: BigRational,
}

fn rational(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Children of `τ` in the recurrence, merged over isomorphic children and
/// sorted by canonical code:
///
/// - `τ^{u-}` with `ℓ(u)(ℓ(u) + α - 1)` for every `u` with `ℓ(u) ≥ 1`;
/// - `τ ∖ v` with `deg_τ(u) + ℓ(u) + α - 2` for every loose leaf `v` with
///   neighbor `u`;
/// - `(τ ∖ v)^{u-}` with `ℓ(u)(ℓ(u) + α - 1)` for such `v` when `ℓ(u) ≥ 1`.
pub fn reduction_children(tau: &DecoratedTree, alpha: AlphaParam) -> Result<Vec<Reduction>> {
    if tau.is_base() {
        return Err(Error::invalid("base trees have no reduction children"));
    }
    let a = alpha.to_rational();
    let lower = |l: u32| rational(l as i64) * (rational(l as i64) + &a - BigRational::one());
    let mut merged: BTreeMap<CanonicalCode, Reduction> = BTreeMap::new();
    let mut emit = |child: DecoratedTree, coefficient: BigRational| {
        if coefficient.is_zero() {
            return;
        }
        match merged.entry(child.canonical_code()) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().coefficient += coefficient
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(Reduction { child, coefficient });
            }
        }
    };
    let ell = tau.ell();
    for u in 0..tau.size() {
        if ell[u] >= 1 {
            emit(tau.decremented(u), lower(ell[u]));
        }
    }
    for v in tau.loose_leaves() {
        let u = tau.tree().neighbors(v)[0];
        let removed = tau.without_leaf(v);
        let coefficient =
            rational(tau.tree().degree(u) as i64 + ell[u] as i64 - 2) + &a;
        emit(removed.clone(), coefficient);
        if ell[u] >= 1 {
            let u_after = if u > v { u - 1 } else { u };
            emit(removed.decremented(u_after), lower(ell[u]));
        }
    }
    Ok(merged.into_values().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Base {
    Vertex,
    DecoratedVertex,
    Edge,
}

impl Base {
    fn of(tau: &DecoratedTree) -> Option<Base> {
        if !tau.is_base() {
            return None;
        }
        Some(match (tau.size(), tau.ell()[0]) {
            (1, 0) => Base::Vertex,
            (1, _) => Base::DecoratedVertex,
            _ => Base::Edge,
        })
    }

    /// Deterministic value on any tree with `n` vertices.
    fn value(self, n: u64) -> BigInt {
        let n = BigInt::from(n);
        match self {
            Base::Vertex => n,
            Base::DecoratedVertex => n - 2,
            Base::Edge => 2 * n - 2,
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    tree: DecoratedTree,
    weight: u64,
    base: Option<Base>,
    /// `(child index, q·c)` with `q` the denominator of `α`.
    children: Vec<(usize, BigInt)>,
}

/// The closure of `τ` under [`reduction_children`], topologically sorted so
/// that every child precedes its parents.
#[derive(Debug, Clone)]
pub struct RecurrenceSystem {
    alpha: AlphaParam,
    nodes: Vec<Node>,
    target: usize,
}

/// An exact fraction kept unreduced; large-`n` sweeps produce numerators
/// with millions of bits where reduction is not worth its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue {
    pub numer: BigInt,
    pub denom: BigInt,
}

impl ExactValue {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numer.clone(), self.denom.clone())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.numer, &self.denom)
    }

    /// Difference of two values; cheap when denominators agree.
    pub fn minus(&self, other: &ExactValue) -> ExactValue {
        if self.denom == other.denom {
            ExactValue {
                numer: &self.numer - &other.numer,
                denom: self.denom.clone(),
            }
        } else {
            ExactValue {
                numer: &self.numer * &other.denom - &other.numer * &self.denom,
                denom: &self.denom * &other.denom,
            }
        }
    }
}

/// `num / den` as a float without overflowing on huge operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let sign = if (num.sign() == Sign::Minus) ^ (den.sign() == Sign::Minus) {
        -1.0
    } else {
        1.0
    };
    let (n, d) = (num.abs(), den.abs());
    let keep = 64u64;
    let sn = n.bits().saturating_sub(keep);
    let sd = d.bits().saturating_sub(keep);
    let top = (&n >> sn).to_f64().unwrap();
    let bottom = (&d >> sd).to_f64().unwrap();
    let exp = sn as i64 - sd as i64;
    sign * top / bottom * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

impl RecurrenceSystem {
    pub fn new(tau: &DecoratedTree, alpha: AlphaParam) -> Result<Self> {
        let q = BigInt::from(alpha.denom());
        let mut index: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
        let mut trees = vec![tau.clone()];
        index.insert(tau.canonical_code(), 0);
        let mut edges: Vec<Vec<(CanonicalCode, BigRational)>> = Vec::new();
        let mut i = 0;
        while i < trees.len() {
            let t = trees[i].clone();
            let mut out = Vec::new();
            if !t.is_base() {
                for r in reduction_children(&t, alpha)? {
                    if !precedes(&r.child, &t) {
                        return Err(Error::precondition("reduction child does not precede its parent"));
                    }
                    let code = r.child.canonical_code();
                    if !index.contains_key(&code) {
                        index.insert(code.clone(), trees.len());
                        trees.push(r.child.clone());
                    }
                    out.push((code, r.coefficient));
                }
            }
            edges.push(out);
            i += 1;
        }
        let mut order: Vec<usize> = (0..trees.len()).collect();
        order.sort_by_key(|&i| {
            let t = &trees[i];
            (t.weight(), t.size(), t.total_ell(), t.canonical_code())
        });
        let mut position = vec![0; trees.len()];
        for (p, &i) in order.iter().enumerate() {
            position[i] = p;
        }
        let nodes = order
            .iter()
            .map(|&i| {
                let t = &trees[i];
                let children = edges[i]
                    .iter()
                    .map(|(code, c)| {
                        let scaled = c * BigRational::from_integer(q.clone());
                        assert!(scaled.is_integer());
                        (position[index[code]], scaled.to_integer())
                    })
                    .collect();
                Node {
                    tree: t.clone(),
                    weight: t.weight(),
                    base: Base::of(t),
                    children,
                }
            })
            .collect();
        Ok(RecurrenceSystem {
            alpha,
            nodes,
            target: position[0],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Trees of the closure in evaluation order.
    pub fn trees(&self) -> impl Iterator<Item = &DecoratedTree> {
        self.nodes.iter().map(|n| &n.tree)
    }

    /// `E[F_τ(T_n^S)]` for every `n` in `n_list` (any order), in one sweep.
    pub fn sweep(&self, seed: &Tree, n_list: &[usize]) -> Result<Vec<ExactValue>> {
        let k = seed.vertex_count();
        if k < 2 {
            return Err(Error::invalid("seed trees need at least two vertices"));
        }
        if let Some(&bad) = n_list.iter().find(|&&n| n < k) {
            return Err(Error::invalid(format!("n = {bad} is smaller than the seed ({k})")));
        }
        let n_max = n_list.iter().copied().max().unwrap_or(k);
        let p = self.alpha.numer();
        let q = self.alpha.denom();
        let mut wanted: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &n) in n_list.iter().enumerate() {
            wanted.entry(n).or_default().push(i);
        }
        let mut out = vec![None; n_list.len()];
        let mut denom = BigInt::one();
        let mut numer: Vec<BigInt> = self
            .nodes
            .iter()
            .map(|node| BigInt::from_biguint(Sign::Plus, count_F(&node.tree, seed)))
            .collect();
        let mut m = k;
        loop {
            if let Some(slots) = wanted.get(&m) {
                for &s in slots {
                    out[s] = Some(ExactValue {
                        numer: numer[self.target].clone(),
                        denom: denom.clone(),
                    });
                }
            }
            if m == n_max {
                break;
            }
            let b = (p + q) * m as u64 - 2 * q;
            let mut next = Vec::with_capacity(numer.len());
            denom *= b;
            for node in &self.nodes {
                let value = match node.base {
                    Some(base) => base.value(m as u64 + 1) * &denom,
                    None => {
                        let mut v = &numer[next.len()] * (b + q * node.weight);
                        for (j, c) in &node.children {
                            v += c * &numer[*j];
                        }
                        v
                    }
                };
                next.push(value);
            }
            numer = next;
            m += 1;
        }
        Ok(out.into_iter().map(|v| v.expect("every n visited")).collect())
    }
}

/// `E[F_τ(T_n^S)]` as a reduced fraction.
pub fn exact_expectation(
    tau: &DecoratedTree,
    seed: &Tree,
    alpha: AlphaParam,
    n: usize,
) -> Result<BigRational> {
    let system = RecurrenceSystem::new(tau, alpha)?;
    Ok(system.sweep(seed, &[n])?.remove(0).to_rational())
}

/// `E[F_τ(T_n^S)]` for several `n`, unreduced.
pub fn exact_expectations(
    tau: &DecoratedTree,
    seed: &Tree,
    alpha: AlphaParam,
    n_list: &[usize],
) -> Result<Vec<ExactValue>> {
    RecurrenceSystem::new(tau, alpha)?.sweep(seed, n_list)
}

/// `ω_n = Π_{m=k}^{n-1} (1 + w/((1+α)m - 2))^{-1}`, with `ω_k = 1`.
pub fn omega_normalizer(w: &BigRational, k: usize, n: usize, alpha: AlphaParam) -> Result<BigRational> {
    if n < k {
        return Err(Error::invalid("n must be at least k"));
    }
    let mut acc = BigRational::one();
    for m in k..n {
        let total = alpha.total_weight(m as u64);
        acc = acc * &total / (&total + w);
    }
    Ok(acc)
}

/// Float version of [`omega_normalizer`], accumulated in log space.
pub fn omega_normalizer_f64(w: f64, k: usize, n: usize, alpha: f64) -> f64 {
    let mut log = 0.0;
    for m in k..n {
        let total = (1.0 + alpha) * m as f64 - 2.0;
        log -= (w / total).ln_1p();
    }
    log.exp()
}

/// Growth exponents of `E[F_τ(T_n)] ≍ n^{power} (log n)^{log_power}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    #[serde(serialize_with = "serialize_rational")]
    pub power: BigRational,
    pub log_power: u32,
    pub critical: bool,
}

fn serialize_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn gamma_exponent(tau: &DecoratedTree, alpha: AlphaParam) -> Result<ExponentReport> {
    let threshold = BigRational::one() + alpha.to_rational();
    let w = BigRational::from_integer(BigInt::from(tau.weight()));
    let ratio = w.clone() / &threshold;
    let power = if ratio > BigRational::one() { ratio } else { BigRational::one() };
    let mut memo = BTreeMap::new();
    let log_power = gamma(tau, alpha, &threshold, &mut memo)?;
    Ok(ExponentReport {
        power,
        log_power,
        critical: w == threshold,
    })
}

fn gamma(
    tau: &DecoratedTree,
    alpha: AlphaParam,
    threshold: &BigRational,
    memo: &mut BTreeMap<CanonicalCode, u32>,
) -> Result<u32> {
    let code = tau.canonical_code();
    if let Some(&g) = memo.get(&code) {
        return Ok(g);
    }
    let w = BigRational::from_integer(BigInt::from(tau.weight()));
    let g = if &w < threshold {
        0
    } else {
        let mut sup = 0;
        if !tau.is_base() {
            for r in reduction_children(tau, alpha)? {
                if r.coefficient.is_positive() && r.child.weight() == tau.weight() {
                    sup = sup.max(gamma(&r.child, alpha, threshold, memo)? + 1);
                }
            }
        }
        if &w == threshold {
            sup.max(1)
        } else {
            sup
        }
    };
    memo.insert(code, g);
    Ok(g)
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
