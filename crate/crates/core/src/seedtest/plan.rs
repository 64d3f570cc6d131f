use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::alpha::AlphaParam;
use crate::error::{Error, Result};
use crate::growth::enumerate_growth;
use crate::observables::degree_profile;
use crate::trees::{
    canonical_order, enumerate_trees_with_cap, falling_factorial_rational, DegreeDecoration, Tree,
    DEFAULT_ENUMERATION_CAP,
};

/// Largest decoration value tried per vertex by the decoration search.
pub const DEFAULT_DECORATION_CAP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlindReport {
    pub tau: Tree,
    pub is_blind: bool,
    /// The largest differing `d` in the canonical lexicographic order.
    pub witness: Option<DegreeDecoration>,
}

fn rank_key(d: &[usize], order: &[usize]) -> Vec<usize> {
    order.iter().map(|&u| d[u]).collect()
}

/// `D_{τ,d}(s1) - D_{τ,d}(s2)` for every `d` where it is nonzero, keyed by
/// `d` in pattern vertex order.
fn perfect_differences(tau: &Tree, s1: &Tree, s2: &Tree) -> BTreeMap<Vec<usize>, BigInt> {
    let p1 = degree_profile(tau, s1);
    let p2 = degree_profile(tau, s2);
    let keys: BTreeSet<&Vec<usize>> = p1.keys().chain(p2.keys()).collect();
    keys.into_iter()
        .filter_map(|d| {
            let a = BigInt::from(p1.get(d).copied().unwrap_or(0));
            let b = BigInt::from(p2.get(d).copied().unwrap_or(0));
            (a != b).then(|| (d.clone(), a - b))
        })
        .collect()
}

/// Whether `D_{τ,d}(s1) = D_{τ,d}(s2)` for every degree decoration `d`.
pub fn is_blind(tau: &Tree, s1: &Tree, s2: &Tree) -> Result<BlindReport> {
    if s1.vertex_count() != s2.vertex_count() {
        return Err(Error::invalid("blindness compares seeds of equal size"));
    }
    let diff = perfect_differences(tau, s1, s2);
    let order = canonical_order(tau, &vec![0; tau.vertex_count()]);
    let witness = diff
        .keys()
        .max_by(|a, b| rank_key(a, &order).cmp(&rank_key(b, &order)))
        .map(|d| DegreeDecoration(d.clone()));
    Ok(BlindReport {
        tau: tau.clone(),
        is_blind: witness.is_none(),
        witness,
    })
}

/// The smallest tree that is not `(s1, s2)`-blind, ties broken by canonical
/// code.
pub fn minimal_nonblind(s1: &Tree, s2: &Tree) -> Result<Tree> {
    let k = s1.vertex_count();
    if k != s2.vertex_count() {
        return Err(Error::invalid("seeds must have equal sizes"));
    }
    if s1.canonical_code() == s2.canonical_code() {
        return Err(Error::precondition("isomorphic seeds have no non-blind tree"));
    }
    let cap = k.max(DEFAULT_ENUMERATION_CAP);
    for size in 1..=k {
        for tau in enumerate_trees_with_cap(size, cap)? {
            if !is_blind(&tau, s1, s2)?.is_blind {
                return Ok(tau);
            }
        }
    }
    Err(Error::precondition("no non-blind tree found"))
}

/// `Π_u [d(u) + ℓ(u) + α - 2]_{ℓ(u)}`: the large-`n` weight of a perfect
/// embedding with degrees `d`, up to a constant depending only on the seed
/// size and `|ℓ|`.
pub fn f_infinity(d: &[usize], ell: &[u32], alpha: AlphaParam) -> Result<BigRational> {
    if d.len() != ell.len() {
        return Err(Error::invalid("degree and decoration vectors differ in length"));
    }
    let a = alpha.to_rational();
    Ok(d.iter()
        .zip(ell)
        .map(|(&du, &lu)| {
            let x = BigRational::from_integer(BigInt::from(du as i64 + lu as i64 - 2)) + &a;
            falling_factorial_rational(&x, lu as u64)
        })
        .product())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEntry {
    pub d: Vec<usize>,
    #[serde(serialize_with = "as_string")]
    pub value: BigRational,
}

fn as_string<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// A decorated pattern whose mean difference between two seeds grows like
/// `n^{|ℓ|/(1+α)}` with a nonzero constant proportional to
/// `closed_form_sum`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistinguishPlan {
    #[serde(serialize_with = "edges")]
    pub tau: Tree,
    pub ell: Vec<u32>,
    /// Pattern vertices in the order used for the lexicographic comparison.
    pub vertex_order: Vec<usize>,
    /// `D_{τ,d}(first) - D_{τ,d}(second)` for every `d` where it is nonzero.
    pub delta: Vec<DeltaEntry>,
    pub d_max: Vec<usize>,
    #[serde(serialize_with = "as_string")]
    pub closed_form_sum: BigRational,
}

fn edges<S: serde::Serializer>(t: &Tree, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("tree", 2)?;
    st.serialize_field("vertices", &t.vertex_count())?;
    st.serialize_field("edges", &t.edges())?;
    st.end()
}

impl DistinguishPlan {
    fn closed_form(delta: &[DeltaEntry], ell: &[u32], alpha: AlphaParam) -> Result<BigRational> {
        let mut sum = BigRational::zero();
        for e in delta {
            sum += f_infinity(&e.d, ell, alpha)? * &e.value;
        }
        Ok(sum)
    }
}

/// Smallest integer strictly above `1 + α`, and at least 2.
fn first_admissible(alpha: AlphaParam) -> u32 {
    let floor = (alpha.numer() + alpha.denom()) / alpha.denom();
    (floor as u32 + 1).max(2)
}

/// Chooses `ℓ` for a non-blind `τ` following the domination argument: with
/// vertices `u_1..u_r` in canonical order and `d_max` the lexicographically
/// largest differing `d`, fix `ℓ(u_r)`, then `ℓ(u_{r-1})`, ..., each the
/// smallest admissible value making the group of `d` that first departs from
/// `d_max` at that vertex contribute at most `1/(2r)` relative to `d_max`.
pub fn distinguishing_decoration(
    tau: &Tree,
    s1: &Tree,
    s2: &Tree,
    alpha: AlphaParam,
) -> Result<DistinguishPlan> {
    distinguishing_decoration_with_cap(tau, s1, s2, alpha, DEFAULT_DECORATION_CAP)
}

pub fn distinguishing_decoration_with_cap(
    tau: &Tree,
    s1: &Tree,
    s2: &Tree,
    alpha: AlphaParam,
    cap: u32,
) -> Result<DistinguishPlan> {
    if s1.vertex_count() != s2.vertex_count() {
        return Err(Error::invalid("seeds must have equal sizes"));
    }
    let diff = perfect_differences(tau, s1, s2);
    if diff.is_empty() {
        return Err(Error::precondition("the pattern is blind for these seeds"));
    }
    let r = tau.vertex_count();
    let order = canonical_order(tau, &vec![0; r]);
    let delta: Vec<DeltaEntry> = diff
        .into_iter()
        .map(|(d, v)| DeltaEntry {
            d,
            value: BigRational::from_integer(v),
        })
        .collect();
    let d_max = delta
        .iter()
        .map(|e| &e.d)
        .max_by(|a, b| rank_key(a, &order).cmp(&rank_key(b, &order)))
        .unwrap()
        .clone();
    let f_max_weight = |ell: &[u32]| f_infinity(&d_max, ell, alpha);
    // group j holds the d whose first departure from d_max is at u_j
    let mut groups: Vec<Vec<&DeltaEntry>> = vec![Vec::new(); r];
    for e in &delta {
        if let Some(j) = (0..r).find(|&j| e.d[order[j]] != d_max[order[j]]) {
            groups[j].push(e);
        }
    }
    let bound = BigRational::new(BigInt::one(), BigInt::from(2 * r as u64));
    let mut ell = vec![2u32; r];
    for j in (0..r).rev() {
        let u = order[j];
        ell[u] = if j == r - 1 { first_admissible(alpha) } else { 2 };
        loop {
            let f_max = f_max_weight(&ell)?;
            let mut s = BigRational::zero();
            for e in &groups[j] {
                s += f_infinity(&e.d, &ell, alpha)? * &e.value;
            }
            if (s / f_max).abs() <= bound {
                break;
            }
            if ell[u] >= cap {
                return Err(Error::CapExceeded {
                    what: "decoration value",
                    value: ell[u] as u128 + 1,
                    cap: cap as u128,
                });
            }
            ell[u] += 1;
        }
    }
    let closed_form_sum = DistinguishPlan::closed_form(&delta, &ell, alpha)?;
    if closed_form_sum.is_zero() {
        return Err(Error::precondition("closed-form sum vanished"));
    }
    Ok(DistinguishPlan {
        tau: tau.clone(),
        ell,
        vertex_order: order,
        delta,
        d_max,
        closed_form_sum,
    })
}

/// Plan for seeds of different sizes `|s2| < |s1|`: `τ` is a single vertex and
/// `s2` is first grown to `|s1|` vertices, with the degree counts averaged
/// over its exact law.
pub fn distinguishing_decoration_unequal(
    s1: &Tree,
    s2: &Tree,
    alpha: AlphaParam,
) -> Result<DistinguishPlan> {
    let (k, k2) = (s1.vertex_count(), s2.vertex_count());
    if !(3 <= k2 && k2 < k) {
        return Err(Error::invalid(format!(
            "expected 3 <= |s2| < |s1|, got |s1| = {k}, |s2| = {k2}"
        )));
    }
    let law = enumerate_growth(s2, alpha, k, true)?;
    let mut diff: BTreeMap<usize, BigRational> = BTreeMap::new();
    for d in s1.degrees() {
        *diff.entry(d).or_insert_with(BigRational::zero) += BigRational::one();
    }
    for outcome in &law {
        for d in outcome.tree.degrees() {
            *diff.entry(d).or_insert_with(BigRational::zero) -= &outcome.probability;
        }
    }
    let delta: Vec<DeltaEntry> = diff
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(d, value)| DeltaEntry { d: vec![d], value })
        .collect();
    let top = delta
        .last()
        .ok_or_else(|| Error::precondition("degree laws coincide"))?
        .clone();
    let mut ell = first_admissible(alpha);
    loop {
        let f_max = f_infinity(&top.d, &[ell], alpha)?;
        let mut rest = BigRational::zero();
        for e in &delta[..delta.len() - 1] {
            rest += f_infinity(&e.d, &[ell], alpha)? * &e.value;
        }
        if (rest / f_max).abs() * BigRational::from_integer(BigInt::from(2)) <= top.value.abs() {
            break;
        }
        if ell >= DEFAULT_DECORATION_CAP {
            return Err(Error::CapExceeded {
                what: "decoration value",
                value: ell as u128 + 1,
                cap: DEFAULT_DECORATION_CAP as u128,
            });
        }
        ell += 1;
    }
    let ell = vec![ell];
    let closed_form_sum = DistinguishPlan::closed_form(&delta, &ell, alpha)?;
    if closed_form_sum.is_zero() {
        return Err(Error::precondition("closed-form sum vanished"));
    }
    Ok(DistinguishPlan {
        tau: Tree::single_vertex(),
        ell,
        vertex_order: vec![0],
        d_max: top.d.clone(),
        delta,
        closed_form_sum,
    })
}
