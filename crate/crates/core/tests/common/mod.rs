//! Reference implementations shared by the integration tests. They trade
//! speed for obviousness and are independent of the library's fast paths.
#![allow(dead_code, non_snake_case)]

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use pa_seed::growth::enumerate_growth;
use pa_seed::moments::{reduction_children, weight};
use pa_seed::observables::count_F;
use pa_seed::trees::{DecoratedTree, Tree};
use pa_seed::AlphaParam;

pub fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Every decorated tree with at most three vertices and `ℓ(u) <= 2`, one per
/// isomorphism class.
pub fn decorated_grid() -> Vec<DecoratedTree> {
    let mut seen = BTreeMap::new();
    for tree in [Tree::single_vertex(), Tree::path(2), Tree::path(3)] {
        let r = tree.vertex_count();
        for code in 0..3usize.pow(r as u32) {
            let ell = (0..r).map(|i| (code / 3usize.pow(i as u32) % 3) as u32).collect();
            let t = DecoratedTree::new(tree.clone(), ell).unwrap();
            seen.entry(t.canonical_code()).or_insert(t);
        }
    }
    seen.into_values().collect()
}

/// `[x]_d` on integers, zero once the product crosses zero.
fn falling(x: i64, d: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..d as i64 {
        if x - i <= 0 {
            return BigUint::zero();
        }
        acc *= BigUint::from((x - i) as u64);
    }
    acc
}

/// `F_τ` by trying every injective map of pattern vertices into the host.
pub fn naive_count_F(tau: &DecoratedTree, t: &Tree) -> BigUint {
    let r = tau.size();
    let n = t.vertex_count();
    let mut phi = Vec::with_capacity(r);
    let mut total = BigUint::zero();
    fn go(tau: &DecoratedTree, t: &Tree, phi: &mut Vec<usize>, total: &mut BigUint) {
        let r = tau.size();
        if phi.len() == r {
            for (a, b) in tau.tree().edges() {
                if !t.has_edge(phi[a], phi[b]) {
                    return;
                }
            }
            let mut w = BigUint::one();
            for u in 0..r {
                let d = t.degree(phi[u]) as i64;
                w *= falling(d - 1, tau.ell()[u]);
            }
            *total += w;
            return;
        }
        for x in 0..t.vertex_count() {
            if !phi.contains(&x) {
                phi.push(x);
                go(tau, t, phi, total);
                phi.pop();
            }
        }
    }
    if r <= n {
        go(tau, t, &mut phi, &mut total);
    }
    total
}

/// `E[F_τ(T_n^S)]` from the exact law of the grown tree.
pub fn brute_expectation(tau: &DecoratedTree, seed: &Tree, alpha: AlphaParam, n: usize) -> BigRational {
    enumerate_growth(seed, alpha, n, true)
        .unwrap()
        .into_iter()
        .map(|o| o.probability * BigRational::from_integer(BigInt::from(count_F(tau, &o.tree))))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `E[F_τ(t⁺) | t]` by summing over every attachment target.
pub fn one_step_mean(tau: &DecoratedTree, t: &Tree, alpha: AlphaParam) -> BigRational {
    let total = alpha.total_weight(t.vertex_count() as u64);
    let a = alpha.to_rational();
    let mut acc = BigRational::zero();
    for x in 0..t.vertex_count() {
        let p = (rat(t.degree(x) as i64 - 1) + &a) / &total;
        acc += p * rat(count_F(tau, &t.with_leaf(x)));
    }
    acc
}

/// Right-hand side of the one-step recurrence for a non-base `τ`.
pub fn one_step_prediction(tau: &DecoratedTree, t: &Tree, alpha: AlphaParam) -> BigRational {
    let total = alpha.total_weight(t.vertex_count() as u64);
    let w = rat(weight(tau));
    let mut acc = (BigRational::one() + w / &total) * rat(count_F(tau, t));
    for child in reduction_children(tau, alpha).unwrap() {
        acc += child.coefficient * rat(count_F(&child.child, t)) / &total;
    }
    acc
}
