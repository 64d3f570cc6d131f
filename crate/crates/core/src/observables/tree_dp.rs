//! Weighted embedding counts by dynamic programming over directed host
//! edges. A homomorphism between trees is injective exactly when the
//! neighbours of every pattern vertex have distinct images, so it suffices
//! to assign the children of each pattern vertex to distinct host
//! neighbours.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::trees::{falling_factorial, falling_factorial_u128, DecoratedTree, Tree};

trait Weight: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn vertex(degree: usize, ell: u32) -> Option<Self>;
    fn add(&self, other: &Self) -> Option<Self>;
    fn mul(&self, other: &Self) -> Option<Self>;
}

impl Weight for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn vertex(degree: usize, ell: u32) -> Option<Self> {
        falling_factorial_u128(degree.saturating_sub(1) as u64, ell as u64)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        BigUint::from(1u32)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn vertex(degree: usize, ell: u32) -> Option<Self> {
        Some(falling_factorial(degree.saturating_sub(1) as u64, ell as u64))
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
}

/// `Σ_φ Π_u [deg(φ(u)) - 1]_{ℓ(u)}` over injective homomorphisms whose image
/// avoids vertices with `allowed(x) == false`.
pub(super) fn weighted_count<A: Fn(usize) -> bool>(tau: &DecoratedTree, host: &Tree, allowed: A) -> BigUint {
    match run::<u128, _>(tau, host, &allowed) {
        Some(v) => BigUint::from(v),
        None => run::<BigUint, _>(tau, host, &allowed).expect("big integers do not overflow"),
    }
}

fn run<W: Weight, A: Fn(usize) -> bool>(tau: &DecoratedTree, host: &Tree, allowed: &A) -> Option<W> {
    let pattern = tau.tree();
    let r = pattern.vertex_count();
    let n = host.vertex_count();
    if r > n {
        return Some(W::zero());
    }
    let root = (0..r).max_by_key(|&u| pattern.degree(u)).unwrap();
    let parent = pattern.parents_from(root);
    let order = pattern.bfs_order(root);
    let children: Vec<Vec<usize>> = (0..r)
        .map(|u| pattern.neighbors(u).iter().copied().filter(|&c| parent[c] == u).collect())
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for x in 0..n {
        offsets.push(offsets[x] + host.degree(x));
    }
    let weights: Vec<Vec<W>> = (0..r)
        .map(|u| {
            (0..n)
                .map(|x| {
                    if allowed(x) && host.degree(x) >= pattern.degree(u) {
                        W::vertex(host.degree(x), tau.ell()[u])
                    } else {
                        Some(W::zero())
                    }
                })
                .collect()
        })
        .collect::<Option<_>>()?;
    // table[c][offsets[x] + i]: subtree of c mapped with c -> neighbors(x)[i], parent -> x
    let mut table: Vec<Vec<W>> = vec![Vec::new(); r];
    for &c in order.iter().rev().filter(|&&c| c != root) {
        let mut h = vec![W::zero(); offsets[n]];
        for x in 0..n {
            for (i, &z) in host.neighbors(x).iter().enumerate() {
                let w = &weights[c][z];
                if w.is_zero() {
                    continue;
                }
                let below = assign(&children[c], &table, host, &offsets, z, Some(x))?;
                h[offsets[x] + i] = w.mul(&below)?;
            }
        }
        table[c] = h;
    }
    let mut total = W::zero();
    for x in 0..n {
        let w = &weights[root][x];
        if w.is_zero() {
            continue;
        }
        let below = assign(&children[root], &table, host, &offsets, x, None)?;
        total = total.add(&w.mul(&below)?)?;
    }
    Some(total)
}

/// Sum over injective assignments of `kids` to neighbours of `z` other than
/// `exclude` of the product of their subtree tables.
fn assign<W: Weight>(
    kids: &[usize],
    table: &[Vec<W>],
    host: &Tree,
    offsets: &[usize],
    z: usize,
    exclude: Option<usize>,
) -> Option<W> {
    let m = kids.len();
    if m == 0 {
        return Some(W::one());
    }
    let full = (1usize << m) - 1;
    let mut dp = vec![W::zero(); full + 1];
    dp[0] = W::one();
    for (j, &y) in host.neighbors(z).iter().enumerate() {
        if Some(y) == exclude {
            continue;
        }
        let edge = offsets[z] + j;
        for mask in (0..full).rev() {
            if dp[mask].is_zero() {
                continue;
            }
            for (b, &c) in kids.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    continue;
                }
                let v = &table[c][edge];
                if v.is_zero() {
                    continue;
                }
                let next = mask | 1 << b;
                dp[next] = dp[next].add(&dp[mask].mul(v)?)?;
            }
        }
    }
    Some(dp[full].clone())
}
