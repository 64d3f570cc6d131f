//! Exact embedding-count observables.
//!
//! For a decorated pattern `(τ, ℓ)` and a host tree `T`,
//! `F_τ(T) = Σ_φ Π_u [deg_T(φ(u)) - 1]_{ℓ(u)}` where `φ` ranges over injective
//! graph homomorphisms `τ → T`, each counted separately (automorphic images
//! included).

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::trees::{
    falling_factorial, falling_factorial_u128, CanonicalCode, DecoratedTree, DegreeDecoration,
    Tree,
};

mod tree_dp;

pub type EmbeddingCount = BigUint;

pub const DEFAULT_MERGER_CAP: usize = 7;

/// Sum of machine-sized terms that spills into a big integer on overflow.
#[derive(Debug, Default, Clone)]
pub(crate) struct Accumulator {
    small: u128,
    big: BigUint,
}

impl Accumulator {
    pub(crate) fn add(&mut self, x: u128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = x;
            }
        }
    }

    pub(crate) fn add_big(&mut self, x: BigUint) {
        self.big += x;
    }

    pub(crate) fn finish(self) -> BigUint {
        self.big + self.small
    }
}

/// `[deg - 1]_ell`, with degree-0 hosts treated as `[0]_ell`.
fn vertex_weight(degree: usize, ell: u32) -> Option<u128> {
    falling_factorial_u128(degree.saturating_sub(1) as u64, ell as u64)
}

fn vertex_weight_big(degree: usize, ell: u32) -> BigUint {
    falling_factorial(degree.saturating_sub(1) as u64, ell as u64)
}

fn embedding_weight_big(ell: &[u32], host: &Tree, phi: &[usize]) -> BigUint {
    phi.iter()
        .enumerate()
        .map(|(u, &x)| vertex_weight_big(host.degree(x), ell[u]))
        .product()
}

/// Pattern traversal order: BFS from a maximum-degree vertex, with the
/// position of each vertex's already-placed neighbor.
struct Plan {
    order: Vec<usize>,
    anchor: Vec<usize>,
}

impl Plan {
    fn new(pattern: &Tree) -> Self {
        let root = (0..pattern.vertex_count())
            .max_by_key(|&u| (pattern.degree(u), std::cmp::Reverse(u)))
            .unwrap();
        let order = pattern.bfs_order(root);
        let parent = pattern.parents_from(root);
        let anchor = order
            .iter()
            .map(|&u| if u == root { usize::MAX } else { parent[u] })
            .collect();
        Plan { order, anchor }
    }
}

/// Calls `visit(φ)` for every injective homomorphism `φ: pattern → host`
/// (indexed by pattern vertex) such that `allowed(u, φ(u))` holds for every
/// pattern vertex `u`.
pub(crate) fn for_each_embedding<A, V>(pattern: &Tree, host: &Tree, allowed: A, mut visit: V)
where
    A: Fn(usize, usize) -> bool,
    V: FnMut(&[usize]),
{
    let r = pattern.vertex_count();
    if r > host.vertex_count() {
        return;
    }
    let plan = Plan::new(pattern);
    let mut phi = vec![usize::MAX; r];
    let mut used = vec![false; host.vertex_count()];
    let first = plan.order[0];
    for x in 0..host.vertex_count() {
        if host.degree(x) < pattern.degree(first) || !allowed(first, x) {
            continue;
        }
        phi[first] = x;
        used[x] = true;
        extend(pattern, host, &plan, 1, &mut phi, &mut used, &allowed, &mut visit);
        used[x] = false;
    }
}

#[allow(clippy::too_many_arguments)]
fn extend<A, V>(
    pattern: &Tree,
    host: &Tree,
    plan: &Plan,
    depth: usize,
    phi: &mut [usize],
    used: &mut [bool],
    allowed: &A,
    visit: &mut V,
) where
    A: Fn(usize, usize) -> bool,
    V: FnMut(&[usize]),
{
    if depth == plan.order.len() {
        visit(phi);
        return;
    }
    let u = plan.order[depth];
    let base = phi[plan.anchor[depth]];
    let need = pattern.degree(u);
    for &x in host.neighbors(base) {
        if used[x] || host.degree(x) < need || !allowed(u, x) {
            continue;
        }
        phi[u] = x;
        used[x] = true;
        extend(pattern, host, plan, depth + 1, phi, used, allowed, visit);
        used[x] = false;
    }
    phi[u] = usize::MAX;
}

/// `F_τ(T)`.
#[allow(non_snake_case)]
pub fn count_F(tau: &DecoratedTree, t: &Tree) -> EmbeddingCount {
    if tau.size() == 1 {
        return count_vertex(tau.ell()[0], &t.degrees());
    }
    tree_dp::weighted_count(tau, t, |_| true)
}

/// `F_τ` for the single vertex with decoration `ell`, from a degree list.
pub fn count_vertex(ell: u32, degrees: &[usize]) -> EmbeddingCount {
    let mut acc = Accumulator::default();
    for &d in degrees {
        match vertex_weight(d, ell) {
            Some(w) => acc.add(w),
            None => acc.add_big(vertex_weight_big(d, ell)),
        }
    }
    acc.finish()
}

/// Float evaluation of [`count_vertex`] for Monte Carlo use.
pub fn count_vertex_f64(ell: u32, degrees: &[usize]) -> f64 {
    degrees
        .iter()
        .map(|&d| {
            let x = d.saturating_sub(1) as f64;
            (0..ell).map(|i| (x - i as f64).max(0.0)).product::<f64>()
        })
        .sum()
}

/// Which embeddings [`count_F_region`] keeps, relative to the seed ids `0..k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    IntersectsSeed,
    InsideSeed,
    OutsideSeed,
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersects" | "intersects_seed" => Ok(Region::IntersectsSeed),
            "inside" | "inside_seed" => Ok(Region::InsideSeed),
            "outside" | "outside_seed" => Ok(Region::OutsideSeed),
            _ => Err(Error::parse(format!("unknown region {s:?}"))),
        }
    }
}

/// `F_τ` restricted to embeddings meeting, contained in, or avoiding the seed.
#[allow(non_snake_case)]
pub fn count_F_region(
    tau: &DecoratedTree,
    t: &Tree,
    seed_size: usize,
    region: Region,
) -> Result<EmbeddingCount> {
    if seed_size == 0 || seed_size > t.vertex_count() {
        return Err(Error::invalid(format!(
            "seed size {seed_size} invalid for a tree of size {}",
            t.vertex_count()
        )));
    }
    let k = seed_size;
    Ok(match region {
        Region::InsideSeed => tree_dp::weighted_count(tau, t, |x| x < k),
        Region::OutsideSeed => tree_dp::weighted_count(tau, t, |x| x >= k),
        Region::IntersectsSeed => count_F(tau, t) - tree_dp::weighted_count(tau, t, |x| x >= k),
    })
}

/// Every embedding with its weight, as (sorted image, weight).
fn weighted_embeddings(tau: &DecoratedTree, t: &Tree) -> Vec<(Vec<usize>, BigUint)> {
    let mut out = Vec::new();
    for_each_embedding(tau.tree(), t, |_, _| true, |phi| {
        let w = embedding_weight_big(tau.ell(), t, phi);
        if !w.is_zero() {
            let mut image = phi.to_vec();
            image.sort_unstable();
            out.push((image, w));
        }
    });
    out
}

/// Nonempty subsets of a sorted image with at most `max` elements.
fn subsets(image: &[usize], max: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u32..1 << image.len())
        .filter(move |m| m.count_ones() as usize <= max)
        .map(move |m| (0..image.len()).filter(|&i| m >> i & 1 == 1).map(|i| image[i]).collect())
}

/// Sums of `w(φ₁)·w(φ₂)` over pairs of embeddings of `τ` and `σ`, split by
/// whether the two images are disjoint. Returns `(disjoint, overlap)`.
///
/// The overlap is computed by inclusion–exclusion over the vertex sets
/// shared with each image of `τ`.
#[allow(non_snake_case)]
pub fn count_F_split(
    tau: &DecoratedTree,
    sigma: &DecoratedTree,
    t: &Tree,
) -> (EmbeddingCount, EmbeddingCount) {
    let first = weighted_embeddings(tau, t);
    let second = if tau == sigma {
        first.clone()
    } else {
        weighted_embeddings(sigma, t)
    };
    let max = tau.size().min(sigma.size());
    let mut containing: HashMap<Vec<usize>, BigUint> = HashMap::new();
    for (img, w) in &second {
        for s in subsets(img, max) {
            *containing.entry(s).or_default() += w;
        }
    }
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    for (img, w) in &first {
        for s in subsets(img, max) {
            if let Some(c) = containing.get(&s) {
                if s.len() % 2 == 1 {
                    plus += c * w;
                } else {
                    minus += c * w;
                }
            }
        }
    }
    let overlap = plus - minus;
    let total_first: BigUint = first.iter().map(|(_, w)| w).sum();
    let total_second: BigUint = second.iter().map(|(_, w)| w).sum();
    (total_first * total_second - &overlap, overlap)
}

/// Seed restriction for perfect embeddings: pattern vertices in `sigma` must
/// land in the seed `0..seed_size`, all others outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub sigma: Vec<usize>,
    pub seed_size: usize,
}

/// `D_{τ,d}(T)`: embeddings whose image degrees equal `d` exactly.
pub fn count_perfect(
    tau: &Tree,
    d: &DegreeDecoration,
    t: &Tree,
    anchor: Option<&Anchor>,
) -> Result<EmbeddingCount> {
    let r = tau.vertex_count();
    if d.values().len() != r {
        return Err(Error::invalid("degree decoration does not match the pattern"));
    }
    let d = d.values();
    let mut count: u128 = 0;
    match anchor {
        None => for_each_embedding(tau, t, |u, x| t.degree(x) == d[u], |_| count += 1),
        Some(a) => {
            if a.sigma.iter().any(|&u| u >= r) || !tau.is_connected_subset(&a.sigma) {
                return Err(Error::invalid("anchor is not a subtree of the pattern"));
            }
            let mut inside = vec![false; r];
            for &u in &a.sigma {
                inside[u] = true;
            }
            let k = a.seed_size;
            for_each_embedding(
                tau,
                t,
                |u, x| t.degree(x) == d[u] && (x < k) == inside[u],
                |_| count += 1,
            )
        }
    }
    Ok(BigUint::from(count))
}

/// Number of embeddings of `tau` into `t` for every image degree vector
/// (indexed by pattern vertex). Sums to the embedding count.
pub fn degree_profile(tau: &Tree, t: &Tree) -> BTreeMap<Vec<usize>, u128> {
    let mut out = BTreeMap::new();
    for_each_embedding(tau, t, |_, _| true, |phi| {
        let key: Vec<usize> = phi.iter().map(|&x| t.degree(x)).collect();
        *out.entry(key).or_insert(0) += 1;
    });
    out
}

/// One term `C(τ, σ)·F_σ` of the overlap expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergerTerm {
    pub tree: DecoratedTree,
    pub coefficient: BigUint,
}

/// Connected vertex subsets of a small tree, each sorted.
pub(crate) fn connected_subsets(tree: &Tree) -> Vec<Vec<usize>> {
    let r = tree.vertex_count();
    assert!(r < 32);
    (1u32..(1 << r))
        .map(|mask| (0..r).filter(|&u| mask >> u & 1 == 1).collect::<Vec<_>>())
        .filter(|s| tree.is_connected_subset(s))
        .collect()
}

/// All bijections `f: a → b` that map edges of `tree[a]` onto edges of
/// `tree[b]`.
fn subtree_isomorphisms(tree: &Tree, a: &[usize], b: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let sub = tree.induced_subtree(a).expect("connected subset");
    let target = tree.induced_subtree(b).expect("connected subset");
    let mut maps = Vec::new();
    for_each_embedding(&sub, &target, |_, _| true, |phi| {
        maps.push(phi.iter().enumerate().map(|(i, &j)| (a[i], b[j])).collect());
    });
    maps
}

/// `a! b! / ((m-a)! (m-b)! (a+b-m)!)`, the coefficient of `[x]_m` in
/// `[x]_a [x]_b`.
pub fn product_coefficient(a: u32, b: u32, m: u32) -> BigUint {
    assert!(m >= a.max(b) && m <= a + b);
    let fact = |x: u32| -> BigUint { (1..=x as u64).map(BigUint::from).product() };
    fact(a) * fact(b) / (fact(m - a) * fact(m - b) * fact(a + b - m))
}

/// Expansion of the overlapping part of `F_τ²` as `Σ C(τ,σ) F_σ` over merged
/// copies of `τ`. Terms with isomorphic `σ` are combined by summing their
/// coefficients; output is sorted by canonical code.
pub fn merger_expansion(tau: &DecoratedTree) -> Result<Vec<MergerTerm>> {
    merger_expansion_with_cap(tau, DEFAULT_MERGER_CAP)
}

pub fn merger_expansion_with_cap(tau: &DecoratedTree, cap: usize) -> Result<Vec<MergerTerm>> {
    let r = tau.size();
    if r > cap {
        return Err(Error::CapExceeded {
            what: "merger pattern size",
            value: r as u128,
            cap: cap as u128,
        });
    }
    let tree = tau.tree();
    let ell = tau.ell();
    let subsets = connected_subsets(tree);
    let mut groups: BTreeMap<CanonicalCode, Vec<&Vec<usize>>> = BTreeMap::new();
    for s in &subsets {
        let code = tree.induced_subtree(s).unwrap().canonical_code();
        groups.entry(code).or_default().push(s);
    }
    let edges = tree.edges();
    let mut terms: BTreeMap<CanonicalCode, MergerTerm> = BTreeMap::new();
    for group in groups.values() {
        for &a in group {
            for &b in group {
                for f in subtree_isomorphisms(tree, a, b) {
                    // second copy: glued vertices take the first copy's id
                    let mut id2 = vec![usize::MAX; r];
                    for &(x, y) in &f {
                        id2[y] = x;
                    }
                    let mut next = r;
                    for slot in id2.iter_mut() {
                        if *slot == usize::MAX {
                            *slot = next;
                            next += 1;
                        }
                    }
                    let size = next;
                    let mut glued_edges = edges.clone();
                    for &(u, v) in &edges {
                        if id2[u] >= r || id2[v] >= r {
                            glued_edges.push((id2[u], id2[v]));
                        }
                    }
                    let glued = Tree::from_edges(size, &glued_edges)?;
                    let mut base = vec![0u32; size];
                    base[..r].copy_from_slice(ell);
                    for y in 0..r {
                        if id2[y] >= r {
                            base[id2[y]] = ell[y];
                        }
                    }
                    let shared: Vec<(usize, u32, u32)> =
                        f.iter().map(|&(x, y)| (x, ell[x], ell[y])).collect();
                    emit_decorations(&glued, &mut base, &shared, 0, BigUint::one(), &mut terms);
                }
            }
        }
    }
    Ok(terms.into_values().collect())
}

fn emit_decorations(
    glued: &Tree,
    ell: &mut Vec<u32>,
    shared: &[(usize, u32, u32)],
    i: usize,
    coefficient: BigUint,
    out: &mut BTreeMap<CanonicalCode, MergerTerm>,
) {
    if i == shared.len() {
        let tree = DecoratedTree::new(glued.clone(), ell.clone()).unwrap();
        let code = tree.canonical_code();
        match out.get_mut(&code) {
            Some(term) => term.coefficient += coefficient,
            None => {
                out.insert(code, MergerTerm { tree, coefficient });
            }
        }
        return;
    }
    let (x, a, b) = shared[i];
    for m in a.max(b)..=a + b {
        ell[x] = m;
        emit_decorations(
            glued,
            ell,
            shared,
            i + 1,
            &coefficient * product_coefficient(a, b, m),
            out,
        );
    }
}
