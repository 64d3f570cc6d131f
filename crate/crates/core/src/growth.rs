//! Samplers for α-PA trees and an exact small-size growth oracle.
//!
//! A tree on `N` vertices has `N` red corners of weight `α` and `N - 2` blue
//! corners of weight 1. The samplers first pick the colour class, then a
//! uniform member of it, which gives vertex `u` total weight `deg(u) - 1 + α`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::alpha::AlphaParam;
use crate::error::{Error, Result};
use crate::trees::{Flavor, PlaneTree, PlantedPlaneTree, Tree, HALF_EDGE};

const NO_RED: usize = usize::MAX;

pub const DEFAULT_GROWTH_ENUMERATION_CAP: u128 = 1_000_000;

fn check_seed(seed: &Tree) -> Result<()> {
    if seed.vertex_count() < 2 {
        return Err(Error::invalid("seed trees need at least two vertices"));
    }
    Ok(())
}

fn check_target(k: usize, n_target: usize) -> Result<()> {
    if n_target < k {
        return Err(Error::invalid(format!(
            "target size {n_target} is smaller than the seed ({k})"
        )));
    }
    Ok(())
}

/// Abstract α-PA growth state: only parents and the blue-corner multiset.
struct AbstractState {
    alpha: f64,
    n: usize,
    blue: Vec<usize>,
}

impl AbstractState {
    fn new(seed: &Tree, alpha: f64, capacity: usize) -> Self {
        let mut blue = Vec::with_capacity(capacity.saturating_sub(2));
        for v in 0..seed.vertex_count() {
            for _ in 1..seed.degree(v) {
                blue.push(v);
            }
        }
        AbstractState {
            alpha,
            n: seed.vertex_count(),
            blue,
        }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let red_weight = self.alpha * self.n as f64;
        let x = rng.gen::<f64>() * (red_weight + self.blue.len() as f64);
        let target = if x < red_weight {
            ((x / self.alpha) as usize).min(self.n - 1)
        } else {
            let i = ((x - red_weight) as usize).min(self.blue.len() - 1);
            self.blue[i]
        };
        self.blue.push(target);
        self.n += 1;
        target
    }
}

/// Attachment targets of vertices `k, k+1, ..., n_target-1`.
pub fn grow_parents<R: Rng + ?Sized>(
    seed: &Tree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_seed(seed)?;
    let k = seed.vertex_count();
    check_target(k, n_target)?;
    let mut state = AbstractState::new(seed, alpha.as_f64(), n_target);
    Ok((k..n_target).map(|_| state.step(rng)).collect())
}

/// Grows an α-PA tree from `seed` to `n_target` vertices. The seed keeps ids
/// `0..k` and the vertex added at step `t` gets id `k + t - 1`.
pub fn grow_abstract<R: Rng + ?Sized>(
    seed: &Tree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<Tree> {
    let parents = grow_parents(seed, alpha, n_target, rng)?;
    Tree::from_seed_and_parents(seed, &parents)
}

/// Final degree sequence only; avoids building adjacency. `degrees` is
/// overwritten.
pub fn grow_degrees<R: Rng + ?Sized>(
    seed: &Tree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
    degrees: &mut Vec<usize>,
) -> Result<()> {
    check_seed(seed)?;
    let k = seed.vertex_count();
    check_target(k, n_target)?;
    degrees.clear();
    degrees.extend(seed.degrees());
    degrees.resize(n_target, 1);
    let mut state = AbstractState::new(seed, alpha.as_f64(), n_target);
    for _ in k..n_target {
        let u = state.step(rng);
        degrees[u] += 1;
    }
    Ok(())
}

/// Reference sampler: scans all vertices with weight `deg - 1 + α` at every
/// step. Quadratic; kept for cross-checking the fast sampler.
pub fn grow_abstract_reference<R: Rng + ?Sized>(
    seed: &Tree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<Tree> {
    check_seed(seed)?;
    let k = seed.vertex_count();
    check_target(k, n_target)?;
    let a = alpha.as_f64();
    let mut degree = seed.degrees();
    let mut parents = Vec::with_capacity(n_target - k);
    for n in k..n_target {
        let total = (1.0 + a) * n as f64 - 2.0;
        let mut x = rng.gen::<f64>() * total;
        let mut target = n - 1;
        for (u, &d) in degree.iter().enumerate() {
            let w = d as f64 - 1.0 + a;
            if x < w {
                target = u;
                break;
            }
            x -= w;
        }
        degree[target] += 1;
        degree.push(1);
        parents.push(target);
    }
    Tree::from_seed_and_parents(seed, &parents)
}

/// One corner-level growth step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerChoice {
    pub vertex: usize,
    pub corner: usize,
    pub red: bool,
}

/// A recorded planar growth step; `step` counts from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub choice: CornerChoice,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {}: vertex {} corner {} color {}",
            self.step,
            self.choice.vertex,
            self.choice.corner,
            if self.choice.red { 'r' } else { 'b' }
        )
    }
}

/// Corner-coloured growth over a forest of plane trees, some of whose roots
/// carry a half-edge.
#[derive(Debug, Clone)]
pub(crate) struct PlanarState {
    pub(crate) adjacency: Vec<Vec<usize>>,
    pub(crate) red: Vec<usize>,
    red_vertices: Vec<usize>,
    blue: Vec<usize>,
}

impl PlanarState {
    pub(crate) fn from_plane(seed: &PlaneTree) -> Self {
        let n = seed.vertex_count();
        let adjacency = (0..n).map(|v| seed.neighbor_order(v).to_vec()).collect();
        Self::from_parts(adjacency, seed.red_corners().to_vec())
    }

    pub(crate) fn from_parts(adjacency: Vec<Vec<usize>>, red: Vec<usize>) -> Self {
        let mut red_vertices = Vec::new();
        let mut blue = Vec::new();
        for (v, list) in adjacency.iter().enumerate() {
            let mut blue_corners = list.len();
            if red[v] != NO_RED {
                red_vertices.push(v);
                blue_corners -= 1;
            }
            blue.extend(std::iter::repeat(v).take(blue_corners));
        }
        PlanarState {
            adjacency,
            red,
            red_vertices,
            blue,
        }
    }

    pub(crate) fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, alpha: f64, rng: &mut R) -> CornerChoice {
        let red_weight = alpha * self.red_vertices.len() as f64;
        let x = rng.gen::<f64>() * (red_weight + self.blue.len() as f64);
        if x < red_weight {
            let i = ((x / alpha) as usize).min(self.red_vertices.len() - 1);
            let v = self.red_vertices[i];
            CornerChoice {
                vertex: v,
                corner: self.red[v],
                red: true,
            }
        } else {
            let i = ((x - red_weight) as usize).min(self.blue.len() - 1);
            let v = self.blue[i];
            let corners = self.adjacency[v].len();
            let mut c = rng.gen_range(0..corners - usize::from(self.red[v] != NO_RED));
            if self.red[v] != NO_RED && c >= self.red[v] {
                c += 1;
            }
            CornerChoice {
                vertex: v,
                corner: c,
                red: false,
            }
        }
    }

    /// Every available corner with its weight numerator (`α` or 1).
    pub(crate) fn choices(&self) -> Vec<CornerChoice> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            for c in 0..self.adjacency[v].len() {
                out.push(CornerChoice {
                    vertex: v,
                    corner: c,
                    red: self.red[v] == c,
                });
            }
        }
        out
    }

    /// Inserts a new vertex into the chosen corner and returns its id. The
    /// part of a split red corner that keeps the original closing half-edge
    /// stays red; the new vertex's only corner is red.
    pub(crate) fn apply(&mut self, choice: CornerChoice) -> usize {
        let v = choice.vertex;
        let j = choice.corner;
        let w = self.adjacency.len();
        self.adjacency[v].insert(j + 1, w);
        if self.red[v] != NO_RED && self.red[v] >= j {
            debug_assert!(self.red[v] > j || choice.red);
            self.red[v] += 1;
        }
        self.blue.push(v);
        self.adjacency.push(vec![v]);
        self.red.push(0);
        self.red_vertices.push(w);
        w
    }

    pub(crate) fn into_plane(self) -> PlaneTree {
        let tree = Tree::from_adjacency_unchecked(self.adjacency);
        PlaneTree::new(tree, self.red).expect("growth preserves the colouring")
    }
}

fn check_plane_seed(seed: &PlaneTree) -> Result<()> {
    if seed.vertex_count() < 2 {
        return Err(Error::invalid("seed trees need at least two vertices"));
    }
    Ok(())
}

/// Planar α-PA growth with corner colours.
pub fn grow_planar<R: Rng + ?Sized>(
    seed: &PlaneTree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<PlaneTree> {
    grow_planar_traced(seed, alpha, n_target, rng).map(|(t, _)| t)
}

/// [`grow_planar`] that also returns the chosen corner of every step.
pub fn grow_planar_traced<R: Rng + ?Sized>(
    seed: &PlaneTree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<(PlaneTree, Vec<TraceStep>)> {
    check_plane_seed(seed)?;
    check_target(seed.vertex_count(), n_target)?;
    let a = alpha.as_f64();
    let mut state = PlanarState::from_plane(seed);
    let mut trace = Vec::with_capacity(n_target - seed.vertex_count());
    while state.vertex_count() < n_target {
        let choice = state.sample(a, rng);
        state.apply(choice);
        trace.push(TraceStep {
            step: trace.len() + 1,
            choice,
        });
    }
    Ok((state.into_plane(), trace))
}

/// Grows a planted plane tree from the single planted vertex of `flavor`.
pub fn grow_planted<R: Rng + ?Sized>(
    flavor: Flavor,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<PlantedPlaneTree> {
    if n_target == 0 {
        return Err(Error::invalid("planted trees have at least one vertex"));
    }
    let root_red = match flavor {
        Flavor::Red => 0,
        Flavor::Blue => NO_RED,
    };
    let mut state = PlanarState::from_parts(vec![vec![HALF_EDGE]], vec![root_red]);
    let a = alpha.as_f64();
    while state.vertex_count() < n_target {
        let choice = state.sample(a, rng);
        state.apply(choice);
    }
    let red = state
        .red
        .iter()
        .map(|&r| (r != NO_RED).then_some(r))
        .collect();
    Ok(PlantedPlaneTree::from_parts_unchecked(
        state.adjacency,
        red,
        flavor,
    ))
}

/// A tree together with its exact probability.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthOutcome {
    pub tree: Tree,
    pub probability: BigRational,
}

fn outcome_count(k: usize, n: usize) -> u128 {
    let mut count: u128 = 1;
    for m in (k + 1)..=n {
        count = count.saturating_mul(m as u128);
    }
    count
}

/// Exact law of the α-PA tree grown from `seed` to `n_target` vertices.
/// Outcomes keep growth ids; with `canonicalize`, isomorphic outcomes are
/// merged and sorted by canonical code.
pub fn enumerate_growth(
    seed: &Tree,
    alpha: AlphaParam,
    n_target: usize,
    canonicalize: bool,
) -> Result<Vec<GrowthOutcome>> {
    enumerate_growth_with_cap(seed, alpha, n_target, canonicalize, DEFAULT_GROWTH_ENUMERATION_CAP)
}

pub fn enumerate_growth_with_cap(
    seed: &Tree,
    alpha: AlphaParam,
    n_target: usize,
    canonicalize: bool,
    cap: u128,
) -> Result<Vec<GrowthOutcome>> {
    check_seed(seed)?;
    let k = seed.vertex_count();
    check_target(k, n_target)?;
    let count = outcome_count(k, n_target);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "growth outcome count",
            value: count,
            cap,
        });
    }
    let a = alpha.to_rational();
    let mut level = vec![GrowthOutcome {
        tree: seed.clone(),
        probability: BigRational::one(),
    }];
    for n in k..n_target {
        let total = alpha.total_weight(n as u64);
        let mut next = Vec::with_capacity(level.len() * n);
        for outcome in &level {
            for u in 0..n {
                let w = BigRational::from_integer(BigInt::from(outcome.tree.degree(u)))
                    - BigRational::one()
                    + &a;
                next.push(GrowthOutcome {
                    tree: outcome.tree.with_leaf(u),
                    probability: &outcome.probability * w / &total,
                });
            }
        }
        level = if canonicalize { merge_isomorphic(next) } else { next };
    }
    if canonicalize {
        level = merge_isomorphic(level);
    }
    Ok(level)
}

fn merge_isomorphic(outcomes: Vec<GrowthOutcome>) -> Vec<GrowthOutcome> {
    let mut merged: BTreeMap<_, GrowthOutcome> = BTreeMap::new();
    for o in outcomes {
        let code = o.tree.canonical_code();
        match merged.get_mut(&code) {
            Some(existing) => existing.probability += o.probability,
            None => {
                merged.insert(code, o);
            }
        }
    }
    merged.into_values().collect()
}

/// Exact law of planar growth: every reachable coloured plane tree with its
/// probability. Exponential; for tiny sizes only.
pub fn enumerate_planar_growth(
    seed: &PlaneTree,
    alpha: AlphaParam,
    n_target: usize,
) -> Result<Vec<(PlaneTree, BigRational)>> {
    check_plane_seed(seed)?;
    let k = seed.vertex_count();
    check_target(k, n_target)?;
    let mut count: u128 = 1;
    for m in k..n_target {
        count = count.saturating_mul(2 * m as u128 - 2);
    }
    if count > DEFAULT_GROWTH_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "planar growth outcome count",
            value: count,
            cap: DEFAULT_GROWTH_ENUMERATION_CAP,
        });
    }
    let a = alpha.to_rational();
    let mut level = vec![(PlanarState::from_plane(seed), BigRational::one())];
    for n in k..n_target {
        let total = alpha.total_weight(n as u64);
        let mut next = Vec::new();
        for (state, p) in &level {
            for choice in state.choices() {
                let w = if choice.red { a.clone() } else { BigRational::one() };
                let mut s = state.clone();
                s.apply(choice);
                next.push((s, p * w / &total));
            }
        }
        level = next;
    }
    Ok(level
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(s, p)| (s.into_plane(), p))
        .collect())
}
