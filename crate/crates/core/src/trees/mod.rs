//! Host trees, plane trees, decorated pattern trees and their canonical forms.

mod canonical;
mod decorated;
mod enumerate;
mod io;
mod plane;

pub use canonical::{canonical_code, canonical_order, CanonicalCode};
pub use decorated::{DecoratedTree, DegreeDecoration};
pub use enumerate::{enumerate_trees, enumerate_trees_with_cap, DEFAULT_ENUMERATION_CAP};
pub use plane::{Flavor, PlaneTree, PlantedPlaneTree, HALF_EDGE};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// An unrooted tree on vertices `0..n`, stored as compressed adjacency.
///
/// Neighbor lists keep the order in which they were supplied; plane trees use
/// that order as the cyclic order around each vertex. Equality compares edge
/// sets only.
#[derive(Debug, Clone)]
pub struct Tree {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Tree {
    pub fn single_vertex() -> Self {
        Tree {
            offsets: vec![0, 0],
            neighbors: Vec::new(),
        }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path is a tree")
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        assert!(n >= 1);
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Self::from_edges(n, &edges).expect("star is a tree")
    }

    /// Builds a tree from an edge list. Each vertex's neighbor order follows
    /// the order of the edges mentioning it.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a tree needs at least one vertex"));
        }
        if edges.len() != n - 1 {
            return Err(Error::invalid(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Self::from_adjacency(adjacency)
    }

    /// Builds a tree from explicit neighbor lists, validating symmetry,
    /// simplicity and connectivity.
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::invalid("a tree needs at least one vertex"));
        }
        let half_edges: usize = adjacency.iter().map(Vec::len).sum();
        if half_edges != 2 * (n - 1) {
            return Err(Error::invalid(format!(
                "degree sum {half_edges} does not match a tree on {n} vertices"
            )));
        }
        let tree = Self::from_adjacency_unchecked(adjacency);
        tree.validate()?;
        Ok(tree)
    }

    pub(crate) fn from_adjacency_unchecked(adjacency: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        let mut neighbors = Vec::with_capacity(adjacency.iter().map(Vec::len).sum());
        offsets.push(0);
        for list in adjacency {
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        Tree { offsets, neighbors }
    }

    /// Builds the tree obtained by growing `seed` where vertex `seed.len() + t`
    /// is attached to `parents[t]`. Runs in linear time.
    pub fn from_seed_and_parents(seed: &Tree, parents: &[usize]) -> Result<Self> {
        let k = seed.vertex_count();
        let n = k + parents.len();
        let mut degree = vec![0usize; n];
        for v in 0..k {
            degree[v] = seed.degree(v);
        }
        for (t, &p) in parents.iter().enumerate() {
            if p >= k + t {
                return Err(Error::invalid(format!(
                    "vertex {} attached to later vertex {p}",
                    k + t
                )));
            }
            degree[p] += 1;
            degree[k + t] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill: Vec<usize> = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; offsets[n]];
        for v in 0..k {
            for &u in seed.neighbors(v) {
                neighbors[fill[v]] = u;
                fill[v] += 1;
            }
        }
        for (t, &p) in parents.iter().enumerate() {
            let child = k + t;
            neighbors[fill[child]] = p;
            fill[child] += 1;
            neighbors[fill[p]] = child;
            fill[p] += 1;
        }
        Ok(Tree { offsets, neighbors })
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        let mut seen = vec![usize::MAX; n];
        for u in 0..n {
            for &v in self.neighbors(u) {
                if v >= n {
                    return Err(Error::invalid(format!("neighbor {v} out of range")));
                }
                if v == u {
                    return Err(Error::invalid(format!("self-loop at {u}")));
                }
                if seen[v] == u {
                    return Err(Error::invalid(format!("repeated edge ({u}, {v})")));
                }
                seen[v] = u;
                if !self.neighbors(v).contains(&u) {
                    return Err(Error::invalid(format!("asymmetric edge ({u}, {v})")));
                }
            }
        }
        if self.bfs_order(0).len() != n {
            return Err(Error::invalid("graph is not connected"));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Degree sequence sorted in decreasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.vertex_count() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn bfs_order(&self, root: usize) -> Vec<usize> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        seen[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in self.neighbors(u) {
                if v < n && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        order
    }

    /// Parent of each vertex when rooted at `root` (`usize::MAX` for the root).
    pub fn parents_from(&self, root: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.vertex_count()];
        for u in self.bfs_order(root) {
            for &v in self.neighbors(u) {
                if v != parent[u] {
                    parent[v] = u;
                }
            }
        }
        parent
    }

    /// Returns the tree with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Tree {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n);
        let mut adjacency = vec![Vec::new(); n];
        for v in 0..n {
            adjacency[perm[v]] = self.neighbors(v).iter().map(|&u| perm[u]).collect();
        }
        Tree::from_adjacency_unchecked(adjacency)
    }

    /// Induced subgraph on `vertices`, relabeled `0..len` in the given order.
    /// Fails if the subgraph is not connected.
    pub fn induced_subtree(&self, vertices: &[usize]) -> Result<Tree> {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            if index[v] != usize::MAX {
                return Err(Error::invalid(format!("vertex {v} listed twice")));
            }
            index[v] = i;
        }
        let adjacency: Vec<Vec<usize>> = vertices
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter(|&&u| index[u] != usize::MAX)
                    .map(|&u| index[u])
                    .collect()
            })
            .collect();
        Tree::from_adjacency(adjacency)
    }

    /// True when `vertices` induces a connected subgraph.
    pub fn is_connected_subset(&self, vertices: &[usize]) -> bool {
        !vertices.is_empty() && self.induced_subtree(vertices).is_ok()
    }

    /// Adds a new leaf attached to `parent`; the leaf gets id `n`.
    pub fn with_leaf(&self, parent: usize) -> Tree {
        let n = self.vertex_count();
        let mut adjacency: Vec<Vec<usize>> =
            (0..n).map(|v| self.neighbors(v).to_vec()).collect();
        adjacency[parent].push(n);
        adjacency.push(vec![parent]);
        Tree::from_adjacency_unchecked(adjacency)
    }

    /// Removes leaf `v`, shifting larger ids down by one.
    pub fn without_leaf(&self, v: usize) -> Tree {
        let n = self.vertex_count();
        assert!(n >= 2 && self.degree(v) == 1, "vertex {v} is not a leaf");
        let shift = |u: usize| if u > v { u - 1 } else { u };
        let adjacency = (0..n)
            .filter(|&u| u != v)
            .map(|u| {
                self.neighbors(u)
                    .iter()
                    .filter(|&&x| x != v)
                    .map(|&x| shift(x))
                    .collect()
            })
            .collect();
        Tree::from_adjacency_unchecked(adjacency)
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count() == other.vertex_count() && self.edges() == other.edges()
    }
}

impl Eq for Tree {}

/// `[n]_d = n (n-1) ... (n-d+1)`, with `[n]_0 = 1` and `[n]_d = 0` for `d > n`.
pub fn falling_factorial(n: u64, d: u64) -> num_bigint::BigUint {
    if d > n {
        return num_bigint::BigUint::from(0u32);
    }
    let mut acc = num_bigint::BigUint::from(1u32);
    for i in 0..d {
        acc *= n - i;
    }
    acc
}

/// Same as [`falling_factorial`] in machine arithmetic; `None` on overflow.
pub fn falling_factorial_u128(n: u64, d: u64) -> Option<u128> {
    if d > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = acc.checked_mul((n - i) as u128)?;
    }
    Some(acc)
}

/// Falling factorial with a rational first argument: `x (x-1) ... (x-d+1)`.
pub fn falling_factorial_rational(
    x: &num_rational::BigRational,
    d: u64,
) -> num_rational::BigRational {
    use num_traits::One;
    let mut acc = num_rational::BigRational::one();
    let mut term = x.clone();
    for _ in 0..d {
        acc *= &term;
        term -= num_rational::BigRational::one();
    }
    acc
}

/// Float version of [`falling_factorial_rational`].
pub fn falling_factorial_f64(x: f64, d: u64) -> f64 {
    (0..d).map(|i| x - i as f64).product()
}
