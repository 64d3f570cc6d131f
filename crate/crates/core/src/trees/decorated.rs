use serde::{Deserialize, Serialize};

use super::{canonical_code, CanonicalCode, Tree};
use crate::error::{Error, Result};

/// A pattern tree `τ` together with a decoration `ℓ: V(τ) → ℕ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedTree {
    tree: Tree,
    ell: Vec<u32>,
}

impl DecoratedTree {
    pub fn new(tree: Tree, ell: Vec<u32>) -> Result<Self> {
        if ell.len() != tree.vertex_count() {
            return Err(Error::invalid(format!(
                "decoration has {} entries for {} vertices",
                ell.len(),
                tree.vertex_count()
            )));
        }
        Ok(DecoratedTree { tree, ell })
    }

    pub fn undecorated(tree: Tree) -> Self {
        let n = tree.vertex_count();
        DecoratedTree {
            tree,
            ell: vec![0; n],
        }
    }

    /// A single vertex carrying decoration `ell`.
    pub fn vertex(ell: u32) -> Self {
        DecoratedTree {
            tree: Tree::single_vertex(),
            ell: vec![ell],
        }
    }

    /// Two adjacent undecorated vertices.
    pub fn edge() -> Self {
        DecoratedTree::undecorated(Tree::path(2))
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn ell(&self) -> &[u32] {
        &self.ell
    }

    pub fn size(&self) -> usize {
        self.tree.vertex_count()
    }

    /// `|ℓ| = Σ ℓ(u)`.
    pub fn total_ell(&self) -> u64 {
        self.ell.iter().map(|&x| x as u64).sum()
    }

    /// Vertices with `ℓ = 0` and degree one.
    pub fn loose_leaves(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&u| self.ell[u] == 0 && self.tree.degree(u) == 1)
            .collect()
    }

    /// True for the single vertex with `ℓ ∈ {0, 1}` and the undecorated edge.
    pub fn is_base(&self) -> bool {
        match self.size() {
            1 => self.ell[0] <= 1,
            2 => self.ell == [0, 0],
            _ => false,
        }
    }

    /// `w(τ) = |ℓ| + #loose leaves`, and 1 for the three base trees.
    pub fn weight(&self) -> u64 {
        if self.is_base() {
            1
        } else {
            self.total_ell() + self.loose_leaves().len() as u64
        }
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        canonical_code(self)
    }

    pub fn with_ell(&self, u: usize, value: u32) -> DecoratedTree {
        let mut ell = self.ell.clone();
        ell[u] = value;
        DecoratedTree {
            tree: self.tree.clone(),
            ell,
        }
    }

    /// `τ^{u-}`: decoration at `u` lowered by one.
    pub fn decremented(&self, u: usize) -> DecoratedTree {
        assert!(self.ell[u] > 0);
        self.with_ell(u, self.ell[u] - 1)
    }

    /// `τ^{u+}`: decoration at `u` raised by one.
    pub fn incremented(&self, u: usize) -> DecoratedTree {
        self.with_ell(u, self.ell[u] + 1)
    }

    /// `τ ∖ v` for a leaf `v`; larger ids shift down by one.
    pub fn without_leaf(&self, v: usize) -> DecoratedTree {
        let mut ell = self.ell.clone();
        ell.remove(v);
        DecoratedTree {
            tree: self.tree.without_leaf(v),
            ell,
        }
    }
}

/// Target host degrees `d: V(τ) → ℕ*` for perfect embeddings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeDecoration(pub Vec<usize>);

impl DegreeDecoration {
    pub fn new(d: Vec<usize>) -> Result<Self> {
        if d.iter().any(|&x| x == 0) {
            return Err(Error::invalid("degree decorations must be positive"));
        }
        Ok(DegreeDecoration(d))
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(DecoratedTree::vertex(0).weight(), 1);
        assert_eq!(DecoratedTree::vertex(1).weight(), 1);
        assert_eq!(DecoratedTree::edge().weight(), 1);
        assert_eq!(DecoratedTree::undecorated(Tree::path(3)).weight(), 2);
        assert_eq!(DecoratedTree::vertex(3).weight(), 3);
        let t = DecoratedTree::new(Tree::path(2), vec![1, 1]).unwrap();
        assert_eq!(t.weight(), 2);
        let s = DecoratedTree::new(Tree::star(4), vec![2, 0, 1, 0]).unwrap();
        assert_eq!(s.loose_leaves(), vec![1, 3]);
        assert_eq!(s.weight(), 5);
    }

    #[test]
    fn edits() {
        let t = DecoratedTree::new(Tree::path(3), vec![0, 2, 1]).unwrap();
        assert_eq!(t.decremented(1).ell(), &[0, 1, 1]);
        let r = t.without_leaf(0);
        assert_eq!(r.ell(), &[2, 1]);
        assert_eq!(r.tree(), &Tree::path(2));
        assert!(DecoratedTree::new(Tree::path(3), vec![0]).is_err());
    }

    #[test]
    fn degree_decorations_are_positive() {
        assert!(DegreeDecoration::new(vec![1, 0]).is_err());
        assert!(DegreeDecoration::new(vec![1, 3]).is_ok());
    }
}
