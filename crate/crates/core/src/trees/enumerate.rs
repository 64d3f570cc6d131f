use std::collections::BTreeMap;

use super::Tree;
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// One tree per isomorphism class on `size` vertices, sorted by canonical code.
pub fn enumerate_trees(size: usize) -> Result<Vec<Tree>> {
    enumerate_trees_with_cap(size, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_trees_with_cap(size: usize, cap: usize) -> Result<Vec<Tree>> {
    if size == 0 {
        return Err(Error::invalid("tree size must be at least 1"));
    }
    if size > cap {
        return Err(Error::CapExceeded {
            what: "tree enumeration size",
            value: size as u128,
            cap: cap as u128,
        });
    }
    let mut level = vec![Tree::single_vertex()];
    for _ in 1..size {
        let mut next = BTreeMap::new();
        for t in &level {
            for v in 0..t.vertex_count() {
                let grown = t.with_leaf(v);
                next.entry(grown.canonical_code()).or_insert(grown);
            }
        }
        level = next.into_values().collect();
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sizes() {
        assert_eq!(enumerate_trees(1).unwrap().len(), 1);
        assert_eq!(enumerate_trees(4).unwrap().len(), 2);
        assert!(enumerate_trees(11).is_err());
        assert!(enumerate_trees_with_cap(11, 11).is_ok());
    }

    #[test]
    fn sorted_by_code() {
        let trees = enumerate_trees(6).unwrap();
        let codes: Vec<_> = trees.iter().map(Tree::canonical_code).collect();
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
    }
}
