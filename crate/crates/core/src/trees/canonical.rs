//! AHU-style canonical codes for vertex-labeled trees.
//!
//! The code of a rooted tree is `OPEN label children... CLOSE` with the
//! children's codes sorted bytewise and the label written as four big-endian
//! bytes. An unrooted tree takes the smaller code over its one or two
//! centroids. Codes are ordered first by vertex count, then bytewise.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{DecoratedTree, Tree};

const OPEN: u8 = 0x01;
const CLOSE: u8 = 0x02;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalCode {
    size: usize,
    bytes: Vec<u8>,
}

impl CanonicalCode {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Ord for CanonicalCode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.bytes.cmp(&other.bytes))
    }
}

impl PartialOrd for CanonicalCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({}:{})", self.size, self.to_hex())
    }
}

impl Serialize for CanonicalCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

pub fn canonical_code(t: &DecoratedTree) -> CanonicalCode {
    code_with_labels(t.tree(), t.ell())
}

impl Tree {
    pub fn canonical_code(&self) -> CanonicalCode {
        code_with_labels(self, &vec![0; self.vertex_count()])
    }
}

pub(crate) fn code_with_labels(tree: &Tree, labels: &[u32]) -> CanonicalCode {
    let (_, bytes) = best_root(tree, labels);
    CanonicalCode {
        size: tree.vertex_count(),
        bytes,
    }
}

/// Vertices listed in canonical order: preorder from the canonical root,
/// children visited in increasing code order. Vertices related by a
/// label-preserving automorphism may swap places; nothing else can.
pub fn canonical_order(tree: &Tree, labels: &[u32]) -> Vec<usize> {
    let (root, _) = best_root(tree, labels);
    let codes = rooted_codes(tree, labels, root);
    let parent = tree.parents_from(root);
    let mut order = Vec::with_capacity(tree.vertex_count());
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        order.push(u);
        let mut children: Vec<usize> = tree
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&v| v != parent[u])
            .collect();
        children.sort_by(|&a, &b| codes[a].cmp(&codes[b]).then(a.cmp(&b)));
        stack.extend(children.into_iter().rev());
    }
    order
}

fn best_root(tree: &Tree, labels: &[u32]) -> (usize, Vec<u8>) {
    centroids(tree)
        .into_iter()
        .map(|c| {
            let mut codes = rooted_codes(tree, labels, c);
            (c, std::mem::take(&mut codes[c]))
        })
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("a tree has a centroid")
}

fn rooted_codes(tree: &Tree, labels: &[u32], root: usize) -> Vec<Vec<u8>> {
    let parent = tree.parents_from(root);
    let mut codes: Vec<Vec<u8>> = vec![Vec::new(); tree.vertex_count()];
    for &u in tree.bfs_order(root).iter().rev() {
        let mut children: Vec<&Vec<u8>> = tree
            .neighbors(u)
            .iter()
            .filter(|&&v| v != parent[u])
            .map(|&v| &codes[v])
            .collect();
        children.sort_unstable();
        let mut code = vec![OPEN];
        code.extend_from_slice(&labels[u].to_be_bytes());
        for c in children {
            code.extend_from_slice(c);
        }
        code.push(CLOSE);
        codes[u] = code;
    }
    codes
}

fn centroids(tree: &Tree) -> Vec<usize> {
    let n = tree.vertex_count();
    let order = tree.bfs_order(0);
    let parent = tree.parents_from(0);
    let mut size = vec![1usize; n];
    for &u in order.iter().rev() {
        if parent[u] != usize::MAX {
            size[parent[u]] += size[u];
        }
    }
    let heaviest: Vec<usize> = (0..n)
        .map(|u| {
            let below = tree
                .neighbors(u)
                .iter()
                .filter(|&&v| v != parent[u])
                .map(|&v| size[v])
                .max()
                .unwrap_or(0);
            below.max(n - size[u])
        })
        .collect();
    let best = *heaviest.iter().min().unwrap();
    (0..n).filter(|&u| heaviest[u] == best).collect()
}
