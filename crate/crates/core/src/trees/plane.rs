use serde::{Deserialize, Serialize};

use super::Tree;
use crate::error::{Error, Result};

/// Marker for the extra half-edge of a planted tree's root.
pub const HALF_EDGE: usize = usize::MAX;

/// A tree with a cyclic neighbor order around each vertex and one red corner
/// per vertex.
///
/// Corner `j` of `v` is the sector from `neighbors(v)[j]` to
/// `neighbors(v)[j + 1]` (wrapping around).
#[derive(Debug, Clone)]
pub struct PlaneTree {
    tree: Tree,
    red: Vec<usize>,
}

impl PlaneTree {
    pub fn new(tree: Tree, red: Vec<usize>) -> Result<Self> {
        let n = tree.vertex_count();
        if n < 2 {
            return Err(Error::invalid("plane trees need at least two vertices"));
        }
        if red.len() != n {
            return Err(Error::invalid(format!(
                "{} red corners given for {n} vertices",
                red.len()
            )));
        }
        for (v, &r) in red.iter().enumerate() {
            if r >= tree.degree(v) {
                return Err(Error::invalid(format!(
                    "red corner {r} of vertex {v} out of range (degree {})",
                    tree.degree(v)
                )));
            }
        }
        Ok(PlaneTree { tree, red })
    }

    /// Uses the tree's neighbor order and colours corner 0 red everywhere.
    pub fn from_tree(tree: Tree) -> Result<Self> {
        let n = tree.vertex_count();
        Self::new(tree, vec![0; n])
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn vertex_count(&self) -> usize {
        self.tree.vertex_count()
    }

    pub fn neighbor_order(&self, v: usize) -> &[usize] {
        self.tree.neighbors(v)
    }

    pub fn red_corner(&self, v: usize) -> usize {
        self.red[v]
    }

    pub fn red_corners(&self) -> &[usize] {
        &self.red
    }

    pub fn corner_count(&self) -> usize {
        2 * (self.vertex_count() - 1)
    }

    pub fn red_count(&self) -> usize {
        self.vertex_count()
    }

    pub fn blue_count(&self) -> usize {
        self.corner_count() - self.red_count()
    }
}

impl PartialEq for PlaneTree {
    fn eq(&self, other: &Self) -> bool {
        self.red == other.red
            && self.vertex_count() == other.vertex_count()
            && (0..self.vertex_count())
                .all(|v| self.tree.neighbors(v) == other.tree.neighbors(v))
    }
}

impl Eq for PlaneTree {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Red,
    Blue,
}

/// A plane tree whose root (vertex 0) carries an extra half-edge, stored as
/// the first entry of the root's neighbor list.
///
/// In the red flavor the root's red corner is the one closing at the
/// half-edge; in the blue flavor the root has no red corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedPlaneTree {
    adjacency: Vec<Vec<usize>>,
    red: Vec<Option<usize>>,
    flavor: Flavor,
}

impl PlantedPlaneTree {
    pub fn single(flavor: Flavor) -> Self {
        PlantedPlaneTree {
            adjacency: vec![vec![HALF_EDGE]],
            red: vec![match flavor {
                Flavor::Red => Some(0),
                Flavor::Blue => None,
            }],
            flavor,
        }
    }

    pub fn new(adjacency: Vec<Vec<usize>>, red: Vec<Option<usize>>, flavor: Flavor) -> Result<Self> {
        let p = PlantedPlaneTree {
            adjacency,
            red,
            flavor,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.adjacency.len();
        if n == 0 || self.red.len() != n {
            return Err(Error::invalid("planted tree shape mismatch"));
        }
        if self.adjacency[0].first() != Some(&HALF_EDGE) {
            return Err(Error::invalid("root must start with the half-edge"));
        }
        let plain: Vec<Vec<usize>> = self
            .adjacency
            .iter()
            .map(|l| l.iter().copied().filter(|&u| u != HALF_EDGE).collect())
            .collect();
        Tree::from_adjacency(plain)?;
        for v in 0..n {
            let corners = self.adjacency[v].len();
            match (v, self.red[v]) {
                (0, None) if self.flavor == Flavor::Blue => {}
                (0, Some(r)) if self.flavor == Flavor::Red && r + 1 == corners => {}
                (0, _) => {
                    return Err(Error::invalid("root colouring does not match the flavor"))
                }
                (_, Some(r)) if r < corners => {}
                _ => return Err(Error::invalid(format!("bad red corner at vertex {v}"))),
            }
        }
        Ok(())
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Position of the half-edge in the root's cyclic order.
    pub fn half_edge_slot(&self) -> usize {
        0
    }

    pub fn size(&self) -> usize {
        self.adjacency.len()
    }

    /// Neighbor order of `v`; the root's list starts with [`HALF_EDGE`].
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn red_corner(&self, v: usize) -> Option<usize> {
        self.red[v]
    }

    pub fn corner_count(&self) -> usize {
        2 * self.size() - 1
    }

    pub fn red_count(&self) -> usize {
        self.red.iter().filter(|r| r.is_some()).count()
    }

    pub fn blue_count(&self) -> usize {
        self.corner_count() - self.red_count()
    }

    /// The underlying tree, without the half-edge.
    pub fn tree(&self) -> Tree {
        Tree::from_adjacency_unchecked(
            self.adjacency
                .iter()
                .map(|l| l.iter().copied().filter(|&u| u != HALF_EDGE).collect())
                .collect(),
        )
    }

    pub(crate) fn from_parts_unchecked(
        adjacency: Vec<Vec<usize>>,
        red: Vec<Option<usize>>,
        flavor: Flavor,
    ) -> Self {
        PlantedPlaneTree {
            adjacency,
            red,
            flavor,
        }
    }
}
