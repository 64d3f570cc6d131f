//! Splitting a grown plane tree into planted subtrees hanging from the seed's
//! corners, the Pólya urn governing their sizes, and the coupling of two
//! equal-size seeds through one shared family of planted trees.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::alpha::AlphaParam;
use crate::error::{Error, Result};
use crate::growth::PlanarState;
use crate::trees::{canonical_order, Flavor, PlaneTree, PlantedPlaneTree, Tree, HALF_EDGE};

const NO_RED: usize = usize::MAX;

/// Sizes `k^{v,i}` of the planted subtrees, one coordinate per seed corner.
/// The urn weight of a red coordinate is `(1+α)s - 1`, of a blue one
/// `(1+α)s - α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UrnState {
    pub sizes: Vec<u64>,
    pub red: Vec<bool>,
}

impl UrnState {
    /// Initial state for a seed with `k` vertices: `k` red coordinates
    /// followed by `k - 2` blue ones, all of size 1.
    pub fn initial(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("the urn needs a seed with at least two vertices"));
        }
        let mut red = vec![true; k];
        red.extend(std::iter::repeat(false).take(k - 2));
        Ok(UrnState {
            sizes: vec![1; 2 * k - 2],
            red,
        })
    }

    pub fn seed_size(&self) -> usize {
        self.red.iter().filter(|&&r| r).count()
    }

    /// Size of the tree the state describes: every non-root vertex of the
    /// planted trees plus the seed.
    pub fn tree_size(&self) -> u64 {
        let k = self.seed_size() as u64;
        self.sizes.iter().sum::<u64>() - self.sizes.len() as u64 + k
    }

    pub fn weights(&self, alpha: AlphaParam) -> Vec<BigRational> {
        let scale = BigRational::one() + alpha.to_rational();
        self.sizes
            .iter()
            .zip(&self.red)
            .map(|(&s, &red)| {
                let base = &scale * BigRational::from_integer(BigInt::from(s));
                if red {
                    base - BigRational::one()
                } else {
                    base - alpha.to_rational()
                }
            })
            .collect()
    }

    pub fn total_weight(&self, alpha: AlphaParam) -> BigRational {
        self.weights(alpha).into_iter().sum()
    }
}

/// Pólya urn with `2k - 2` colours started from `k` entries `α` and `k - 2`
/// entries 1; each step adds `1 + α` to one coordinate chosen with
/// probability proportional to its weight.
pub fn urn_sample<R: Rng + ?Sized>(
    k: usize,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<UrnState> {
    let mut state = UrnState::initial(k)?;
    if n_target < k {
        return Err(Error::invalid(format!(
            "target size {n_target} is smaller than the seed ({k})"
        )));
    }
    let a = alpha.as_f64();
    let mut weights: Vec<f64> = state
        .red
        .iter()
        .map(|&r| if r { a } else { 1.0 })
        .collect();
    for n in k..n_target {
        let total = (1.0 + a) * n as f64 - 2.0;
        let mut x = rng.gen::<f64>() * total;
        let mut pick = weights.len() - 1;
        for (i, &w) in weights.iter().enumerate() {
            if x < w {
                pick = i;
                break;
            }
            x -= w;
        }
        weights[pick] += 1.0 + a;
        state.sizes[pick] += 1;
    }
    Ok(state)
}

/// The planted subtrees of a grown tree, one per seed corner.
///
/// `labels[i][x]` is the id, in the whole tree, of local vertex `x` of
/// `trees[i]`; local vertex 0 is the seed vertex owning the corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeForest {
    pub seed: PlaneTree,
    pub corners: Vec<(usize, usize)>,
    pub trees: Vec<PlantedPlaneTree>,
    pub labels: Vec<Vec<usize>>,
}

impl SubtreeForest {
    /// Urn coordinates ordered red corners first (by vertex), then blue
    /// corners by `(vertex, corner)`.
    pub fn size_vector(&self) -> UrnState {
        let mut idx: Vec<usize> = (0..self.corners.len()).collect();
        idx.sort_by_key(|&i| (self.trees[i].flavor() == Flavor::Blue, self.corners[i]));
        UrnState {
            sizes: idx.iter().map(|&i| self.trees[i].size() as u64).collect(),
            red: idx
                .iter()
                .map(|&i| self.trees[i].flavor() == Flavor::Red)
                .collect(),
        }
    }
}

/// Splits `t` into the planted subtrees stemming from each corner of the seed
/// on ids `0..k`. Every seed vertex must list a seed neighbor first, as
/// growth from a seed guarantees.
pub fn decompose(t: &PlaneTree, k: usize) -> Result<SubtreeForest> {
    let n = t.vertex_count();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("seed size {k} invalid for a tree of size {n}")));
    }
    let seed_vertices: Vec<usize> = (0..k).collect();
    if !t.tree().is_connected_subset(&seed_vertices) {
        return Err(Error::precondition("ids 0..k do not induce a connected seed"));
    }
    let mut seed_adjacency = Vec::with_capacity(k);
    let mut seed_red = Vec::with_capacity(k);
    let mut corners = Vec::new();
    let mut trees = Vec::new();
    let mut labels = Vec::new();
    for v in 0..k {
        let order = t.neighbor_order(v);
        if order[0] >= k {
            return Err(Error::precondition(format!(
                "seed vertex {v} does not start its order at a seed neighbor"
            )));
        }
        let positions: Vec<usize> = (0..order.len()).filter(|&p| order[p] < k).collect();
        seed_adjacency.push(positions.iter().map(|&p| order[p]).collect::<Vec<_>>());
        let red = t.red_corner(v);
        let mut red_gap = None;
        for (j, &start) in positions.iter().enumerate() {
            let end = positions.get(j + 1).copied().unwrap_or(order.len());
            let children: Vec<usize> = order[start + 1..end].to_vec();
            let is_red = red >= start && red < end;
            if is_red {
                if red != end - 1 {
                    return Err(Error::precondition(format!(
                        "red corner of seed vertex {v} does not close its gap"
                    )));
                }
                red_gap = Some(j);
            }
            let flavor = if is_red { Flavor::Red } else { Flavor::Blue };
            let (tree, label) = extract_planted(t, v, &children, flavor)?;
            corners.push((v, j));
            trees.push(tree);
            labels.push(label);
        }
        seed_red.push(red_gap.expect("red corner lies in some gap"));
    }
    let seed = PlaneTree::new(Tree::from_adjacency(seed_adjacency)?, seed_red)?;
    Ok(SubtreeForest {
        seed,
        corners,
        trees,
        labels,
    })
}

fn extract_planted(
    t: &PlaneTree,
    root: usize,
    children: &[usize],
    flavor: Flavor,
) -> Result<(PlantedPlaneTree, Vec<usize>)> {
    let mut members = Vec::new();
    let mut seen = vec![false; t.vertex_count()];
    let mut stack: Vec<(usize, usize)> = children.iter().map(|&c| (c, root)).collect();
    while let Some((u, from)) = stack.pop() {
        if seen[u] {
            return Err(Error::precondition("planted subtree re-enters the seed"));
        }
        seen[u] = true;
        members.push(u);
        for &w in t.neighbor_order(u) {
            if w != from {
                if w == root {
                    return Err(Error::precondition("planted subtree re-enters the seed"));
                }
                stack.push((w, u));
            }
        }
    }
    members.sort_unstable();
    let mut label = vec![root];
    label.extend(&members);
    let local = |g: usize| -> usize {
        if g == root {
            0
        } else {
            1 + members.binary_search(&g).expect("member of the subtree")
        }
    };
    let mut adjacency = Vec::with_capacity(label.len());
    let mut root_list = vec![HALF_EDGE];
    root_list.extend(children.iter().map(|&c| local(c)));
    adjacency.push(root_list);
    let mut red = vec![match flavor {
        Flavor::Red => Some(children.len()),
        Flavor::Blue => None,
    }];
    for &g in &members {
        adjacency.push(t.neighbor_order(g).iter().map(|&x| local(x)).collect());
        red.push(Some(t.red_corner(g)));
    }
    Ok((PlantedPlaneTree::new(adjacency, red, flavor)?, label))
}

/// Inverse of [`decompose`]: grafts every planted tree into its corner.
pub fn recompose(forest: &SubtreeForest) -> Result<PlaneTree> {
    let seed = &forest.seed;
    let k = seed.vertex_count();
    let n = k + forest.trees.iter().map(|t| t.size() - 1).sum::<usize>();
    let mut adjacency = vec![Vec::new(); n];
    let mut red = vec![NO_RED; n];
    let mut gap_of = vec![Vec::new(); k];
    for (i, &(v, j)) in forest.corners.iter().enumerate() {
        if v >= k || j >= seed.tree().degree(v) {
            return Err(Error::invalid(format!("corner ({v}, {j}) not in the seed")));
        }
        gap_of[v].push((j, i));
    }
    for v in 0..k {
        gap_of[v].sort_unstable();
        if gap_of[v].len() != seed.tree().degree(v) {
            return Err(Error::invalid(format!("vertex {v} is missing planted trees")));
        }
        for &(j, i) in &gap_of[v] {
            let tree = &forest.trees[i];
            let label = &forest.labels[i];
            let expected = if j == seed.red_corner(v) { Flavor::Red } else { Flavor::Blue };
            if tree.flavor() != expected {
                return Err(Error::invalid(format!("corner ({v}, {j}) has the wrong flavor")));
            }
            let start = adjacency[v].len();
            adjacency[v].push(seed.neighbor_order(v)[j]);
            adjacency[v].extend(tree.neighbors(0)[1..].iter().map(|&x| label[x]));
            if expected == Flavor::Red {
                red[v] = start + tree.neighbors(0).len() - 1;
            }
            for x in 1..tree.size() {
                let g = label[x];
                if g >= n || !adjacency[g].is_empty() {
                    return Err(Error::invalid(format!("label {g} reused or out of range")));
                }
                adjacency[g] = tree.neighbors(x).iter().map(|&y| label[y]).collect();
                red[g] = tree.red_corner(x).expect("non-root vertices have a red corner");
            }
        }
    }
    PlaneTree::new(Tree::from_adjacency(adjacency)?, red)
}

/// Seed corners in pairing order: red corners by canonical vertex rank, then
/// blue corners by `(canonical vertex rank, corner index)`.
pub fn corner_pairing_order(seed: &PlaneTree) -> Vec<(usize, usize)> {
    let order = canonical_order(seed.tree(), &vec![0; seed.vertex_count()]);
    let mut reds = Vec::new();
    let mut blues = Vec::new();
    for &v in &order {
        for j in 0..seed.tree().degree(v) {
            if j == seed.red_corner(v) {
                reds.push((v, j));
            } else {
                blues.push((v, j));
            }
        }
    }
    reds.extend(blues);
    reds
}

/// Output of [`coupled_grow`].
#[derive(Debug, Clone)]
pub struct Coupled {
    pub first: PlaneTree,
    pub second: PlaneTree,
    /// Shared planted trees, in pairing order.
    pub trees: Vec<PlantedPlaneTree>,
    pub sizes: UrnState,
}

/// Joint growth of the `2k - 2` planted trees: one forest whose roots each
/// carry a half-edge, grown corner by corner.
pub(crate) struct CoupledForest {
    state: PlanarState,
    roots: usize,
    seed_size: usize,
}

impl CoupledForest {
    pub(crate) fn new(k: usize) -> Self {
        let roots = 2 * k - 2;
        let adjacency = vec![vec![HALF_EDGE]; roots];
        let red = (0..roots).map(|i| if i < k { 0 } else { NO_RED }).collect();
        CoupledForest {
            state: PlanarState::from_parts(adjacency, red),
            roots,
            seed_size: k,
        }
    }

    pub(crate) fn state(&self) -> &PlanarState {
        &self.state
    }

    pub(crate) fn state_mut(&mut self) -> &mut PlanarState {
        &mut self.state
    }

    pub(crate) fn tree_size(&self) -> usize {
        self.state.vertex_count() - self.roots + self.seed_size
    }

    /// Planted trees with labels, root `i` first.
    fn planted(&self) -> Vec<(PlantedPlaneTree, Vec<usize>)> {
        let k = self.seed_size;
        let adj = &self.state.adjacency;
        let global = |f: usize| k + f - self.roots;
        (0..self.roots)
            .map(|i| {
                let mut members = Vec::new();
                let mut stack: Vec<usize> = adj[i][1..].to_vec();
                while let Some(u) = stack.pop() {
                    members.push(u);
                    stack.extend(adj[u][1..].iter().copied());
                }
                members.sort_unstable();
                let local = |f: usize| {
                    if f == i {
                        0
                    } else {
                        1 + members.binary_search(&f).unwrap()
                    }
                };
                let mut adjacency = vec![adj[i]
                    .iter()
                    .map(|&f| if f == HALF_EDGE { HALF_EDGE } else { local(f) })
                    .collect::<Vec<_>>()];
                let flavor = if i < k { Flavor::Red } else { Flavor::Blue };
                let mut red = vec![(flavor == Flavor::Red).then(|| self.state.red[i])];
                for &m in &members {
                    adjacency.push(adj[m].iter().map(|&f| local(f)).collect());
                    red.push(Some(self.state.red[m]));
                }
                let mut label = vec![usize::MAX];
                label.extend(members.iter().map(|&m| global(m)));
                (
                    PlantedPlaneTree::from_parts_unchecked(adjacency, red, flavor),
                    label,
                )
            })
            .collect()
    }

    /// Grafts the forest into `seed` using its pairing order.
    pub(crate) fn graft(&self, seed: &PlaneTree) -> Result<PlaneTree> {
        let pairing = corner_pairing_order(seed);
        let mut trees = Vec::with_capacity(self.roots);
        let mut labels = Vec::with_capacity(self.roots);
        for (tree, mut label) in self.planted() {
            trees.push(tree);
            label[0] = 0;
            labels.push(label);
        }
        for (i, &(v, _)) in pairing.iter().enumerate() {
            labels[i][0] = v;
        }
        recompose(&SubtreeForest {
            seed: seed.clone(),
            corners: pairing,
            trees,
            labels,
        })
    }

    fn sizes(&self) -> UrnState {
        let k = self.seed_size;
        let planted = self.planted();
        UrnState {
            sizes: planted.iter().map(|(t, _)| t.size() as u64).collect(),
            red: (0..self.roots).map(|i| i < k).collect(),
        }
    }

    fn trees(&self) -> Vec<PlantedPlaneTree> {
        self.planted().into_iter().map(|(t, _)| t).collect()
    }
}

fn check_coupled_seeds(seed1: &PlaneTree, seed2: &PlaneTree) -> Result<usize> {
    let k = seed1.vertex_count();
    if k != seed2.vertex_count() {
        return Err(Error::invalid(format!(
            "coupled seeds must have equal sizes, got {k} and {}",
            seed2.vertex_count()
        )));
    }
    if k < 2 {
        return Err(Error::invalid("seed trees need at least two vertices"));
    }
    Ok(k)
}

/// Grows two planar α-PA trees from equal-size seeds so that they share the
/// same planted subtrees, grafted into corners matched by
/// [`corner_pairing_order`]. Non-seed vertices carry the same ids in both.
pub fn coupled_grow<R: Rng + ?Sized>(
    seed1: &PlaneTree,
    seed2: &PlaneTree,
    alpha: AlphaParam,
    n_target: usize,
    rng: &mut R,
) -> Result<Coupled> {
    let k = check_coupled_seeds(seed1, seed2)?;
    if n_target < k {
        return Err(Error::invalid(format!(
            "target size {n_target} is smaller than the seed ({k})"
        )));
    }
    let a = alpha.as_f64();
    let mut forest = CoupledForest::new(k);
    while forest.tree_size() < n_target {
        let choice = forest.state().sample(a, rng);
        forest.state_mut().apply(choice);
    }
    Ok(Coupled {
        first: forest.graft(seed1)?,
        second: forest.graft(seed2)?,
        trees: forest.trees(),
        sizes: forest.sizes(),
    })
}

/// Exact joint law of [`coupled_grow`] for tiny sizes.
pub fn enumerate_coupled(
    seed1: &PlaneTree,
    seed2: &PlaneTree,
    alpha: AlphaParam,
    n_target: usize,
) -> Result<Vec<(PlaneTree, PlaneTree, BigRational)>> {
    let k = check_coupled_seeds(seed1, seed2)?;
    if n_target < k || n_target > k + 5 {
        return Err(Error::invalid("coupled enumeration supports at most five steps"));
    }
    let a = alpha.to_rational();
    let mut level = vec![(CoupledForest::new(k), BigRational::one())];
    for n in k..n_target {
        let total = alpha.total_weight(n as u64);
        let mut next = Vec::new();
        for (forest, p) in &level {
            for choice in forest.state().choices() {
                let w = if choice.red { a.clone() } else { BigRational::one() };
                let mut f = CoupledForest {
                    state: forest.state.clone(),
                    roots: forest.roots,
                    seed_size: forest.seed_size,
                };
                f.state_mut().apply(choice);
                next.push((f, p * w / &total));
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|(f, p)| Ok((f.graft(seed1)?, f.graft(seed2)?, p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::grow_planar;
    use crate::rng::master_rng;

    fn one() -> AlphaParam {
        AlphaParam::integer(1).unwrap()
    }

    #[test]
    fn initial_urn() {
        let u = UrnState::initial(3).unwrap();
        let w = u.weights(one());
        assert_eq!(w.len(), 4);
        assert!(w.iter().all(|x| x.is_one()));
        assert_eq!(u.total_weight(one()), one().total_weight(3));
        assert!(UrnState::initial(1).is_err());
    }

    #[test]
    fn urn_total_weight_grows_linearly() {
        let a = AlphaParam::new(1, 3).unwrap();
        let u = urn_sample(4, a, 25, &mut master_rng(2)).unwrap();
        assert_eq!(u.total_weight(a), a.total_weight(25));
        assert_eq!(u.tree_size(), 25);
    }

    #[test]
    fn decompose_seed_only() {
        let seed = PlaneTree::from_tree(Tree::path(4)).unwrap();
        let f = decompose(&seed, 4).unwrap();
        assert_eq!(f.trees.len(), 6);
        assert!(f.trees.iter().all(|t| t.size() == 1));
        assert_eq!(f.seed, seed);
        assert_eq!(recompose(&f).unwrap(), seed);
    }

    #[test]
    fn round_trip_on_grown_trees() {
        let seed = PlaneTree::from_tree(Tree::star(4)).unwrap();
        for s in 0..20 {
            let t = grow_planar(&seed, one(), 40, &mut master_rng(s)).unwrap();
            let f = decompose(&t, 4).unwrap();
            assert_eq!(f.seed, seed);
            let sizes = f.size_vector();
            assert_eq!(sizes.tree_size(), 40);
            assert_eq!(recompose(&f).unwrap(), t);
        }
    }

    #[test]
    fn identical_seeds_couple_identically() {
        let seed = PlaneTree::from_tree(Tree::path(5)).unwrap();
        let c = coupled_grow(&seed, &seed, one(), 60, &mut master_rng(4)).unwrap();
        assert_eq!(c.first, c.second);
        assert_eq!(c.first.vertex_count(), 60);
        assert_eq!(c.sizes.tree_size(), 60);
    }

    #[test]
    fn coupled_outputs_share_planted_trees() {
        let s1 = PlaneTree::from_tree(Tree::path(5)).unwrap();
        let s2 = PlaneTree::from_tree(Tree::star(5)).unwrap();
        let c = coupled_grow(&s1, &s2, one(), 50, &mut master_rng(8)).unwrap();
        let f1 = decompose(&c.first, 5).unwrap();
        let f2 = decompose(&c.second, 5).unwrap();
        let mut a: Vec<_> = f1.trees.iter().map(|t| t.tree().canonical_code()).collect();
        let mut b: Vec<_> = f2.trees.iter().map(|t| t.tree().canonical_code()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(coupled_grow(&s1, &PlaneTree::from_tree(Tree::path(4)).unwrap(), one(), 9, &mut master_rng(1)).is_err());
    }
}
