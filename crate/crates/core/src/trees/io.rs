//! Plain-text tree files.
//!
//! ```text
//! 3
//! 0 1
//! 1 2
//! ell: 0 2 0
//! order 1: 2 0
//! red 1: 1
//! ```
//!
//! Line one is the vertex count, followed by `n - 1` edge lines. Decorated
//! trees add an `ell:` line; plane trees add `order v:` and `red v:` lines.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{DecoratedTree, PlaneTree, Tree};
use crate::error::{Error, Result};

struct TextTree {
    n: usize,
    edges: Vec<(usize, usize)>,
    ell: Option<Vec<u32>>,
    order: BTreeMap<usize, Vec<usize>>,
    red: BTreeMap<usize, usize>,
}

fn parse_list<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|x| {
            x.parse()
                .map_err(|_| Error::parse(format!("line {line}: bad number {x:?}")))
        })
        .collect()
}

fn parse_keyed(rest: &str, line: usize) -> Result<(usize, &str)> {
    let (v, tail) = rest
        .split_once(':')
        .ok_or_else(|| Error::parse(format!("line {line}: missing ':'")))?;
    let v = v
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("line {line}: bad vertex id {v:?}")))?;
    Ok((v, tail))
}

fn parse_text(text: &str) -> Result<TextTree> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, head) = lines
        .next()
        .ok_or_else(|| Error::parse("empty tree file"))?;
    let n: usize = head
        .parse()
        .map_err(|_| Error::parse(format!("line {first}: expected vertex count, got {head:?}")))?;
    if n == 0 {
        return Err(Error::parse("vertex count must be positive"));
    }
    let mut out = TextTree {
        n,
        edges: Vec::with_capacity(n - 1),
        ell: None,
        order: BTreeMap::new(),
        red: BTreeMap::new(),
    };
    for (no, line) in lines {
        if let Some(rest) = line.strip_prefix("ell:") {
            if out.ell.is_some() {
                return Err(Error::parse(format!("line {no}: repeated ell line")));
            }
            out.ell = Some(parse_list(rest, no)?);
        } else if let Some(rest) = line.strip_prefix("order") {
            let (v, tail) = parse_keyed(rest, no)?;
            if out.order.insert(v, parse_list(tail, no)?).is_some() {
                return Err(Error::parse(format!("line {no}: repeated order for {v}")));
            }
        } else if let Some(rest) = line.strip_prefix("red") {
            let (v, tail) = parse_keyed(rest, no)?;
            let vals: Vec<usize> = parse_list(tail, no)?;
            if vals.len() != 1 {
                return Err(Error::parse(format!("line {no}: expected one red corner")));
            }
            if out.red.insert(v, vals[0]).is_some() {
                return Err(Error::parse(format!("line {no}: repeated red for {v}")));
            }
        } else {
            let vals: Vec<usize> = parse_list(line, no)?;
            if vals.len() != 2 {
                return Err(Error::parse(format!("line {no}: expected an edge `u v`")));
            }
            if !out.order.is_empty() || !out.red.is_empty() || out.ell.is_some() {
                return Err(Error::parse(format!("line {no}: edge after attribute lines")));
            }
            out.edges.push((vals[0], vals[1]));
        }
    }
    if out.edges.len() != n - 1 {
        return Err(Error::parse(format!(
            "expected {} edges, found {}",
            n - 1,
            out.edges.len()
        )));
    }
    Ok(out)
}

fn write_edges(tree: &Tree, out: &mut String) {
    writeln!(out, "{}", tree.vertex_count()).unwrap();
    for (u, v) in tree.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

impl Tree {
    /// Parses a tree file; attribute lines are accepted and ignored.
    pub fn parse(text: &str) -> Result<Tree> {
        let t = parse_text(text)?;
        Tree::from_edges(t.n, &t.edges)
    }

    /// Writes the vertex count and the sorted edge list.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_edges(self, &mut out);
        out
    }
}

impl DecoratedTree {
    /// Parses a decorated tree; a missing `ell:` line means all zeros.
    pub fn parse(text: &str) -> Result<DecoratedTree> {
        let t = parse_text(text)?;
        let tree = Tree::from_edges(t.n, &t.edges)?;
        match t.ell {
            Some(ell) => DecoratedTree::new(tree, ell),
            None => Ok(DecoratedTree::undecorated(tree)),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_edges(self.tree(), &mut out);
        writeln!(out, "ell: {}", join(self.ell())).unwrap();
        out
    }
}

impl PlaneTree {
    /// Parses a plane tree. Without `order` lines the neighbor order follows
    /// the edge list; without `red` lines corner 0 is red.
    pub fn parse(text: &str) -> Result<PlaneTree> {
        let t = parse_text(text)?;
        let base = Tree::from_edges(t.n, &t.edges)?;
        let tree = if t.order.is_empty() {
            base
        } else {
            if t.order.len() != t.n || t.order.keys().any(|&v| v >= t.n) {
                return Err(Error::parse("order lines must cover every vertex exactly once"));
            }
            let adjacency: Vec<Vec<usize>> = t.order.into_values().collect();
            for (v, list) in adjacency.iter().enumerate() {
                let mut a = list.clone();
                let mut b = base.neighbors(v).to_vec();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    return Err(Error::parse(format!(
                        "order of vertex {v} does not match its edges"
                    )));
                }
            }
            Tree::from_adjacency(adjacency)?
        };
        if t.red.keys().any(|&v| v >= t.n) {
            return Err(Error::parse("red line for unknown vertex"));
        }
        let red = (0..t.n).map(|v| t.red.get(&v).copied().unwrap_or(0)).collect();
        PlaneTree::new(tree, red)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_edges(self.tree(), &mut out);
        for v in 0..self.vertex_count() {
            writeln!(out, "order {v}: {}", join(self.neighbor_order(v))).unwrap();
        }
        for v in 0..self.vertex_count() {
            writeln!(out, "red {v}: {}", self.red_corner(v)).unwrap();
        }
        out
    }
}
