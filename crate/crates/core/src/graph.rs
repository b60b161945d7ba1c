//! Cayley graphs, qubit adjacency graphs and the measurements taken on them.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::code::{CheckType, CssCode};
use crate::group::{GroupElement, GroupSpec};
use crate::par;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("identity cannot be a Cayley generator")]
    IdentityGenerator,
    #[error("generator belongs to a different group")]
    SpecMismatch,
    #[error("vertex {0} out of range")]
    Vertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Builds from an edge list, dropping duplicates and self-loops.
    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); vertices];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degree_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.max_degree() + 1];
        for list in &self.adj {
            hist[list.len()] += 1;
        }
        hist
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// One `u v` pair per line, preceded by a `vertices edges` header.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// BFS distances from `source`; unreachable vertices get `usize::MAX`.
    pub fn distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in 0..self.adj.len() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Cayley graph with edges `{h, s h}` (left) or `{h, h s}` (right).
pub fn cayley_graph(spec: &GroupSpec, generators: &[GroupElement], side: Side) -> Result<SimpleGraph, GraphError> {
    for g in generators {
        if g.spec() != spec {
            return Err(GraphError::SpecMismatch);
        }
        if g.is_identity() {
            return Err(GraphError::IdentityGenerator);
        }
    }
    let edges = spec.elements().flat_map(|h| {
        generators.iter().map(move |&s| {
            let t = match side {
                Side::Left => s * h,
                Side::Right => h * s,
            };
            (h.index(), t.index())
        })
    });
    Ok(SimpleGraph::from_edges(spec.order(), edges))
}

/// Qubits are adjacent when some check of type `side` contains both.
pub fn qubit_adjacency(code: &CssCode, side: CheckType) -> SimpleGraph {
    let supports = code.check_supports(side);
    let edges = supports.iter().flat_map(|s| {
        s.iter()
            .enumerate()
            .flat_map(move |(t, &u)| s[t + 1..].iter().map(move |&v| (u, v)))
    });
    SimpleGraph::from_edges(code.n(), edges)
}

/// Shortest cycle through `root`, or a cycle reachable from it; the minimum
/// over all roots is the girth.
fn shortest_cycle_from(g: &SimpleGraph, root: usize) -> Option<usize> {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([root]);
    dist[root] = 0;
    let mut best: Option<usize> = None;
    while let Some(u) = queue.pop_front() {
        // Cycles first closed at deeper vertices are at least 2 * dist long.
        if let Some(b) = best {
            if 2 * dist[u] >= b {
                break;
            }
        }
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            } else if parent[u] != v {
                let len = dist[u] + dist[v] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

/// Length of the shortest cycle; `None` for forests.
pub fn girth(g: &SimpleGraph) -> Option<usize> {
    let results = par::map_range(g.vertex_count(), |v| shortest_cycle_from(g, v));
    results.into_iter().flatten().min()
}

/// Diameter of every connected component, in [`SimpleGraph::components`]
/// order.
pub fn diameter(g: &SimpleGraph) -> Vec<usize> {
    let ecc = par::map_range(g.vertex_count(), |v| {
        g.distances(v)
            .into_iter()
            .filter(|&d| d != usize::MAX)
            .max()
            .unwrap_or(0)
    });
    g.components()
        .iter()
        .map(|comp| comp.iter().map(|&v| ecc[v]).max().unwrap_or(0))
        .collect()
}

/// `|B_r(center)|` for `r = 0..=r_max`.
pub fn ball_growth(g: &SimpleGraph, center: usize, r_max: usize) -> Result<Vec<usize>, GraphError> {
    if center >= g.vertex_count() {
        return Err(GraphError::Vertex(center));
    }
    let dist = g.distances(center);
    let mut layer = vec![0usize; r_max + 1];
    for d in dist {
        if d <= r_max {
            layer[d] += 1;
        }
    }
    let mut acc = 0;
    Ok(layer
        .into_iter()
        .map(|c| {
            acc += c;
            acc
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringStrategy {
    /// Vertices in index order, each taking the smallest free color.
    Sequential,
    /// Peel maximal independent sets, growing each from minimum-degree
    /// vertices of the remaining candidates.
    IndependentSet,
}

impl std::str::FromStr for ColoringStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(Self::Sequential),
            "independent_set" | "independent-set" => Ok(Self::IndependentSet),
            other => Err(format!("unknown coloring strategy '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub count: usize,
}

impl Coloring {
    pub fn is_proper(&self, g: &SimpleGraph) -> bool {
        g.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }

    /// Vertex lists per color, ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,color\n");
        for (v, c) in self.colors.iter().enumerate() {
            let _ = writeln!(s, "{v},{c}");
        }
        s
    }
}

pub fn greedy_coloring(g: &SimpleGraph, strategy: ColoringStrategy, seed: u64) -> Coloring {
    let n = g.vertex_count();
    let colors = match strategy {
        ColoringStrategy::Sequential => {
            let mut colors = vec![usize::MAX; n];
            let mut used = Vec::new();
            for v in 0..n {
                used.clear();
                used.extend(g.neighbors(v).iter().map(|&u| colors[u]).filter(|&c| c != usize::MAX));
                used.sort_unstable();
                used.dedup();
                colors[v] = used
                    .iter()
                    .enumerate()
                    .find(|&(i, &c)| i != c)
                    .map_or(used.len(), |(i, _)| i);
            }
            colors
        }
        ColoringStrategy::IndependentSet => independent_set_coloring(g, seed),
    };
    let count = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
    Coloring { colors, count }
}

fn independent_set_coloring(g: &SimpleGraph, seed: u64) -> Vec<usize> {
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut colors = vec![usize::MAX; n];
    let mut remaining = n;
    let mut color = 0;
    let mut candidate = vec![false; n];
    let mut cand_degree = vec![0usize; n];
    while remaining > 0 {
        for v in 0..n {
            candidate[v] = colors[v] == usize::MAX;
        }
        for v in 0..n {
            if candidate[v] {
                cand_degree[v] = g.neighbors(v).iter().filter(|&&u| candidate[u]).count();
            }
        }
        loop {
            let pick = order
                .iter()
                .copied()
                .filter(|&v| candidate[v])
                .min_by_key(|&v| cand_degree[v]);
            let Some(v) = pick else { break };
            colors[v] = color;
            remaining -= 1;
            let mut removed = vec![v];
            removed.extend(g.neighbors(v).iter().copied().filter(|&u| candidate[u]));
            for &r in &removed {
                candidate[r] = false;
            }
            for &r in &removed {
                for &u in g.neighbors(r) {
                    if candidate[u] {
                        cand_degree[u] -= 1;
                    }
                }
            }
        }
        color += 1;
    }
    colors
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn triangle_and_forest_girth() {
        assert_eq!(girth(&ring(3)), Some(3));
        assert_eq!(girth(&ring(8)), Some(8));
        let path = SimpleGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(girth(&path), None);
    }

    #[test]
    fn ring_diameter() {
        for n in 3..12 {
            assert_eq!(diameter(&ring(n)), vec![n / 2]);
        }
        let two = SimpleGraph::from_edges(5, [(0, 1), (2, 3), (3, 4)]);
        assert_eq!(diameter(&two), vec![1, 2]);
    }

    #[test]
    fn cyclic_cayley_graph_is_a_ring() {
        let s = GroupSpec::new(9, 1, 1).unwrap();
        assert_eq!(cayley_graph(&s, &[s.x()], Side::Left).unwrap(), ring(9));
        assert_eq!(
            cayley_graph(&s, &[s.identity()], Side::Left),
            Err(GraphError::IdentityGenerator)
        );
    }

    #[test]
    fn abelian_cayley_graph_is_a_torus() {
        let s = GroupSpec::abelian(5, 4).unwrap();
        let g = cayley_graph(&s, &[s.x(), s.y()], Side::Left).unwrap();
        let torus = SimpleGraph::from_edges(
            20,
            (0..4).flat_map(|j| {
                (0..5).flat_map(move |i| [(j * 5 + i, j * 5 + (i + 1) % 5), (j * 5 + i, ((j + 1) % 4) * 5 + i)])
            }),
        );
        assert_eq!(g, torus);
    }

    #[test]
    fn ball_growth_saturates() {
        let g = ring(10);
        assert_eq!(ball_growth(&g, 0, 7).unwrap(), vec![1, 3, 5, 7, 9, 10, 10, 10]);
        assert!(ball_growth(&g, 10, 1).is_err());
    }

    #[test]
    fn edgeless_graph_needs_one_color() {
        let g = SimpleGraph::from_edges(5, []);
        for s in [ColoringStrategy::Sequential, ColoringStrategy::IndependentSet] {
            let c = greedy_coloring(&g, s, 0);
            assert_eq!(c.count, 1);
        }
    }

    #[test]
    fn colorings_are_proper() {
        let g = ring(7);
        for s in [ColoringStrategy::Sequential, ColoringStrategy::IndependentSet] {
            for seed in 0..5 {
                let c = greedy_coloring(&g, s, seed);
                assert!(c.is_proper(&g));
                assert_eq!(c.count, 3);
            }
        }
    }

    #[test]
    fn single_check_adjacency_is_triangle() {
        let h = crate::BitMatrix::from_dense(&[vec![1, 1, 1]]);
        let code = CssCode::from_checks("rep", crate::CodeFamily::Custom, h, crate::BitMatrix::zeros(0, 3)).unwrap();
        assert_eq!(qubit_adjacency(&code, CheckType::X), ring(3));
    }

    #[test]
    fn edge_list_format() {
        assert_eq!(ring(3).to_edge_list(), "3 3\n0 1\n0 2\n1 2\n");
    }
}
