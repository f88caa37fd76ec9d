//! Undirected weighted graphs, paths and pair sets, plus the exact
//! shortest-path kernels every construction is audited against.

mod generate;
mod girth;
mod hops;
pub mod io;
mod shortest;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate, Family};
pub use girth::girth;
pub use hops::{hop_limited, EdgeOrigin, HopGraph, HopTable};
pub use shortest::{bfs_hops, canonical_path, count_shortest_paths, dijkstra, multi_source_forest, DistanceTree};
pub(crate) use shortest::{bounded_tree, targeted_tree};

/// Distance sentinel for unreachable vertices. Sums saturate at it.
pub const INF: u64 = u64::MAX;
/// Largest admissible edge weight; with `MAX_VERTICES` every simple path fits in 64 bits.
pub const MAX_WEIGHT: u64 = 1 << 40;
pub const MAX_VERTICES: usize = 1 << 20;

/// Unordered edge key with the smaller endpoint first.
#[inline]
pub fn edge_key(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: u64,
}

/// Immutable simple undirected graph with non-negative integer weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, u64)>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "{n} vertices exceeds the limit {MAX_VERTICES}"
            )));
        }
        let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if w > MAX_WEIGHT {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) weight {w} exceeds {MAX_WEIGHT}"
                )));
            }
            let (a, b) = edge_key(u, v);
            list.push(Edge { u: a, v: b, w });
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for (x, nbrs) in adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(pair) = nbrs.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({x}, {})", pair[0].0)));
            }
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` sorted by id.
    pub fn neighbors(&self, v: usize) -> &[(usize, u64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        let nbrs = self.adj.get(u)?;
        nbrs.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| nbrs[i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v).is_some()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Same vertex set, keeping only the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(&Edge) -> bool) -> Graph {
        let kept: Vec<_> = self.edges.iter().filter(|e| keep(e)).map(|e| (e.u, e.v, e.w)).collect();
        Graph::new(self.n, kept).expect("subgraph of a valid graph is valid")
    }
}

/// A walk in a host graph: consecutive vertices are adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    vertices: Vec<usize>,
    weight: u64,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path {
            vertices: vec![v],
            weight: 0,
        }
    }

    /// Build a path over `g`, checking every step is an edge.
    pub fn in_graph(g: &Graph, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("empty vertex sequence".into()));
        }
        let mut weight = 0u64;
        for w in vertices.windows(2) {
            let ew = g
                .weight(w[0], w[1])
                .ok_or_else(|| Error::InvalidGraph(format!("({}, {}) is not an edge", w[0], w[1])))?;
            weight = weight.saturating_add(ew);
        }
        Ok(Path { vertices, weight })
    }

    pub(crate) fn from_parts(vertices: Vec<usize>, weight: u64) -> Self {
        debug_assert!(!vertices.is_empty());
        Path { vertices, weight }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    /// Number of edges, `|P|`.
    pub fn hops(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn source(&self) -> usize {
        self.vertices[0]
    }

    pub fn target(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn reversed(mut self) -> Self {
        self.vertices.reverse();
        self
    }

    /// Append `other`, which must start where `self` ends.
    pub fn concat(mut self, other: Path) -> Self {
        assert_eq!(self.target(), other.source(), "paths do not meet");
        self.vertices.extend_from_slice(&other.vertices[1..]);
        self.weight = self.weight.saturating_add(other.weight);
        self
    }

    pub fn edge_keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| edge_key(w[0], w[1]))
    }
}

/// Ordered list of query pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSet {
    pairs: Vec<(usize, usize)>,
}

impl PairSet {
    /// Validate ids and reject `u == v`; duplicates only when `allow_duplicates`.
    pub fn new(n: usize, pairs: Vec<(usize, usize)>, allow_duplicates: bool) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &pairs {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::param("pairs", format!("pair ({u}, {u}) repeats a vertex")));
            }
            if !allow_duplicates && !seen.insert(edge_key(u, v)) {
                return Err(Error::param("pairs", format!("duplicate pair ({u}, {v})")));
            }
        }
        Ok(PairSet { pairs })
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `count` distinct random pairs, seeded.
    pub fn random(n: usize, count: usize, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let max = n * n.saturating_sub(1) / 2;
        if count > max {
            return Err(Error::param(
                "pairs",
                format!("{count} distinct pairs requested but only {max} exist"),
            ));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::HashSet::new();
        let mut pairs = Vec::with_capacity(count);
        while pairs.len() < count {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && seen.insert(edge_key(u, v)) {
                pairs.push((u, v));
            }
        }
        Ok(PairSet { pairs })
    }
}

impl From<PairSet> for Vec<(usize, usize)> {
    fn from(p: PairSet) -> Self {
        p.pairs
    }
}

/// `size` distinct vertices of `0..n`, sorted, seeded.
pub fn sample_vertices(n: usize, size: usize, seed: u64) -> Vec<usize> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = rand::seq::index::sample(&mut rng, n, size.min(n)).into_vec();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(
            Graph::new(2, [(0, 2, 1)]),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(Graph::new(2, [(1, 1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 1, 1), (1, 0, 2)]).is_err());
        assert!(Graph::new(2, [(0, 1, MAX_WEIGHT + 1)]).is_err());
        assert!(Graph::new(2, [(0, 1, MAX_WEIGHT)]).is_ok());
    }

    #[test]
    fn path_validation() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 2)]).unwrap();
        let p = Path::in_graph(&g, vec![0, 1, 2]).unwrap();
        assert_eq!(p.weight(), 3);
        assert_eq!(p.hops(), 2);
        assert!(Path::in_graph(&g, vec![0, 2]).is_err());
        let back = p.clone().reversed();
        assert_eq!(back.vertices(), &[2, 1, 0]);
        let walk = p.concat(back);
        assert_eq!(walk.weight(), 6);
        assert_eq!(walk.hops(), 4);
    }

    #[test]
    fn pair_set_rules() {
        assert!(PairSet::new(3, vec![(0, 0)], false).is_err());
        assert!(PairSet::new(3, vec![(0, 1), (1, 0)], false).is_err());
        assert!(PairSet::new(3, vec![(0, 1), (1, 0)], true).is_ok());
        assert!(PairSet::new(3, vec![(0, 3)], true).is_err());
        let r = PairSet::random(10, 45, 7).unwrap();
        assert_eq!(r.len(), 45);
        assert!(PairSet::random(10, 46, 7).is_err());
        assert_eq!(r, PairSet::random(10, 45, 7).unwrap());
    }
}
