//! Path-reporting spanners: an edge subset `S`, an oracle that reports paths
//! inside `S`, and a declared stretch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::io::{expect_arity, field, Lines};
use crate::graph::{canonical_path, dijkstra, edge_key, targeted_tree, EdgeOrigin, Graph, Path};
use crate::hopset::{Emulator, PreserverOracle};
use crate::ratio::Ratio;
use crate::reductions::Schedule;

/// Serialize maps keyed by vertex pairs as lists of entries.
pub(crate) mod pair_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, V: Serialize>(m: &BTreeMap<(usize, usize), V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, V: Deserialize<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), V>, D::Error> {
        let v: Vec<((usize, usize), V)> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(construction: &str, seed: Option<u64>) -> Self {
        Provenance {
            construction: construction.to_string(),
            params: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// Which pairs the oracle answers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    Pairs(Vec<(usize, usize)>),
    /// `A × A`.
    Subset(Vec<usize>),
    /// `A × V`.
    Sourcewise(Vec<usize>),
    All,
}

impl Support {
    pub fn contains(&self, u: usize, v: usize) -> bool {
        match self {
            Support::Pairs(p) => p.contains(&(u, v)) || p.contains(&(v, u)),
            Support::Subset(a) => a.binary_search(&u).is_ok() && a.binary_search(&v).is_ok(),
            Support::Sourcewise(a) => a.binary_search(&u).is_ok() || a.binary_search(&v).is_ok(),
            Support::All => true,
        }
    }
}

/// A walk in `G ∪ H` with an origin flag per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopPath {
    pub vertices: Vec<usize>,
    pub origins: Vec<EdgeOrigin>,
    pub weight: u64,
}

impl HopPath {
    pub fn hops(&self) -> usize {
        self.origins.len()
    }

    pub fn graph_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps()
            .filter(|s| s.2 == EdgeOrigin::Graph)
            .map(|s| edge_key(s.0, s.1))
    }

    pub fn shortcuts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps().filter(|s| s.2 == EdgeOrigin::Shortcut).map(|s| (s.0, s.1))
    }

    fn steps(&self) -> impl Iterator<Item = (usize, usize, EdgeOrigin)> + '_ {
        self.vertices
            .windows(2)
            .zip(&self.origins)
            .map(|(w, &o)| (w[0], w[1], o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrioritizedOracle {
    /// Vertex ids, highest priority first.
    pub ranking: Vec<usize>,
    pub position: Vec<usize>,
    pub schedule: Schedule,
    /// `thresholds[t] = f(first_index + t)` up to `f(T)`.
    pub thresholds: Vec<usize>,
    pub first_index: usize,
    /// `finv[j] = f⁻¹(j)` for `1 ≤ j ≤ f(T)`; entry 0 is unused.
    pub finv: Vec<usize>,
    /// Indexed like `thresholds`.
    pub prefixes: Vec<(Ratio, Oracle)>,
    pub catch_all: (Ratio, Box<Oracle>),
}

/// Which component answered a prioritized query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dispatch {
    /// Schedule index `i` (in the schedule's own numbering).
    Prefix(usize),
    CatchAll,
}

impl PrioritizedOracle {
    /// `(rank j of the higher-priority endpoint, 1-based; dispatch)`.
    pub fn dispatch(&self, u: usize, v: usize) -> (usize, Dispatch) {
        let j = self.position[u].min(self.position[v]) + 1;
        let top = *self.thresholds.last().unwrap_or(&0);
        if j <= top {
            (j, Dispatch::Prefix(self.finv[j]))
        } else {
            (j, Dispatch::CatchAll)
        }
    }

    fn stretch_for(&self, u: usize, v: usize) -> Ratio {
        match self.dispatch(u, v).1 {
            Dispatch::Prefix(i) => self.prefixes[i - self.first_index].0,
            Dispatch::CatchAll => self.catch_all.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Oracle {
    /// One stored shortest path per pair.
    Exact {
        #[serde(with = "pair_map")]
        paths: BTreeMap<(usize, usize), Vec<usize>>,
    },
    /// Stored hop paths; shortcuts are expanded by the preservers when they
    /// support the pair, else by `inner`.
    Composed {
        #[serde(with = "pair_map")]
        hop_paths: BTreeMap<(usize, usize), HopPath>,
        h1: Option<PreserverOracle>,
        h2: Option<PreserverOracle>,
        inner: Box<Oracle>,
    },
    /// Emulator query, each emulator edge expanded by `inner`.
    Subset {
        emulator: Emulator,
        inner: Box<Oracle>,
    },
    /// Forest walk to the nearest root, then a subset query.
    Sourcewise {
        roots: Vec<usize>,
        next: Vec<Option<usize>>,
        root_of: Vec<Option<usize>>,
        subset: Box<Oracle>,
    },
    Prioritized(Box<PrioritizedOracle>),
    /// Dijkstra inside the stored edge set.
    Subgraph {
        edges: BTreeSet<(usize, usize)>,
    },
}

impl Oracle {
    pub fn query(&self, g: &Graph, u: usize, v: usize) -> Result<Path> {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        match self {
            Oracle::Exact { paths } => {
                if let Some(p) = paths.get(&(u, v)) {
                    Path::in_graph(g, p.clone())
                } else if let Some(p) = paths.get(&(v, u)) {
                    Ok(Path::in_graph(g, p.clone())?.reversed())
                } else if u == v {
                    Ok(Path::trivial(u))
                } else {
                    Err(Error::Unsupported(u, v))
                }
            }
            Oracle::Composed {
                hop_paths,
                h1,
                h2,
                inner,
            } => {
                let (hp, rev) = match hop_paths.get(&(u, v)) {
                    Some(p) => (p, false),
                    None => (hop_paths.get(&(v, u)).ok_or(Error::Unsupported(u, v))?, true),
                };
                let mut out = Path::trivial(hp.vertices[0]);
                for (w, &o) in hp.vertices.windows(2).zip(&hp.origins) {
                    let (x, y) = (w[0], w[1]);
                    let leg = if o == EdgeOrigin::Graph {
                        Path::in_graph(g, vec![x, y])?
                    } else if let Some(pre) = h1.as_ref().filter(|p| p.supports(x, y)) {
                        pre.query(g, x, y)?
                    } else if let Some(pre) = h2.as_ref().filter(|p| p.supports(x, y)) {
                        pre.query(g, x, y)?
                    } else {
                        inner.query(g, x, y)?
                    };
                    out = out.concat(leg);
                }
                Ok(if rev { out.reversed() } else { out })
            }
            Oracle::Subset { emulator, inner } => {
                let walk = emulator.query(u, v)?;
                let mut out = Path::trivial(u);
                for w in walk.vertices().windows(2) {
                    out = out.concat(inner.query(g, w[0], w[1])?);
                }
                Ok(out)
            }
            Oracle::Sourcewise {
                roots,
                next,
                root_of,
                subset,
            } => {
                let (x, a, rev) = if roots.binary_search(&v).is_ok() {
                    (u, v, false)
                } else if roots.binary_search(&u).is_ok() {
                    (v, u, true)
                } else {
                    return Err(Error::Unsupported(u, v));
                };
                let r = root_of[x].ok_or(Error::Disconnected(u, v))?;
                let mut walk = vec![x];
                let mut cur = x;
                while let Some(p) = next[cur] {
                    walk.push(p);
                    cur = p;
                }
                debug_assert_eq!(cur, r);
                let mut out = Path::in_graph(g, walk)?;
                if r != a {
                    out = out.concat(subset.query(g, r, a)?);
                }
                Ok(if rev { out.reversed() } else { out })
            }
            Oracle::Prioritized(p) => {
                if u == v {
                    return Ok(Path::trivial(u));
                }
                let (hi, lo) = if p.position[u] <= p.position[v] { (u, v) } else { (v, u) };
                let path = match p.dispatch(u, v).1 {
                    Dispatch::Prefix(i) => p.prefixes[i - p.first_index].1.query(g, lo, hi)?,
                    Dispatch::CatchAll => p.catch_all.1.query(g, lo, hi)?,
                };
                Ok(if path.source() == u { path } else { path.reversed() })
            }
            Oracle::Subgraph { edges } => {
                let s = g.filter_edges(|e| edges.contains(&(e.u, e.v)));
                canonical_path(&dijkstra(&s, u)?, v).map_err(|_| Error::Disconnected(u, v))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpannerBundle {
    pub provenance: Provenance,
    pub stretch: Ratio,
    pub support: Support,
    edges: BTreeSet<(usize, usize)>,
    pub oracle: Oracle,
    /// Size accounting beyond `|S|`.
    pub stats: BTreeMap<String, u64>,
}

impl SpannerBundle {
    pub fn new(
        provenance: Provenance,
        stretch: Ratio,
        support: Support,
        edges: BTreeSet<(usize, usize)>,
        oracle: Oracle,
    ) -> Self {
        SpannerBundle {
            provenance,
            stretch,
            support,
            edges,
            oracle,
            stats: BTreeMap::new(),
        }
    }

    /// Every edge of `g` with the exact oracle.
    pub fn whole_graph(g: &Graph) -> Self {
        let edges: BTreeSet<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        SpannerBundle::new(
            Provenance::new("whole-graph", None),
            Ratio::ONE,
            Support::All,
            edges.clone(),
            Oracle::Subgraph { edges },
        )
    }

    /// An arbitrary edge subset answered by Dijkstra inside it.
    pub fn subgraph(edges: BTreeSet<(usize, usize)>, stretch: Ratio) -> Self {
        let oracle = Oracle::Subgraph { edges: edges.clone() };
        SpannerBundle::new(Provenance::new("subgraph", None), stretch, Support::All, edges, oracle)
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&edge_key(u, v))
    }

    /// Declared stretch for one pair; only prioritized bundles vary it.
    pub fn stretch_for(&self, u: usize, v: usize) -> Ratio {
        match &self.oracle {
            Oracle::Prioritized(p) => p.stretch_for(u, v),
            _ => self.stretch,
        }
    }

    pub fn query(&self, g: &Graph, u: usize, v: usize) -> Result<Path> {
        self.oracle.query(g, u, v)
    }

    pub fn to_text(&self, g: &Graph) -> Result<String> {
        let mut s = String::new();
        let r = self.stretch;
        writeln!(s, "spanner {}/{} {}", r.num(), r.den(), self.edges.len()).unwrap();
        for &(u, v) in &self.edges {
            let w = g
                .weight(u, v)
                .ok_or_else(|| Error::InvalidGraph(format!("spanner edge ({u}, {v}) is not in the graph")))?;
            writeln!(s, "{u} {v} {w}").unwrap();
        }
        writeln!(s, "oracle v1").unwrap();
        s.push_str(&serde_json::to_string_pretty(&Blob {
            provenance: &self.provenance,
            support: &self.support,
            stats: &self.stats,
            oracle: &self.oracle,
        })?);
        s.push('\n');
        Ok(s)
    }

    /// Parse and check every listed edge against `g`.
    pub fn parse(text: &str, g: &Graph) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (no, h) = lines.header("spanner")?;
        expect_arity(no, &h, 2, "spanner header")?;
        let stretch: Ratio = h[0]
            .parse()
            .map_err(|_| Error::parse(no, format!("bad stretch `{}`", h[0])))?;
        let m: usize = field(no, h.get(1), "m")?;
        let mut edges = BTreeSet::new();
        for _ in 0..m {
            let (no, line) = lines.expect("spanner edge")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            expect_arity(no, &t, 3, "spanner edge")?;
            let u: usize = field(no, t.first(), "u")?;
            let v: usize = field(no, t.get(1), "v")?;
            let w: u64 = field(no, t.get(2), "w")?;
            if u >= g.n() || v >= g.n() || g.weight(u, v) != Some(w) {
                return Err(Error::parse(no, format!("({u}, {v}, {w}) is not an edge of the graph")));
            }
            edges.insert(edge_key(u, v));
        }
        let (no, line) = lines.expect("`oracle v1`")?;
        if line != "oracle v1" {
            return Err(Error::parse(no, format!("expected `oracle v1`, found `{line}`")));
        }
        let offset: usize = text.lines().take(no).map(|l| l.len() + 1).sum();
        let blob: OwnedBlob = serde_json::from_str(text.get(offset..).unwrap_or(""))?;
        let mut b = SpannerBundle::new(blob.provenance, stretch, blob.support, edges, blob.oracle);
        b.stats = blob.stats;
        Ok(b)
    }
}

#[derive(Serialize)]
struct Blob<'a> {
    provenance: &'a Provenance,
    support: &'a Support,
    stats: &'a BTreeMap<String, u64>,
    oracle: &'a Oracle,
}

#[derive(Deserialize)]
struct OwnedBlob {
    provenance: Provenance,
    support: Support,
    stats: BTreeMap<String, u64>,
    oracle: Oracle,
}

/// Builds a path-reporting pairwise spanner for any pair list.
pub trait PairwiseBuilder: Sync {
    fn name(&self) -> &'static str;
    fn declared_stretch(&self) -> Ratio;
    fn build(&self, g: &Graph, pairs: &[(usize, usize)]) -> Result<SpannerBundle>;
}

/// Union of canonical shortest paths; stretch 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactPreserverBuilder;

impl PairwiseBuilder for ExactPreserverBuilder {
    fn name(&self) -> &'static str {
        "exact-preserver"
    }

    fn declared_stretch(&self) -> Ratio {
        Ratio::ONE
    }

    fn build(&self, g: &Graph, pairs: &[(usize, usize)]) -> Result<SpannerBundle> {
        exact_preserver(g, pairs)
    }
}

/// Unions the canonical shortest path of every pair. Disconnected pairs are
/// left unsupported and counted in `stats["unsupported"]`.
pub fn exact_preserver(g: &Graph, pairs: &[(usize, usize)]) -> Result<SpannerBundle> {
    use rayon::prelude::*;
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in pairs {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        by_source.entry(u).or_default().push(v);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    type Found = Vec<((usize, usize), Option<Vec<usize>>)>;
    let found: Vec<Found> = groups
        .par_iter()
        .map(|(s, targets)| {
            let tree = targeted_tree(g, *s, targets);
            targets.iter().map(|&t| ((*s, t), tree.path_to(t))).collect()
        })
        .collect();
    let mut paths = BTreeMap::new();
    let mut edges = BTreeSet::new();
    let mut unsupported = 0u64;
    for ((s, t), p) in found.into_iter().flatten() {
        match p {
            Some(p) => {
                for w in p.windows(2) {
                    edges.insert(edge_key(w[0], w[1]));
                }
                paths.insert((s, t), p);
            }
            None => unsupported += 1,
        }
    }
    let supported: Vec<(usize, usize)> = paths.keys().copied().collect();
    let mut b = SpannerBundle::new(
        Provenance::new("exact-preserver", None),
        Ratio::ONE,
        Support::Pairs(supported),
        edges,
        Oracle::Exact { paths },
    );
    b.stats.insert("unsupported".into(), unsupported);
    Ok(b)
}
