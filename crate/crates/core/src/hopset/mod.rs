//! Hopset assembled from pivot and bunch edges, split into `H1 ∪ H2 ∪ H3`,
//! with preservers for `H1` and `H2` and an exact hop-limited audit.

mod emulator;
mod preserver;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::io::{expect_arity, field, Lines};
use crate::graph::{dijkstra, edge_key, hop_limited, Graph, HopGraph, PairSet, INF};
use crate::hierarchy::{sample_hierarchy, Hierarchy, LevelParams};
use crate::ratio::Ratio;

pub use emulator::{Emulator, MetricRoute};
pub use preserver::{Pointers, PreserverOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tag {
    H1,
    H2,
    H3,
}

impl Tag {
    pub fn index(self) -> u8 {
        match self {
            Tag::H1 => 1,
            Tag::H2 => 2,
            Tag::H3 => 3,
        }
    }

    pub fn from_index(i: u8) -> Option<Tag> {
        match i {
            1 => Some(Tag::H1),
            2 => Some(Tag::H2),
            3 => Some(Tag::H3),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopEdge {
    pub u: usize,
    pub v: usize,
    pub w: u64,
    pub tag: Tag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hopset {
    pub params: LevelParams,
    /// Sorted by `(u, v)` with `u < v`.
    edges: Vec<HopEdge>,
}

/// `8c + 3`.
pub fn declared_stretch(c: usize) -> Ratio {
    Ratio::integer(8 * c as u64 + 3)
}

/// `(1 + 1/c)^F · (2c + 2)^{2⌊F/c⌋}` exactly.
pub fn hopbound_exact(c: usize, f: usize) -> BigRational {
    let c_big = BigUint::from(c);
    let num = BigUint::from(c + 1).pow(f as u32) * BigUint::from(2 * c + 2).pow(2 * (f / c) as u32);
    let den = c_big.pow(f as u32);
    BigRational::new(num.into(), den.into())
}

/// Declared hopbound rounded up.
pub fn declared_hopbound(c: usize, f: usize) -> u64 {
    hopbound_exact(c, f).ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

impl Hopset {
    pub fn new(params: LevelParams, mut edges: Vec<HopEdge>) -> Result<Self> {
        let mut best: BTreeMap<(usize, usize), HopEdge> = BTreeMap::new();
        for e in edges.drain(..) {
            if e.u == e.v {
                continue;
            }
            let (u, v) = edge_key(e.u, e.v);
            let e = HopEdge { u, v, ..e };
            match best.get(&(u, v)) {
                Some(old) if old.w != e.w => {
                    return Err(Error::InvalidGraph(format!(
                        "hopset edge ({u}, {v}) given weights {} and {}",
                        old.w, e.w
                    )))
                }
                Some(old) if old.tag <= e.tag => {}
                _ => {
                    best.insert((u, v), e);
                }
            }
        }
        Ok(Hopset {
            params,
            edges: best.into_values().collect(),
        })
    }

    pub fn edges(&self) -> &[HopEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn get(&self, u: usize, v: usize) -> Option<&HopEdge> {
        let key = edge_key(u, v);
        self.edges
            .binary_search_by_key(&key, |e| (e.u, e.v))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn count(&self, tag: Tag) -> usize {
        self.edges.iter().filter(|e| e.tag == tag).count()
    }

    pub fn declared_stretch(&self) -> Ratio {
        declared_stretch(self.params.c)
    }

    pub fn declared_hopbound(&self) -> u64 {
        declared_hopbound(self.params.c, self.params.levels)
    }

    pub fn hop_graph(&self, g: &Graph) -> Result<HopGraph> {
        HopGraph::new(g, self.edges.iter().map(|e| (e.u, e.v, e.w)))
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        writeln!(s, "hopset {} {} {} {} {}", p.k, p.c, p.levels, p.seed, self.len()).unwrap();
        writeln!(s, "# delta {}", p.delta).unwrap();
        for e in &self.edges {
            writeln!(s, "{} {} {} {}", e.u, e.v, e.w, e.tag.index()).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let delta = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("# delta "))
            .map(|d| d.parse::<Ratio>())
            .transpose()?;
        let mut lines = Lines::new(text);
        let (no, h) = lines.header("hopset")?;
        expect_arity(no, &h, 5, "hopset header")?;
        let k: usize = field(no, h.first(), "k")?;
        let c: usize = field(no, h.get(1), "c")?;
        let f: usize = field(no, h.get(2), "F")?;
        let seed: u64 = field(no, h.get(3), "seed")?;
        let count: usize = field(no, h.get(4), "count")?;
        let mut params = LevelParams::new(k, c, seed).map_err(|e| Error::parse(no, e.to_string()))?;
        if params.levels != f {
            return Err(Error::parse(no, format!("F = {f} does not match k = {k}, c = {c}")));
        }
        if let Some(d) = delta {
            params = params.with_delta(d)?;
        }
        let mut edges = Vec::with_capacity(count);
        for _ in 0..count {
            let (no, line) = lines.expect("hopset edge")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            expect_arity(no, &t, 4, "hopset edge")?;
            let tag: u8 = field(no, t.get(3), "tag")?;
            edges.push(HopEdge {
                u: field(no, t.first(), "u")?,
                v: field(no, t.get(1), "v")?,
                w: field(no, t.get(2), "w")?,
                tag: Tag::from_index(tag).ok_or_else(|| Error::parse(no, format!("tag {tag} not in 1..=3")))?,
            });
        }
        let hs = Hopset::new(params, edges)?;
        if hs.len() != count {
            return Err(Error::parse(no, "duplicate hopset edges"));
        }
        Ok(hs)
    }
}

/// Hopset plus the hierarchy it came from and the two preservers.
#[derive(Clone, Debug)]
pub struct HopsetBuild {
    pub hopset: Hopset,
    pub hierarchy: Hierarchy,
    pub h1: PreserverOracle,
    pub h2: PreserverOracle,
}

pub fn build_hopset(g: &Graph, k: usize, c: usize, seed: u64) -> Result<HopsetBuild> {
    build_hopset_with(g, &LevelParams::new(k, c, seed)?)
}

pub fn build_hopset_with(g: &Graph, params: &LevelParams) -> Result<HopsetBuild> {
    let h = sample_hierarchy(g, params)?;
    hopset_from_hierarchy(g, h)
}

pub fn hopset_from_hierarchy(g: &Graph, h: Hierarchy) -> Result<HopsetBuild> {
    let f = h.depth();
    let c = h.params.c;
    let mut edges = Vec::new();
    for i in 0..f {
        for u in 0..g.n() {
            if let Some((p, d)) = h.pivot(i, u) {
                edges.push(HopEdge {
                    u,
                    v: p,
                    w: d,
                    tag: Tag::H1,
                });
            }
        }
    }
    for j in 0..f {
        let tag = if j < c { Tag::H2 } else { Tag::H3 };
        for cl in h.clusters(j) {
            for (u, d) in h.cluster_members(cl) {
                edges.push(HopEdge {
                    u,
                    v: cl.center,
                    w: d,
                    tag,
                });
            }
        }
    }
    let hopset = Hopset::new(h.params.clone(), edges)?;
    let h1 = PreserverOracle::pivots(&h);
    let h2 = PreserverOracle::clusters(&h)?;
    Ok(HopsetBuild {
        hopset,
        hierarchy: h,
        h1,
        h2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopViolation {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
    pub dist: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopsetAudit {
    pub mode: AuditMode,
    pub pairs: usize,
    pub alpha: Ratio,
    pub beta: usize,
    /// Largest `d^{(β)} / d_G` over checked connected pairs.
    pub max_stretch: Ratio,
    /// Least hop budget at which every checked pair meets `alpha`, if any `≤ beta`.
    pub min_beta: Option<usize>,
    pub violations: Vec<HopViolation>,
}

/// Pairs up to this many vertices are enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 400;
pub const SAMPLED_PAIRS: usize = 10_000;

/// All pairs when `n ≤ 400`, else 10,000 seeded random pairs.
pub fn audit_pairs(n: usize, seed: u64) -> Result<(AuditMode, Vec<(usize, usize)>)> {
    if n <= EXHAUSTIVE_LIMIT {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Ok((AuditMode::Exhaustive, pairs))
    } else {
        let ps = PairSet::random(n, SAMPLED_PAIRS, seed)?;
        Ok((
            AuditMode::Sampled {
                count: SAMPLED_PAIRS,
                seed,
            },
            ps.into(),
        ))
    }
}

pub fn audit_hopset(g: &Graph, hs: &Hopset, alpha: Ratio, beta: usize, seed: u64) -> Result<HopsetAudit> {
    if alpha < Ratio::ONE {
        return Err(Error::param("alpha", format!("must be at least 1, got {alpha}")));
    }
    let (mode, pairs) = audit_pairs(g.n(), seed)?;
    let hg = hs.hop_graph(g)?;
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in &pairs {
        by_source.entry(u).or_default().push(v);
    }
    let sources: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    let per_source: Vec<(Ratio, usize, Vec<HopViolation>)> = sources
        .par_iter()
        .map(|(s, targets)| {
            let d = dijkstra(g, *s)?;
            let t = hop_limited(&hg, *s, beta)?;
            let mut worst = Ratio::ONE;
            let mut need = 0usize;
            let mut bad = Vec::new();
            for &v in targets {
                let dist = d.dist[v];
                if dist == INF {
                    continue;
                }
                let weight = t.dist(beta, v);
                worst = worst.max(Ratio::observed(weight, dist));
                if !alpha.admits(weight, dist) {
                    bad.push(HopViolation { u: *s, v, weight, dist });
                    need = usize::MAX;
                } else if need != usize::MAX {
                    let h = (0..=t.last_row().min(beta))
                        .find(|&h| alpha.admits(t.dist(h, v), dist))
                        .expect("row beta admits");
                    need = need.max(h);
                }
            }
            Ok((worst, need, bad))
        })
        .collect::<Result<_>>()?;
    let mut max_stretch = Ratio::ONE;
    let mut need = 0usize;
    let mut violations = Vec::new();
    for (w, n, b) in per_source {
        max_stretch = max_stretch.max(w);
        need = need.max(n);
        violations.extend(b);
    }
    Ok(HopsetAudit {
        mode,
        pairs: pairs.len(),
        alpha,
        beta,
        max_stretch,
        min_beta: (need != usize::MAX).then_some(need),
        violations,
    })
}
