//! Pairs at distance exactly `δ = ⌊k/(α+1)⌋` in a graph of girth above `k`,
//! and the random-subset coverage experiment.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{count_shortest_paths, edge_key, girth, Graph};
use crate::ratio::Ratio;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaPairInstance {
    pub graph: Graph,
    pub k: usize,
    pub alpha: Ratio,
    pub delta: usize,
    pub girth: Option<usize>,
    /// `(u, v)` with `u < v` at hop distance `δ`, with its unique path.
    pub pairs: Vec<((usize, usize), Vec<usize>)>,
    /// Number of pair paths through each edge.
    pub coverage: BTreeMap<(usize, usize), usize>,
}

/// `⌊k/(α+1)⌋`.
pub fn delta_of(k: usize, alpha: Ratio) -> Result<usize> {
    if alpha < Ratio::ONE || alpha.is_infinite() {
        return Err(Error::param(
            "alpha",
            format!("must be a finite ratio ≥ 1, got {alpha}"),
        ));
    }
    let top = k as u128 * alpha.den() as u128;
    let bottom = alpha.num() as u128 + alpha.den() as u128;
    if top < bottom {
        return Err(Error::param(
            "k",
            format!("must be at least alpha + 1, got k = {k}, alpha = {alpha}"),
        ));
    }
    Ok((top / bottom) as usize)
}

fn bfs_tree(g: &Graph, s: usize) -> (Vec<usize>, Vec<usize>) {
    let mut dist = vec![usize::MAX; g.n()];
    let mut parent = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                parent[y] = x;
                q.push_back(y);
            }
        }
    }
    (dist, parent)
}

/// Requires unit weights and girth above `k`.
pub fn delta_pairs(g: &Graph, k: usize, alpha: Ratio) -> Result<DeltaPairInstance> {
    if g.edges().iter().any(|e| e.w != 1) {
        return Err(Error::param("graph", "delta-pair hosts must be unweighted"));
    }
    let delta = delta_of(k, alpha)?;
    let gi = girth(g);
    if let Some(x) = gi {
        if x <= k {
            return Err(Error::GirthTooSmall {
                girth: x.to_string(),
                k,
            });
        }
    }
    let mut pairs = Vec::new();
    let mut coverage = BTreeMap::new();
    for u in 0..g.n() {
        let (dist, parent) = bfs_tree(g, u);
        let (_, count) = count_shortest_paths(g, u)?;
        for v in u + 1..g.n() {
            if dist[v] != delta {
                continue;
            }
            if count[v] != 1 {
                return Err(Error::Invariant(format!("pair ({u}, {v}) has several shortest paths")));
            }
            let mut path = vec![v];
            let mut x = v;
            while x != u {
                x = parent[x];
                path.push(x);
            }
            path.reverse();
            for w in path.windows(2) {
                *coverage.entry(edge_key(w[0], w[1])).or_insert(0) += 1;
            }
            pairs.push(((u, v), path));
        }
    }
    Ok(DeltaPairInstance {
        graph: g.clone(),
        k,
        alpha,
        delta,
        girth: gi,
        pairs,
        coverage,
    })
}

impl DeltaPairInstance {
    /// `d − 1` when every vertex has degree `d`.
    pub fn regular_p(&self) -> Option<usize> {
        let d = self.graph.degree(0);
        (self.graph.n() > 0 && (0..self.graph.n()).all(|v| self.graph.degree(v) == d) && d >= 1).then(|| d - 1)
    }

    /// `1/(δ·p^{δ−1})` on regular hosts; otherwise `1/(max coverage)`.
    pub fn sampling_probability(&self) -> Ratio {
        let per_edge = match self.regular_p() {
            Some(p) => self.delta as u64 * (p as u64).pow(self.delta as u32 - 1),
            None => self.coverage.values().copied().max().unwrap_or(1) as u64,
        };
        Ratio::new(1, per_edge.max(1))
    }

    /// Edges covered by the paths of the chosen pairs.
    pub fn covered(&self, chosen: &[usize]) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &i in chosen {
            for w in self.pairs[i].1.windows(2) {
                out.insert(edge_key(w[0], w[1]));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub seed: u64,
    pub probability: Ratio,
    /// Indices into the instance's pair list.
    pub sampled: Vec<usize>,
    pub covered: usize,
    pub edges: usize,
    /// `covered / |E|`.
    pub coverage: Ratio,
    /// `covered / |P|`; `None` when nothing was sampled.
    pub overhead: Option<Ratio>,
}

/// Keep each pair independently with [`DeltaPairInstance::sampling_probability`].
pub fn sample_and_cover(inst: &DeltaPairInstance, seed: u64) -> CoverReport {
    sample_and_cover_with(inst, inst.sampling_probability(), seed)
}

pub fn sample_and_cover_with(inst: &DeltaPairInstance, probability: Ratio, seed: u64) -> CoverReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = probability.to_f64();
    let sampled: Vec<usize> = (0..inst.pairs.len()).filter(|_| rng.gen::<f64>() < p).collect();
    let covered = inst.covered(&sampled).len();
    let edges = inst.graph.m();
    CoverReport {
        seed,
        probability,
        covered,
        edges,
        coverage: Ratio::new(covered as u64, edges.max(1) as u64),
        overhead: (!sampled.is_empty()).then(|| Ratio::new(covered as u64, sampled.len() as u64)),
        sampled,
    }
}

/// Removing any covered edge pushes some sampled pair beyond `α·δ` hops, so
/// every `α`-spanner for the sample keeps all covered edges. Returns the
/// first covered edge for which this fails.
pub fn forced_edges_witness(inst: &DeltaPairInstance, sampled: &[usize]) -> Option<(usize, usize)> {
    let mut first_cover: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &i in sampled {
        for w in inst.pairs[i].1.windows(2) {
            first_cover.entry(edge_key(w[0], w[1])).or_insert(i);
        }
    }
    first_cover.into_iter().find_map(|(e, i)| {
        let removed: HashSet<(usize, usize)> = [e].into();
        let h = inst.graph.filter_edges(|x| !removed.contains(&(x.u, x.v)));
        let ((u, v), _) = inst.pairs[i];
        let d = bfs_tree(&h, u).0[v];
        let within = d != usize::MAX && inst.alpha.admits(d as u64, inst.delta as u64);
        within.then_some(e)
    })
}
