//! Pairwise spanners from a hopset: route every pair through at most `β` hops
//! of `G ∪ H`, keep the graph edges, and hand the used shortcuts to an inner
//! pairwise spanner.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{dijkstra, edge_key, hop_limited, Graph, INF};
use crate::hierarchy::LevelParams;
use crate::hopset::{build_hopset_with, Hopset, HopsetBuild, PreserverOracle};
use crate::ratio::Ratio;
use crate::spanner::{HopPath, Oracle, PairwiseBuilder, Provenance, SpannerBundle, Support};

/// Minimum-weight walk with at most `beta` hops in `G ∪ H` for every pair.
/// Fails with [`Error::HopsetViolation`] when a walk exceeds the hopset's
/// declared stretch.
pub fn extract_hop_paths(
    g: &Graph,
    hopset: &Hopset,
    pairs: &[(usize, usize)],
    beta: usize,
) -> Result<BTreeMap<(usize, usize), HopPath>> {
    let hg = hopset.hop_graph(g)?;
    let alpha = hopset.declared_stretch();
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in pairs {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        by_source.entry(u).or_default().push(v);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    let found = groups
        .par_iter()
        .map(|(s, targets)| {
            let d = dijkstra(g, *s)?;
            let t = hop_limited(&hg, *s, beta)?;
            targets
                .iter()
                .map(|&v| {
                    if d.dist[v] == INF {
                        return Err(Error::Disconnected(*s, v));
                    }
                    let (path, origins) = t.path(&hg, beta, v)?;
                    if !alpha.admits(path.weight(), d.dist[v]) || origins.len() > beta {
                        return Err(Error::HopsetViolation {
                            u: *s,
                            v,
                            weight: path.weight(),
                            dist: d.dist[v],
                            hops: origins.len(),
                            stretch: alpha.to_string(),
                        });
                    }
                    let weight = path.weight();
                    Ok((
                        (*s, v),
                        HopPath {
                            vertices: path.vertices().to_vec(),
                            origins,
                            weight,
                        },
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().collect())
}

fn compose(
    g: &Graph,
    pairs: &[(usize, usize)],
    params: &LevelParams,
    inner: &dyn PairwiseBuilder,
    partitioned: bool,
) -> Result<SpannerBundle> {
    let HopsetBuild { hopset, h1, h2, .. } = build_hopset_with(g, params)?;
    let beta = hopset.declared_hopbound().try_into().unwrap_or(usize::MAX);
    let hop_paths = extract_hop_paths(g, &hopset, pairs, beta)?;

    let (h1, h2): (Option<PreserverOracle>, Option<PreserverOracle>) = if partitioned {
        (Some(h1), Some(h2))
    } else {
        (None, None)
    };
    let served = |x: usize, y: usize| h1.iter().chain(&h2).any(|p| p.supports(x, y));

    let mut edges = BTreeSet::new();
    let mut shortcut_pairs = BTreeSet::new();
    let mut graph_edge_count = 0u64;
    let mut max_hops = 0usize;
    for hp in hop_paths.values() {
        max_hops = max_hops.max(hp.hops());
        for e in hp.graph_edges() {
            edges.insert(e);
            graph_edge_count += 1;
        }
        for (x, y) in hp.shortcuts() {
            if !served(x, y) {
                shortcut_pairs.insert(edge_key(x, y));
            }
        }
    }
    let inner_pairs: Vec<(usize, usize)> = shortcut_pairs.into_iter().collect();
    let inner_bundle = inner.build(g, &inner_pairs)?;
    edges.extend(inner_bundle.edges().iter().copied());
    let mut preserver_edges = [0u64; 2];
    for (slot, p) in [&h1, &h2].into_iter().enumerate() {
        if let Some(p) = p {
            preserver_edges[slot] = p.edges().len() as u64;
            edges.extend(p.edges().iter().copied());
        }
    }

    let stretch = inner
        .declared_stretch()
        .checked_mul(&hopset.declared_stretch())
        .ok_or_else(|| Error::param("stretch", "declared stretch overflows"))?;
    let name = if partitioned { "compose-partitioned" } else { "compose" };
    let provenance = Provenance::new(name, Some(params.seed))
        .with("k", params.k)
        .with("c", params.c)
        .with("delta", params.delta)
        .with("levels", params.levels)
        .with("beta", beta)
        .with("inner", inner.name());
    let supported: Vec<(usize, usize)> = pairs.to_vec();
    let mut b = SpannerBundle::new(
        provenance,
        stretch,
        Support::Pairs(supported),
        edges,
        Oracle::Composed {
            hop_paths,
            h1,
            h2,
            inner: Box::new(inner_bundle.oracle.clone()),
        },
    );
    b.stats.insert("hopset_edges".into(), hopset.len() as u64);
    b.stats.insert("hop_path_graph_edges".into(), graph_edge_count);
    b.stats.insert("inner_pairs".into(), inner_pairs.len() as u64);
    b.stats.insert("inner_edges".into(), inner_bundle.size() as u64);
    b.stats.insert("max_hops".into(), max_hops as u64);
    if partitioned {
        b.stats.insert("h1_preserver_edges".into(), preserver_edges[0]);
        b.stats.insert("h2_preserver_edges".into(), preserver_edges[1]);
    }
    Ok(b)
}

/// Every used shortcut goes to `inner`; stretch `t·(8c+3)`.
pub fn compose_pairwise(
    g: &Graph,
    pairs: &[(usize, usize)],
    params: &LevelParams,
    inner: &dyn PairwiseBuilder,
) -> Result<SpannerBundle> {
    compose(g, pairs, params, inner, false)
}

/// Shortcuts tagged `H1`/`H2` are answered by the hopset's own preservers;
/// only `H3` shortcuts go to `inner`.
pub fn compose_pairwise_partitioned(
    g: &Graph,
    pairs: &[(usize, usize)],
    params: &LevelParams,
    inner: &dyn PairwiseBuilder,
) -> Result<SpannerBundle> {
    compose(g, pairs, params, inner, true)
}

/// [`PairwiseBuilder`] wrapper around the composition.
#[derive(Clone, Debug)]
pub struct ComposeBuilder<B> {
    pub params: LevelParams,
    pub inner: B,
    pub partitioned: bool,
}

impl<B: PairwiseBuilder> PairwiseBuilder for ComposeBuilder<B> {
    fn name(&self) -> &'static str {
        if self.partitioned {
            "compose-partitioned"
        } else {
            "compose"
        }
    }

    fn declared_stretch(&self) -> Ratio {
        self.inner
            .declared_stretch()
            .checked_mul(&crate::hopset::declared_stretch(self.params.c))
            .unwrap_or(Ratio::INFINITY)
    }

    fn build(&self, g: &Graph, pairs: &[(usize, usize)]) -> Result<SpannerBundle> {
        compose(g, pairs, &self.params, &self.inner, self.partitioned)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, PairSet};
    use crate::hopset::Tag;
    use crate::spanner::ExactPreserverBuilder;

    fn graph(n: usize, seed: u64) -> Graph {
        generate(
            &Family::Random {
                n,
                m: 4 * n,
                max_weight: 100,
            },
            seed,
        )
        .unwrap()
    }

    fn params(seed: u64) -> LevelParams {
        LevelParams::new(4, 2, seed)
            .unwrap()
            .with_delta(Ratio::new(1, 2))
            .unwrap()
    }

    fn check(g: &Graph, b: &SpannerBundle, pairs: &[(usize, usize)]) -> Ratio {
        let mut worst = Ratio::ONE;
        for &(u, v) in pairs {
            let p = b.query(g, u, v).unwrap();
            assert_eq!((p.source(), p.target()), (u, v));
            assert!(p.edge_keys().all(|k| b.edges().contains(&k)), "edge outside S");
            let d = dijkstra(g, u).unwrap().dist[v];
            assert!(b.stretch.admits(p.weight(), d));
            worst = worst.max(Ratio::observed(p.weight(), d));
        }
        worst
    }

    #[test]
    fn adjacent_pairs_use_their_edge() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)]).unwrap();
        let b = compose_pairwise(&g, &[(0, 1), (1, 2)], &params(0), &ExactPreserverBuilder).unwrap();
        assert_eq!(b.query(&g, 0, 1).unwrap().weight(), 1);
        assert_eq!(b.query(&g, 2, 1).unwrap().vertices(), &[2, 1]);
    }

    #[test]
    fn stretch_within_declared() {
        let g = graph(200, 3);
        let pairs = PairSet::random(200, 500, 9).unwrap();
        for partitioned in [false, true] {
            let p = params(5);
            let b = compose(&g, pairs.as_slice(), &p, &ExactPreserverBuilder, partitioned).unwrap();
            assert_eq!(b.stretch, Ratio::integer(19));
            check(&g, &b, pairs.as_slice());
            assert!(b.stats["max_hops"] <= 6561);
        }
    }

    #[test]
    fn hop_paths_respect_bounds() {
        let g = graph(200, 4);
        let build = build_hopset_with(&g, &params(2)).unwrap();
        let pairs = PairSet::random(200, 500, 1).unwrap();
        let paths = extract_hop_paths(&g, &build.hopset, pairs.as_slice(), 6561).unwrap();
        for (&(u, v), hp) in &paths {
            let d = dijkstra(&g, u).unwrap().dist[v];
            assert!(hp.hops() <= 6561);
            assert!(Ratio::integer(19).admits(hp.weight, d));
        }
        // a hopset edge as a pair is at most one hop
        let e = build.hopset.edges()[0];
        let one = extract_hop_paths(&g, &build.hopset, &[(e.u, e.v)], 6561).unwrap();
        assert!(one[&(e.u, e.v)].hops() <= 1);
    }

    #[test]
    fn partition_feeds_only_h3() {
        let g = graph(200, 6);
        let pairs = PairSet::random(200, 300, 2).unwrap();
        let p = params(3);
        let b = compose_pairwise_partitioned(&g, pairs.as_slice(), &p, &ExactPreserverBuilder).unwrap();
        let build = build_hopset_with(&g, &p).unwrap();
        assert!(b.stats["inner_pairs"] <= build.hopset.count(Tag::H3) as u64);
        assert!(build.h1.edges().is_subset(b.edges()));
        assert!(build.h2.edges().is_subset(b.edges()));
        let full = compose_pairwise(&g, pairs.as_slice(), &p, &ExactPreserverBuilder).unwrap();
        assert!(b.stats["inner_pairs"] <= full.stats["inner_pairs"]);
    }

    #[test]
    fn no_h3_when_levels_within_c() {
        // k = 2, c = 2 gives F = 2 levels, all below c
        let g = graph(150, 1);
        let p = LevelParams::new(2, 2, 0).unwrap().with_delta(Ratio::new(1, 2)).unwrap();
        assert!(p.levels <= 2);
        let pairs = PairSet::random(150, 200, 0).unwrap();
        let b = compose_pairwise_partitioned(&g, pairs.as_slice(), &p, &ExactPreserverBuilder).unwrap();
        assert_eq!(b.stats["inner_pairs"], 0);
        assert_eq!(b.stretch, Ratio::integer(19));
        check(&g, &b, pairs.as_slice());
    }

    #[test]
    fn deterministic() {
        let g = graph(120, 2);
        let pairs = PairSet::random(120, 100, 4).unwrap();
        let a = compose_pairwise(&g, pairs.as_slice(), &params(1), &ExactPreserverBuilder).unwrap();
        let b = compose_pairwise(&g, pairs.as_slice(), &params(1), &ExactPreserverBuilder).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(&g).unwrap(), b.to_text(&g).unwrap());
        let back = SpannerBundle::parse(&a.to_text(&g).unwrap(), &g).unwrap();
        for &(u, v) in pairs.as_slice() {
            assert_eq!(back.query(&g, u, v).unwrap(), a.query(&g, u, v).unwrap());
        }
    }
}
