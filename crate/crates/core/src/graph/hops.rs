//! Hop-bounded distances in `G ∪ H` (Bellman–Ford rounds).

use serde::{Deserialize, Serialize};

use super::{Graph, Path, INF};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeOrigin {
    Graph,
    Shortcut,
}

/// Graph plus weighted shortcut edges. Parallel edges collapse to the lighter
/// one; on equal weight the graph edge wins.
#[derive(Clone, Debug)]
pub struct HopGraph {
    adj: Vec<Vec<(usize, u64, EdgeOrigin)>>,
}

impl HopGraph {
    pub fn new(g: &Graph, shortcuts: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let n = g.n();
        let mut adj: Vec<Vec<(usize, u64, EdgeOrigin)>> = (0..n)
            .map(|v| g.neighbors(v).iter().map(|&(x, w)| (x, w, EdgeOrigin::Graph)).collect())
            .collect();
        for (u, v, w) in shortcuts {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                continue;
            }
            adj[u].push((v, w, EdgeOrigin::Shortcut));
            adj[v].push((u, w, EdgeOrigin::Shortcut));
        }
        for nbrs in &mut adj {
            // graph edges sort before shortcuts of equal weight
            nbrs.sort_unstable_by_key(|&(x, w, o)| (x, w, o == EdgeOrigin::Shortcut));
            nbrs.dedup_by_key(|e| e.0);
        }
        Ok(HopGraph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, u64, EdgeOrigin)] {
        &self.adj[v]
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<(u64, EdgeOrigin)> {
        let nbrs = &self.adj[u];
        nbrs.binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| (nbrs[i].1, nbrs[i].2))
    }
}

const NO_PRED: u32 = u32::MAX;

/// `d^(h)[v]` for `h = 0..=β` from one source.
///
/// Rows are only materialized until they stop changing; later rows equal the
/// last one.
#[derive(Clone, Debug)]
pub struct HopTable {
    source: usize,
    beta: usize,
    rows: Vec<Vec<u64>>,
    /// `via[h][v]`: predecessor when row `h` improved `v`, else `NO_PRED`.
    via: Vec<Vec<u32>>,
    converged: bool,
}

impl HopTable {
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// True once further hops cannot change any distance.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Number of materialized rows minus one.
    pub fn last_row(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn dist(&self, h: usize, v: usize) -> u64 {
        assert!(h <= self.beta, "hop {h} beyond budget {}", self.beta);
        self.rows[h.min(self.rows.len() - 1)][v]
    }

    /// Row for hop budget `h`.
    pub fn row(&self, h: usize) -> &[u64] {
        &self.rows[h.min(self.rows.len() - 1)]
    }

    /// Minimum-weight walk to `v` with at most `h` hops, in `hg`.
    pub fn path(&self, hg: &HopGraph, h: usize, v: usize) -> Result<(Path, Vec<EdgeOrigin>)> {
        if self.dist(h, v) == INF {
            return Err(Error::Unreachable(v));
        }
        let mut h = h.min(self.rows.len() - 1);
        let mut x = v;
        let mut rev = vec![v];
        let mut origins = Vec::new();
        while x != self.source || self.rows[h][x] != 0 {
            while self.via[h][x] == NO_PRED {
                debug_assert!(h > 0);
                h -= 1;
            }
            let p = self.via[h][x] as usize;
            let (_, origin) = hg.edge(p, x).expect("predecessor is adjacent");
            origins.push(origin);
            rev.push(p);
            x = p;
            h -= 1;
        }
        rev.reverse();
        origins.reverse();
        let weight = walk_weight(hg, &rev);
        Ok((Path::from_parts(rev, weight), origins))
    }
}

fn walk_weight(hg: &HopGraph, vs: &[usize]) -> u64 {
    vs.windows(2)
        .map(|w| hg.edge(w[0], w[1]).expect("walk uses edges").0)
        .fold(0u64, |a, b| a.saturating_add(b))
}

/// Hop-limited distances from `s` with budget `beta`. Ties keep the smaller
/// hop count, then the smaller predecessor id.
pub fn hop_limited(hg: &HopGraph, s: usize, beta: usize) -> Result<HopTable> {
    let n = hg.n();
    if s >= n {
        return Err(Error::VertexOutOfRange { vertex: s, n });
    }
    let mut row = vec![INF; n];
    row[s] = 0;
    let mut rows = vec![row];
    let mut via = vec![vec![NO_PRED; n]];
    let mut converged = n == 1;
    for _ in 0..beta {
        let prev = rows.last().unwrap();
        let mut next = prev.clone();
        let mut pred = vec![NO_PRED; n];
        let mut changed = false;
        for v in 0..n {
            let mut best = prev[v];
            let mut best_pred = NO_PRED;
            for &(x, w, _) in hg.neighbors(v) {
                if prev[x] == INF {
                    continue;
                }
                let cand = prev[x].saturating_add(w);
                // neighbors are sorted by id, so strict `<` keeps the smallest id
                if cand < best {
                    best = cand;
                    best_pred = x as u32;
                }
            }
            if best_pred != NO_PRED {
                next[v] = best;
                pred[v] = best_pred;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
        rows.push(next);
        via.push(pred);
    }
    if !converged && rows.len() - 1 < beta {
        converged = true;
    }
    Ok(HopTable {
        source: s,
        beta,
        rows,
        via,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dijkstra, generate, Family};

    #[test]
    fn zero_budget_reaches_only_source() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let hg = HopGraph::new(&g, []).unwrap();
        let t = hop_limited(&hg, 0, 0).unwrap();
        assert_eq!(t.row(0), &[0, INF, INF]);
    }

    #[test]
    fn triangle_with_heavy_direct_edge() {
        // u = 0, x = 1, v = 2
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)]).unwrap();
        let hg = HopGraph::new(&g, []).unwrap();
        let t = hop_limited(&hg, 0, 2).unwrap();
        assert_eq!(t.dist(1, 2), 5);
        assert_eq!(t.dist(2, 2), 2);
        let (p1, _) = t.path(&hg, 1, 2).unwrap();
        assert_eq!(p1.vertices(), &[0, 2]);
        let (p2, _) = t.path(&hg, 2, 2).unwrap();
        assert_eq!(p2.vertices(), &[0, 1, 2]);
        assert_eq!(p2.weight(), 2);
    }

    #[test]
    fn full_budget_equals_dijkstra() {
        for seed in 0..3 {
            let g = generate(
                &Family::Random {
                    n: 40,
                    m: 90,
                    max_weight: 20,
                },
                seed,
            )
            .unwrap();
            let hg = HopGraph::new(&g, []).unwrap();
            for s in [0, 7, 39] {
                let t = hop_limited(&hg, s, g.n() - 1).unwrap();
                let d = dijkstra(&g, s).unwrap();
                assert_eq!(t.row(g.n() - 1), d.dist.as_slice());
                for v in 0..g.n() {
                    let (p, _) = t.path(&hg, g.n() - 1, v).unwrap();
                    assert_eq!(p.weight(), d.dist[v]);
                }
            }
        }
    }

    #[test]
    fn rows_are_monotone_and_paths_respect_budget() {
        let g = generate(
            &Family::Random {
                n: 30,
                m: 60,
                max_weight: 9,
            },
            11,
        )
        .unwrap();
        let hg = HopGraph::new(&g, [(0, 29, 100), (3, 17, 2)]).unwrap();
        let t = hop_limited(&hg, 0, 29).unwrap();
        for h in 1..=29 {
            for v in 0..30 {
                assert!(t.dist(h, v) <= t.dist(h - 1, v));
                if t.dist(h, v) != INF {
                    let (p, o) = t.path(&hg, h, v).unwrap();
                    assert!(p.hops() <= h);
                    assert_eq!(p.weight(), t.dist(h, v));
                    assert_eq!(o.len(), p.hops());
                }
            }
        }
    }

    #[test]
    fn shortcut_marks_origin() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let hg = HopGraph::new(&g, [(0, 2, 2)]).unwrap();
        let t = hop_limited(&hg, 0, 1).unwrap();
        let (p, o) = t.path(&hg, 1, 2).unwrap();
        assert_eq!(p.vertices(), &[0, 2]);
        assert_eq!(o, vec![EdgeOrigin::Shortcut]);
        // equal-weight graph edge beats the shortcut
        let hg = HopGraph::new(&g, [(0, 1, 1)]).unwrap();
        assert_eq!(hg.edge(0, 1), Some((1, EdgeOrigin::Graph)));
    }
}
