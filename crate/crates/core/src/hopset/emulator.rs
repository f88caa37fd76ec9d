//! Thorup–Zwick `(2k−1)`-emulator over the metric induced on a vertex subset.
//!
//! The dense route takes an explicit distance matrix. The graph route never
//! materializes it: pivots come from multi-source forests and bunches from
//! truncated cluster growth in the host graph. Both share one sampling stream
//! and produce identical emulators.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bounded_tree, edge_key, multi_source_forest, Graph, Path, INF};
use crate::ratio::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricRoute {
    Dense,
    Graph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emulator {
    /// Sorted vertex ids of `A`.
    points: Vec<usize>,
    requested_k: usize,
    /// Number of nonempty levels.
    k: usize,
    seed: u64,
    /// `pivots[i][a] = (p_i(a), d(a, p_i(a)))` by point index.
    pivots: Vec<Vec<Option<(usize, u64)>>>,
    /// `bunches[a]` sorted by vertex id.
    bunches: Vec<Vec<(usize, u64)>>,
}

/// Levels over point indices; the last returned level is nonempty.
fn sample_levels(size: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (size as f64).powf(-1.0 / k as f64);
    let mut levels = vec![(0..size).collect::<Vec<_>>()];
    for _ in 1..k {
        let next: Vec<usize> = levels
            .last()
            .unwrap()
            .iter()
            .copied()
            .filter(|_| rng.gen::<f64>() < p)
            .collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

/// Top-down pivots: `p_i(a) = p_{i+1}(a)` whenever `d(a, A_i) = d(a, A_{i+1})`.
fn pivots_top_down(nearest: &[Vec<Option<(usize, u64)>>]) -> Vec<Vec<Option<(usize, u64)>>> {
    let mut out = nearest.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        for a in 0..out[i].len() {
            if let (Some((_, d)), Some(up)) = (out[i][a], out[i + 1][a]) {
                if up.1 == d {
                    out[i][a] = Some(up);
                }
            }
        }
    }
    out
}

fn check_points(points: &[usize], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::param("k_em", "must be at least 1"));
    }
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() {
        return Err(Error::param("A", "point set is empty"));
    }
    Ok(pts)
}

impl Emulator {
    /// `metric[a][b]` indexed by position in `points`, which must be sorted.
    pub fn build_dense(points: &[usize], metric: &[Vec<u64>], k: usize, seed: u64) -> Result<Self> {
        let pts = check_points(points, k)?;
        if pts.as_slice() != points || metric.len() != pts.len() || metric.iter().any(|r| r.len() != pts.len()) {
            return Err(Error::param(
                "metric",
                "must be a square matrix over sorted distinct points",
            ));
        }
        let size = pts.len();
        let levels = sample_levels(size, k, seed);
        let depth = levels.len();
        let nearest: Vec<Vec<Option<(usize, u64)>>> = levels
            .iter()
            .map(|lvl| {
                (0..size)
                    .map(|a| {
                        lvl.iter()
                            .map(|&b| (metric[a][b], b))
                            .min()
                            .filter(|&(d, _)| d != INF)
                            .map(|(d, b)| (pts[b], d))
                    })
                    .collect()
            })
            .collect();
        let in_level = level_ranks(size, &levels);
        let bunches = (0..size)
            .map(|a| {
                let mut b: Vec<(usize, u64)> = (0..size)
                    .filter_map(|w| {
                        let i = in_level[w];
                        let thr = nearest.get(i + 1).and_then(|l| l[a]).map_or(INF, |x| x.1);
                        (metric[a][w] < thr).then_some((pts[w], metric[a][w]))
                    })
                    .collect();
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Emulator {
            points: pts,
            requested_k: k,
            k: depth,
            seed,
            pivots: pivots_top_down(&nearest),
            bunches,
        })
    }

    /// Emulator over `d_G` restricted to `points`.
    pub fn build_graph(g: &Graph, points: &[usize], k: usize, seed: u64) -> Result<Self> {
        let pts = check_points(points, k)?;
        for &p in &pts {
            g.check_vertex(p)?;
        }
        let size = pts.len();
        let levels = sample_levels(size, k, seed);
        let depth = levels.len();
        let forests = levels
            .par_iter()
            .map(|lvl| {
                let roots: Vec<usize> = lvl.iter().map(|&b| pts[b]).collect();
                multi_source_forest(g, &roots)
            })
            .collect::<Result<Vec<_>>>()?;
        let nearest: Vec<Vec<Option<(usize, u64)>>> = forests
            .iter()
            .map(|t| pts.iter().map(|&x| t.root[x].map(|r| (r, t.dist[x]))).collect())
            .collect();
        let in_level = level_ranks(size, &levels);
        let grown: Vec<Vec<(usize, usize, u64)>> = (0..size)
            .into_par_iter()
            .map(|w| {
                let i = in_level[w];
                let upper = forests.get(i + 1);
                let tree = bounded_tree(g, pts[w], |x, d| d < upper.map_or(INF, |t| t.dist[x]));
                tree.dist
                    .iter()
                    .filter_map(|(&x, &d)| pts.binary_search(&x).ok().map(|a| (a, pts[w], d)))
                    .collect()
            })
            .collect();
        let mut bunches = vec![Vec::new(); size];
        for list in grown {
            for (a, w, d) in list {
                bunches[a].push((w, d));
            }
        }
        for b in &mut bunches {
            b.sort_unstable();
        }
        Ok(Emulator {
            points: pts,
            requested_k: k,
            k: depth,
            seed,
            pivots: pivots_top_down(&nearest),
            bunches,
        })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// Levels actually populated; at most the requested `k`.
    pub fn effective_k(&self) -> usize {
        self.k
    }

    pub fn requested_k(&self) -> usize {
        self.requested_k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `2k − 1` for the requested `k`.
    pub fn declared_stretch(&self) -> Ratio {
        Ratio::integer(2 * self.requested_k as u64 - 1)
    }

    fn index(&self, v: usize) -> Result<usize> {
        self.points
            .binary_search(&v)
            .map_err(|_| Error::param("pair", format!("vertex {v} is not in A")))
    }

    pub fn bunch(&self, v: usize) -> Result<&[(usize, u64)]> {
        Ok(&self.bunches[self.index(v)?])
    }

    fn bunch_dist(&self, a: usize, w: usize) -> Option<u64> {
        let b = &self.bunches[a];
        b.binary_search_by_key(&w, |x| x.0).ok().map(|i| b[i].1)
    }

    /// Emulator edges `(a, w, d)` with `w ∈ B(a)`, `a < w`, deduplicated.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut set = BTreeSet::new();
        for (a, b) in self.bunches.iter().enumerate() {
            for &(w, d) in b {
                if w != self.points[a] {
                    let (x, y) = edge_key(self.points[a], w);
                    set.insert((x, y, d));
                }
            }
        }
        set.into_iter().collect()
    }

    /// Pivot-swapping query: a walk `u – w – v` of at most two emulator edges.
    pub fn query(&self, u: usize, v: usize) -> Result<Path> {
        let (ia, ib) = (self.index(u)?, self.index(v)?);
        if u == v {
            return Ok(Path::trivial(u));
        }
        let (mut a, mut b) = (ia, ib);
        let mut i = 0;
        let mut w = self.pivots[0][a].ok_or(Error::Disconnected(u, v))?;
        loop {
            if let Some(dbw) = self.bunch_dist(b, w.0) {
                let total = w.1.saturating_add(dbw);
                // walk runs a → w → b; orient it u → v
                let mut vs = vec![self.points[a], w.0, self.points[b]];
                if a != ia {
                    vs.reverse();
                }
                vs.dedup();
                return Ok(Path::from_parts(vs, total));
            }
            i += 1;
            if i >= self.k {
                return Err(Error::Disconnected(u, v));
            }
            std::mem::swap(&mut a, &mut b);
            w = self.pivots[i][a].ok_or(Error::Disconnected(u, v))?;
        }
    }
}

fn level_ranks(size: usize, levels: &[Vec<usize>]) -> Vec<usize> {
    let mut rank = vec![0; size];
    for (i, lvl) in levels.iter().enumerate() {
        for &a in lvl {
            rank[a] = i;
        }
    }
    rank
}
