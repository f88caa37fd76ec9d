//! Seeded instance generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{edge_key, girth, Graph};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Connected graph: random spanning tree plus uniform extra edges,
    /// weights uniform in `1..=max_weight`.
    Random {
        n: usize,
        m: usize,
        max_weight: u64,
    },
    /// Unit-weight grid.
    Grid {
        rows: usize,
        cols: usize,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Petersen,
    Heawood,
    /// Unit-weight `d`-regular graph, resampled until its girth exceeds
    /// `girth_above`.
    RandomRegular {
        n: usize,
        d: usize,
        girth_above: usize,
        retries: usize,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Random { .. } => "random",
            Family::Grid { .. } => "grid",
            Family::Path { .. } => "path",
            Family::Cycle { .. } => "cycle",
            Family::Complete { .. } => "complete",
            Family::Petersen => "petersen",
            Family::Heawood => "heawood",
            Family::RandomRegular { .. } => "regular",
        }
    }
}

pub fn generate(family: &Family, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *family {
        Family::Random { n, m, max_weight } => random_connected(n, m, max_weight, &mut rng),
        Family::Grid { rows, cols } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1), 1));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c), 1));
                    }
                }
            }
            Graph::new(rows * cols, edges)
        }
        Family::Path { n } => Graph::new(n, (1..n).map(|v| (v - 1, v, 1))),
        Family::Cycle { n } => {
            if n < 3 {
                return Err(Error::Generation(format!("cycle needs n >= 3, got {n}")));
            }
            Graph::new(n, (0..n).map(|v| (v, (v + 1) % n, 1)))
        }
        Family::Complete { n } => Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1)))),
        Family::Petersen => {
            let mut edges = Vec::new();
            for i in 0..5 {
                edges.push((i, (i + 1) % 5, 1));
                edges.push((i, i + 5, 1));
                edges.push((i + 5, (i + 2) % 5 + 5, 1));
            }
            Graph::new(10, edges)
        }
        Family::Heawood => {
            // LCF notation [5, -5]^7
            let mut edges: Vec<(usize, usize, u64)> = (0..14).map(|v| (v, (v + 1) % 14, 1)).collect();
            for v in (0..14).step_by(2) {
                edges.push((v, (v + 5) % 14, 1));
            }
            Graph::new(14, edges)
        }
        Family::RandomRegular {
            n,
            d,
            girth_above,
            retries,
        } => random_regular(n, d, girth_above, retries, &mut rng),
    }
}

fn random_connected(n: usize, m: usize, max_weight: u64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Generation("random graph needs n >= 1".into()));
    }
    let max_m = n * (n - 1) / 2;
    if m + 1 < n || m > max_m {
        return Err(Error::Generation(format!(
            "m = {m} outside [{}, {max_m}] for n = {n}",
            n - 1
        )));
    }
    if max_weight == 0 {
        return Err(Error::Generation("max_weight must be >= 1".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for i in 1..n {
        let u = order[i];
        let v = order[rng.gen_range(0..i)];
        seen.insert(edge_key(u, v));
        edges.push((u, v, rng.gen_range(1..=max_weight)));
    }
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert(edge_key(u, v)) {
            edges.push((u, v, rng.gen_range(1..=max_weight)));
        }
    }
    Graph::new(n, edges)
}

fn random_regular(n: usize, d: usize, girth_above: usize, retries: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::Generation(format!("no {d}-regular graph on {n} vertices")));
    }
    for _ in 0..retries.max(1) {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut seen = HashSet::new();
        let mut ok = true;
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert(edge_key(u, v)) {
                ok = false;
                break;
            }
            edges.push((u, v, 1));
        }
        if !ok {
            continue;
        }
        let g = Graph::new(n, edges)?;
        if girth(&g).is_none_or(|gi| gi > girth_above) {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no {d}-regular graph on {n} vertices with girth > {girth_above} after {retries} tries"
    )))
}
