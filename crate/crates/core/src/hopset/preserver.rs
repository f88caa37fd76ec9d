//! Pointer-based path-reporting preservers for the pivot edges (H1) and the
//! low-level bunch edges (H2).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_key, Graph, Path};
use crate::hierarchy::Hierarchy;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pointers {
    /// Per level `i`: `next[i][u] = q_i(u)` and `pivot[i][u] = p_i(u)`.
    Pivot {
        next: Vec<Vec<Option<usize>>>,
        pivot: Vec<Vec<Option<usize>>>,
    },
    /// Per cluster center `v`: sorted `(u, q_{j,v}(u))`.
    Cluster {
        trees: BTreeMap<usize, Vec<(usize, usize)>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreserverOracle {
    edges: BTreeSet<(usize, usize)>,
    pointers: Pointers,
}

impl PreserverOracle {
    /// H1 preserver: the pivot forests of every level.
    pub fn pivots(h: &Hierarchy) -> Self {
        let n = h.n();
        let mut edges = BTreeSet::new();
        let mut next = Vec::new();
        let mut pivot = Vec::new();
        for i in 0..h.depth() {
            match h.forest(i) {
                Some(t) => {
                    for (c, p) in t.tree_edges() {
                        edges.insert(edge_key(c, p));
                    }
                    next.push(t.parent.clone());
                    pivot.push(t.root.clone());
                }
                None => {
                    next.push(vec![None; n]);
                    pivot.push(vec![None; n]);
                }
            }
        }
        PreserverOracle {
            edges,
            pointers: Pointers::Pivot { next, pivot },
        }
    }

    /// H2 preserver: canonical trees of the clusters at levels `j < c`.
    pub fn clusters(h: &Hierarchy) -> Result<Self> {
        let mut edges = BTreeSet::new();
        let mut trees = BTreeMap::new();
        for j in 0..h.params.c.min(h.depth()) {
            for cl in h.clusters(j) {
                let members = h.cluster_members(cl);
                let mut table = Vec::with_capacity(members.len());
                for &(u, _) in &members {
                    let (_, next) = cl.get(u).expect("member of its own cluster");
                    if members.binary_search_by_key(&next, |m| m.0).is_err() {
                        return Err(Error::Invariant(format!(
                            "cluster of {} not closed: {u} points to {next} outside it",
                            cl.center
                        )));
                    }
                    if u != cl.center {
                        edges.insert(edge_key(u, next));
                    }
                    table.push((u, next));
                }
                trees.insert(cl.center, table);
            }
        }
        Ok(PreserverOracle {
            edges,
            pointers: Pointers::Cluster { trees },
        })
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn pointers(&self) -> &Pointers {
        &self.pointers
    }

    /// Number of stored pointers.
    pub fn storage(&self) -> usize {
        match &self.pointers {
            Pointers::Pivot { next, .. } => next.iter().flatten().filter(|p| p.is_some()).count(),
            Pointers::Cluster { trees } => trees.values().map(Vec::len).sum(),
        }
    }

    pub fn supports(&self, x: usize, y: usize) -> bool {
        self.route(x, y).is_some()
    }

    /// Starting point, pointer table and whether the walk must be reversed.
    fn route(&self, x: usize, y: usize) -> Option<Route<'_>> {
        match &self.pointers {
            Pointers::Pivot { next, pivot } => {
                for (i, piv) in pivot.iter().enumerate() {
                    if piv.get(x).copied().flatten() == Some(y) {
                        return Some(Route::Forest(&next[i], x, false));
                    }
                    if piv.get(y).copied().flatten() == Some(x) {
                        return Some(Route::Forest(&next[i], y, true));
                    }
                }
                None
            }
            Pointers::Cluster { trees } => {
                let hit = |center: usize, u: usize| {
                    trees
                        .get(&center)
                        .filter(|t| t.binary_search_by_key(&u, |m| m.0).is_ok())
                };
                if let Some(t) = hit(y, x) {
                    Some(Route::Tree(t, x, y, false))
                } else {
                    hit(x, y).map(|t| Route::Tree(t, y, x, true))
                }
            }
        }
    }

    /// Exact shortest `x`–`y` path by pointer chasing.
    pub fn query(&self, g: &Graph, x: usize, y: usize) -> Result<Path> {
        let route = self.route(x, y).ok_or(Error::Unsupported(x, y))?;
        let (walk, reverse) = match route {
            Route::Forest(next, start, rev) => {
                let mut walk = vec![start];
                let mut cur = start;
                while let Some(p) = next[cur] {
                    walk.push(p);
                    cur = p;
                }
                (walk, rev)
            }
            Route::Tree(table, start, center, rev) => {
                let mut walk = vec![start];
                let mut cur = start;
                while cur != center {
                    let i = table
                        .binary_search_by_key(&cur, |m| m.0)
                        .map_err(|_| Error::Invariant(format!("pointer walk left the cluster of {center}")))?;
                    cur = table[i].1;
                    walk.push(cur);
                }
                (walk, rev)
            }
        };
        let path = Path::in_graph(g, walk)?;
        Ok(if reverse { path.reversed() } else { path })
    }
}

enum Route<'a> {
    Forest(&'a [Option<usize>], usize, bool),
    Tree(&'a [(usize, usize)], usize, usize, bool),
}
