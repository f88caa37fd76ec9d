//! Layered labeled base graphs with unique alternating shortest paths.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

/// `2l + 1` layers of `p` vertices; vertex `(i, r)` has id `i·p + r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseGraph {
    pub l: usize,
    pub p: usize,
    /// Sorted label values.
    pub labels: Vec<usize>,
    pub edges: Vec<LabeledEdge>,
}

impl BaseGraph {
    pub fn layers(&self) -> usize {
        2 * self.l + 1
    }

    pub fn n(&self) -> usize {
        self.layers() * self.p
    }

    pub fn vertex(&self, layer: usize, r: usize) -> usize {
        layer * self.p + r
    }

    pub fn layer_of(&self, v: usize) -> usize {
        v / self.p
    }

    /// Position of `a` in the sorted label list.
    pub fn label_index(&self, a: usize) -> Option<usize> {
        self.labels.binary_search(&a).ok()
    }

    /// Unit-weight undirected graph.
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::new(self.n(), self.edges.iter().map(|e| (e.from, e.to, 1)))
    }

    /// Forward adjacency `out[v] = [(label, target)]`.
    pub fn forward(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.n()];
        for e in &self.edges {
            if e.from < self.n() {
                out[e.from].push((e.label, e.to));
            }
        }
        for o in &mut out {
            o.sort_unstable();
        }
        out
    }

    /// The walk from input `u` labeled `a, b, a, …`, if every step exists.
    pub fn alternating_path(&self, u: usize, a: usize, b: usize) -> Option<Vec<usize>> {
        walk(&self.forward(), self.l, u, a, b)
    }

    /// `out(u, a, b)`.
    pub fn out(&self, u: usize, a: usize, b: usize) -> Option<usize> {
        self.alternating_path(u, a, b).map(|p| *p.last().unwrap())
    }
}

fn walk(fwd: &[Vec<(usize, usize)>], l: usize, u: usize, a: usize, b: usize) -> Option<Vec<usize>> {
    let mut path = vec![u];
    let mut x = u;
    for i in 0..2 * l {
        let want = if i % 2 == 0 { a } else { b };
        let hits: Vec<usize> = fwd[x].iter().filter(|e| e.0 == want).map(|e| e.1).collect();
        if hits.len() != 1 {
            return None;
        }
        x = hits[0];
        path.push(x);
    }
    Some(path)
}

/// Layer `i → i+1` adds `a` (even `i`) or `multiplier·a` (odd `i`) mod `m`.
/// No validity check.
pub fn additive_base_graph(l: usize, m: usize, labels: &[usize], multiplier: usize) -> Result<BaseGraph> {
    if l == 0 || m == 0 {
        return Err(Error::param("l", "l and m must be positive"));
    }
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let mut edges = Vec::with_capacity(2 * l * m * labels.len());
    for i in 0..2 * l {
        let step = if i % 2 == 0 { 1 } else { multiplier };
        for r in 0..m {
            for &a in &labels {
                edges.push(LabeledEdge {
                    from: i * m + r,
                    to: (i + 1) * m + (r + a * step) % m,
                    label: a,
                });
            }
        }
    }
    Ok(BaseGraph { l, p: m, labels, edges })
}

/// Whether every `l`-term sum from `labels` equal to `l·a` uses only `a`.
/// Returns the first offending label otherwise.
pub fn l_convex_witness(labels: &[usize], l: usize) -> Option<usize> {
    if l <= 1 || labels.is_empty() {
        return None;
    }
    let max = *labels.iter().max().unwrap();
    let top = l * max;
    // ways[j][s]: multisets of j labels summing to s, saturated at 2
    let mut ways = vec![vec![0u8; top + 1]; l + 1];
    ways[0][0] = 1;
    for &x in labels {
        for j in 1..=l {
            for s in x..=top {
                let add = ways[j - 1][s - x];
                ways[j][s] = (ways[j][s] + add).min(2);
            }
        }
    }
    labels.iter().copied().find(|&a| ways[l][l * a] != 1)
}

/// Greedy first-fit `l`-convex subset of `[0, bound)`.
pub fn convex_labels(l: usize, bound: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for x in 0..bound {
        out.push(x);
        if l_convex_witness(&out, l).is_some() {
            out.pop();
        }
    }
    out
}

/// Labels from `[0, B)`, multiplier `M = lB + 1`, `m = lB + M·lB + 1`.
pub fn convex_label_base_graph(l: usize, budget: usize) -> Result<BaseGraph> {
    if l == 0 || budget < 2 {
        return Err(Error::param(
            "B",
            format!("need l ≥ 1 and B ≥ 2, got l = {l}, B = {budget}"),
        ));
    }
    let lb = l * budget;
    let mult = lb + 1;
    base_with(l, lb + mult * lb + 1, budget)
}

fn base_with(l: usize, m: usize, budget: usize) -> Result<BaseGraph> {
    let labels = convex_labels(l, budget);
    let g = additive_base_graph(l, m, &labels, l * budget + 1)?;
    let report = validate_base_graph(&g);
    if let Some(v) = report.violations.first() {
        return Err(Error::BaseGraph(format!("provider output invalid: {v:?}")));
    }
    Ok(g)
}

/// Base graph with exactly `p` ports per layer, using the largest budget
/// `B ≥ 2` that fits.
pub fn provide(p: usize, l: usize) -> Result<BaseGraph> {
    if l == 0 {
        return Err(Error::param("l", "must be at least 1"));
    }
    let fits = |b: usize| l * b + (l * b + 1) * l * b < p;
    if !fits(2) {
        return Err(Error::BaseGraph(format!("no label budget fits p = {p} at l = {l}")));
    }
    let mut b = 2;
    while fits(b + 1) {
        b += 1;
    }
    base_with(l, p, b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseViolation {
    /// Property 1.
    Layering { from: usize, to: usize },
    /// Property 2: `count` edges labeled `label` leave `vertex`.
    LabelCount { vertex: usize, label: usize, count: usize },
    /// Property 2: two labels from `vertex` reach the same `target`.
    SharedTarget { vertex: usize, target: usize },
    /// Property 3: the alternating walk is not a shortest path.
    NotShortest { u: usize, a: usize, b: usize, dist: usize },
    /// Property 3: `other` is a second shortest path.
    NotUnique {
        u: usize,
        a: usize,
        b: usize,
        other: Vec<usize>,
    },
    /// Property 3: the `(a, b)` paths from `u` and `u2` meet at `vertex`.
    NotDisjoint {
        a: usize,
        b: usize,
        u: usize,
        u2: usize,
        vertex: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseReport {
    pub labels: usize,
    pub pairs: usize,
    /// `|L|` against `√p / 2`; reported only.
    pub label_ceiling_ok: bool,
    pub violations: Vec<BaseViolation>,
}

impl BaseReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of the three properties.
pub fn validate_base_graph(bg: &BaseGraph) -> BaseReport {
    let mut violations = Vec::new();
    let n = bg.n();
    let last = 2 * bg.l;
    for e in &bg.edges {
        if e.from >= n || e.to >= n || bg.layer_of(e.from) + 1 != bg.layer_of(e.to) {
            violations.push(BaseViolation::Layering { from: e.from, to: e.to });
        }
    }
    let fwd = bg.forward();
    for (v, out) in fwd.iter().enumerate().take(last * bg.p) {
        for &a in &bg.labels {
            let count = out.iter().filter(|e| e.0 == a).count();
            if count != 1 {
                violations.push(BaseViolation::LabelCount {
                    vertex: v,
                    label: a,
                    count,
                });
            }
        }
        let mut seen = BTreeSet::new();
        for &(_, t) in out {
            if !seen.insert(t) {
                violations.push(BaseViolation::SharedTarget { vertex: v, target: t });
            }
        }
    }
    if !violations.is_empty() {
        return BaseReport {
            labels: bg.labels.len(),
            pairs: 0,
            label_ceiling_ok: ceiling_ok(bg),
            violations,
        };
    }

    let mut adj = vec![Vec::new(); n];
    for e in &bg.edges {
        adj[e.from].push(e.to);
        adj[e.to].push(e.from);
    }
    let mut pairs = BTreeSet::new();
    let mut owner: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for u in 0..bg.p {
        let (dist, count) = bfs_count(&adj, u);
        for &a in &bg.labels {
            for &b in &bg.labels {
                let path = walk(&fwd, bg.l, u, a, b).expect("labels checked");
                let v = *path.last().unwrap();
                pairs.insert((u, v));
                if dist[v] != last {
                    violations.push(BaseViolation::NotShortest { u, a, b, dist: dist[v] });
                } else if count[v] > 1 {
                    let other = other_shortest(&adj, &dist, &path);
                    violations.push(BaseViolation::NotUnique { u, a, b, other });
                }
                for &x in &path {
                    if let Some(&u2) = owner.get(&(a, b, x)) {
                        if u2 != u {
                            violations.push(BaseViolation::NotDisjoint {
                                a,
                                b,
                                u: u2,
                                u2: u,
                                vertex: x,
                            });
                        }
                    } else {
                        owner.insert((a, b, x), u);
                    }
                }
            }
        }
    }
    BaseReport {
        labels: bg.labels.len(),
        pairs: pairs.len(),
        label_ceiling_ok: ceiling_ok(bg),
        violations,
    }
}

fn ceiling_ok(bg: &BaseGraph) -> bool {
    4 * bg.labels.len() * bg.labels.len() <= bg.p
}

fn bfs_count(adj: &[Vec<usize>], s: usize) -> (Vec<usize>, Vec<u8>) {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut count = vec![0u8; adj.len()];
    dist[s] = 0;
    count[s] = 1;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
            if dist[y] == dist[x] + 1 {
                count[y] = (count[y] + count[x]).min(2);
            }
        }
    }
    (dist, count)
}

/// A shortest path to the end of `path` that differs from it.
fn other_shortest(adj: &[Vec<usize>], dist: &[usize], path: &[usize]) -> Vec<usize> {
    fn dfs(adj: &[Vec<usize>], dist: &[usize], path: &[usize], x: usize, acc: &mut Vec<usize>) -> bool {
        if dist[x] == 0 {
            let mut p = acc.clone();
            p.reverse();
            return p != path;
        }
        for &y in &adj[x] {
            if dist[y] + 1 == dist[x] {
                acc.push(y);
                if dfs(adj, dist, path, y, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let v = *path.last().unwrap();
    let mut acc = vec![v];
    dfs(adj, dist, path, v, &mut acc);
    acc.reverse();
    acc
}
