//! Dijkstra kernels with one globally fixed tie-break.
//!
//! Labels are ordered lexicographically by `(distance, root, hops)`. A vertex's
//! parent is the minimum-id neighbor `x` with the same root,
//! `dist[x] + w = dist[v]` and `hops[x] + 1 = hops[v]`. Every such `x` carries a
//! strictly smaller label, so it is settled before `v`; the parent can be fixed
//! at settle time and does not depend on heap order. The hop condition keeps
//! parent pointers acyclic in the presence of zero-weight edges.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::ops::ControlFlow;

use super::{Graph, Path, INF};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
struct Label {
    dist: u64,
    root: usize,
    hops: u32,
    parent: Option<usize>,
    settled: bool,
}

trait Labels {
    fn get(&self, v: usize) -> Option<&Label>;
    fn get_mut(&mut self, v: usize) -> Option<&mut Label>;
    fn insert(&mut self, v: usize, label: Label);
}

impl Labels for Vec<Option<Label>> {
    fn get(&self, v: usize) -> Option<&Label> {
        self[v].as_ref()
    }
    fn get_mut(&mut self, v: usize) -> Option<&mut Label> {
        self[v].as_mut()
    }
    fn insert(&mut self, v: usize, label: Label) {
        self[v] = Some(label);
    }
}

impl Labels for HashMap<usize, Label> {
    fn get(&self, v: usize) -> Option<&Label> {
        HashMap::get(self, &v)
    }
    fn get_mut(&mut self, v: usize) -> Option<&mut Label> {
        HashMap::get_mut(self, &v)
    }
    fn insert(&mut self, v: usize, label: Label) {
        HashMap::insert(self, v, label);
    }
}

/// Core search. `admit(v, d)` decides whether `v` may be labeled at tentative
/// distance `d`; `on_settle` may stop the search early.
fn search<L: Labels>(
    g: &Graph,
    seeds: &[usize],
    labels: &mut L,
    mut admit: impl FnMut(usize, u64) -> bool,
    mut on_settle: impl FnMut(usize, &Label) -> ControlFlow<()>,
) {
    let mut heap = BinaryHeap::new();
    for &s in seeds {
        labels.insert(
            s,
            Label {
                dist: 0,
                root: s,
                hops: 0,
                parent: None,
                settled: false,
            },
        );
        heap.push(Reverse((0u64, s, 0u32, s)));
    }
    while let Some(Reverse((d, root, h, v))) = heap.pop() {
        let cur = *labels.get(v).expect("queued vertices are labeled");
        if cur.settled || (cur.dist, cur.root, cur.hops) != (d, root, h) {
            continue;
        }
        let mut parent = None;
        if h > 0 {
            for &(x, w) in g.neighbors(v) {
                if let Some(lx) = labels.get(x) {
                    if lx.settled && lx.root == root && lx.hops + 1 == h && lx.dist.saturating_add(w) == d {
                        parent = Some(x);
                        break;
                    }
                }
            }
            debug_assert!(parent.is_some(), "settled vertex {v} without a tight parent");
        }
        let label = labels.get_mut(v).unwrap();
        label.settled = true;
        label.parent = parent;
        let label = *label;
        if on_settle(v, &label).is_break() {
            return;
        }
        for &(x, w) in g.neighbors(v) {
            let nd = d.saturating_add(w);
            let key = (nd, root, h + 1);
            match labels.get(x) {
                Some(lx) if lx.settled || (lx.dist, lx.root, lx.hops) <= key => continue,
                _ => {}
            }
            if !admit(x, nd) {
                continue;
            }
            labels.insert(
                x,
                Label {
                    dist: nd,
                    root,
                    hops: h + 1,
                    parent: None,
                    settled: false,
                },
            );
            heap.push(Reverse((nd, root, h + 1, x)));
        }
    }
}

/// Shortest-path tree (or forest, for several roots) with canonical parents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceTree {
    pub sources: Vec<usize>,
    /// `INF` for unreachable vertices.
    pub dist: Vec<u64>,
    pub parent: Vec<Option<usize>>,
    /// Root each vertex hangs from; `None` when unreachable.
    pub root: Vec<Option<usize>>,
    pub hops: Vec<u32>,
}

impl DistanceTree {
    fn from_labels(sources: Vec<usize>, labels: Vec<Option<Label>>) -> Self {
        let n = labels.len();
        let mut t = DistanceTree {
            sources,
            dist: vec![INF; n],
            parent: vec![None; n],
            root: vec![None; n],
            hops: vec![0; n],
        };
        for (v, l) in labels.into_iter().enumerate() {
            if let Some(l) = l.filter(|l| l.settled) {
                t.dist[v] = l.dist;
                t.parent[v] = l.parent;
                t.root[v] = Some(l.root);
                t.hops[v] = l.hops;
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn is_reachable(&self, v: usize) -> bool {
        self.root[v].is_some()
    }

    /// Parent edges as `(child, parent)`.
    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (v, p)))
    }
}

pub fn dijkstra(g: &Graph, s: usize) -> Result<DistanceTree> {
    g.check_vertex(s)?;
    let mut labels: Vec<Option<Label>> = vec![None; g.n()];
    search(g, &[s], &mut labels, |_, _| true, |_, _| ControlFlow::Continue(()));
    Ok(DistanceTree::from_labels(vec![s], labels))
}

/// Nearest-root forest. Ties between roots go to the smaller root id.
pub fn multi_source_forest(g: &Graph, roots: &[usize]) -> Result<DistanceTree> {
    if roots.is_empty() {
        return Err(Error::EmptyRoots);
    }
    for &r in roots {
        g.check_vertex(r)?;
    }
    let mut sorted = roots.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut labels: Vec<Option<Label>> = vec![None; g.n()];
    search(g, &sorted, &mut labels, |_, _| true, |_, _| ControlFlow::Continue(()));
    Ok(DistanceTree::from_labels(sorted, labels))
}

/// Root-to-`v` path read off the parent pointers.
pub fn canonical_path(tree: &DistanceTree, v: usize) -> Result<Path> {
    if v >= tree.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: tree.n() });
    }
    if !tree.is_reachable(v) {
        return Err(Error::Unreachable(v));
    }
    let mut vertices = vec![v];
    let mut x = v;
    while let Some(p) = tree.parent[x] {
        vertices.push(p);
        x = p;
    }
    vertices.reverse();
    Ok(Path::from_parts(vertices, tree.dist[v]))
}

/// Partial tree from a truncated search.
#[derive(Clone, Debug, Default)]
pub(crate) struct SparseTree {
    pub dist: HashMap<usize, u64>,
    pub parent: HashMap<usize, usize>,
}

impl SparseTree {
    fn from_labels(labels: HashMap<usize, Label>) -> Self {
        let mut t = SparseTree::default();
        for (v, l) in labels {
            if l.settled {
                t.dist.insert(v, l.dist);
                if let Some(p) = l.parent {
                    t.parent.insert(v, p);
                }
            }
        }
        t
    }

    /// Root-to-`v` vertex sequence.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        self.dist.get(&v)?;
        let mut out = vec![v];
        let mut x = v;
        while let Some(&p) = self.parent.get(&x) {
            out.push(p);
            x = p;
        }
        out.reverse();
        Some(out)
    }
}

/// Single-source search that only labels vertices accepted by `admit`.
/// Parents agree with the full [`dijkstra`] tree whenever the admitted set is
/// closed under shortest-path prefixes.
pub(crate) fn bounded_tree(g: &Graph, s: usize, admit: impl FnMut(usize, u64) -> bool) -> SparseTree {
    let mut labels: HashMap<usize, Label> = HashMap::new();
    search(g, &[s], &mut labels, admit, |_, _| ControlFlow::Continue(()));
    SparseTree::from_labels(labels)
}

/// Single-source search that stops once every target is settled.
pub(crate) fn targeted_tree(g: &Graph, s: usize, targets: &[usize]) -> SparseTree {
    let mut pending: HashSet<usize> = targets.iter().copied().filter(|&t| t != s).collect();
    let mut labels: HashMap<usize, Label> = HashMap::new();
    if !pending.is_empty() {
        search(
            g,
            &[s],
            &mut labels,
            |_, _| true,
            |v, _| {
                pending.remove(&v);
                if pending.is_empty() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
    } else {
        search(g, &[s], &mut labels, |_, _| false, |_, _| ControlFlow::Continue(()));
    }
    SparseTree::from_labels(labels)
}

/// Distances plus the number of distinct shortest paths, saturated at 2.
pub fn count_shortest_paths(g: &Graph, s: usize) -> Result<(Vec<u64>, Vec<u8>)> {
    let tree = dijkstra(g, s)?;
    let n = g.n();
    let mut order: Vec<usize> = (0..n).filter(|&v| tree.is_reachable(v)).collect();
    order.sort_by_key(|&v| (tree.dist[v], tree.hops[v]));
    let mut count = vec![0u8; n];
    count[s] = 1;
    for &v in &order {
        if v == s {
            continue;
        }
        let mut c = 0u8;
        for &(x, w) in g.neighbors(v) {
            if tree.is_reachable(x) && tree.dist[x].saturating_add(w) == tree.dist[v] {
                if w == 0 {
                    // zero-weight ties make path counting ill-defined; treat as ambiguous
                    c = 2;
                } else {
                    c = c.saturating_add(count[x]).min(2);
                }
            }
        }
        count[v] = c;
    }
    Ok((tree.dist, count))
}

/// Unweighted BFS hop distances (`usize::MAX` when unreachable).
pub fn bfs_hops(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &(x, _) in g.neighbors(v) {
            if dist[x] == usize::MAX {
                dist[x] = dist[v] + 1;
                q.push_back(x);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn path3() -> Graph {
        Graph::new(3, [(0, 1, 1), (1, 2, 2)]).unwrap()
    }

    #[test]
    fn dijkstra_on_a_path() {
        let t = dijkstra(&path3(), 0).unwrap();
        assert_eq!(t.dist, vec![0, 1, 3]);
        assert_eq!(t.parent, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn dijkstra_single_vertex() {
        let g = Graph::new(1, []).unwrap();
        let t = dijkstra(&g, 0).unwrap();
        assert_eq!(t.dist, vec![0]);
        assert_eq!(t.parent, vec![None]);
        assert!(dijkstra(&g, 1).is_err());
    }

    #[test]
    fn unreachable_uses_sentinel() {
        let g = Graph::new(3, [(0, 1, 4)]).unwrap();
        let t = dijkstra(&g, 0).unwrap();
        assert_eq!(t.dist[2], INF);
        assert!(matches!(canonical_path(&t, 2), Err(Error::Unreachable(2))));
    }

    #[test]
    fn petersen_eccentricity_is_two() {
        let g = generate(&Family::Petersen, 0).unwrap();
        // independent check: BFS from every source
        for s in 0..10 {
            let bfs = bfs_hops(&g, s);
            assert_eq!(*bfs.iter().max().unwrap(), 2);
            let t = dijkstra(&g, s).unwrap();
            assert_eq!(*t.dist.iter().max().unwrap(), 2);
        }
    }

    #[test]
    fn parent_is_min_id_among_optimal_predecessors() {
        // 0 reaches 3 through 1 or 2 at equal cost and equal hops
        let g = Graph::new(4, [(0, 2, 1), (0, 1, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        let t = dijkstra(&g, 0).unwrap();
        assert_eq!(t.parent[3], Some(1));
    }

    #[test]
    fn zero_weight_edges_keep_parents_acyclic() {
        let g = Graph::new(4, [(0, 1, 0), (1, 2, 0), (2, 0, 0), (2, 3, 1)]).unwrap();
        let t = dijkstra(&g, 1).unwrap();
        for v in 0..4 {
            let p = canonical_path(&t, v).unwrap();
            assert_eq!(p.source(), 1);
            assert!(p.hops() <= 3);
        }
    }

    #[test]
    fn forest_all_roots() {
        let g = generate(&Family::Grid { rows: 3, cols: 3 }, 0).unwrap();
        let all: Vec<usize> = (0..9).collect();
        let f = multi_source_forest(&g, &all).unwrap();
        assert!(f.dist.iter().all(|&d| d == 0));
        assert_eq!(f.tree_edges().count(), 0);
    }

    #[test]
    fn forest_on_unit_path() {
        let g = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let f = multi_source_forest(&g, &[3, 0]).unwrap();
        assert_eq!(f.root[1], Some(0));
        assert_eq!(f.root[2], Some(3));
        assert!(matches!(multi_source_forest(&g, &[]), Err(Error::EmptyRoots)));
    }

    #[test]
    fn forest_root_ties_go_to_smaller_id() {
        // 1 is equidistant from roots 0 and 2
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let f = multi_source_forest(&g, &[2, 0]).unwrap();
        assert_eq!(f.root[1], Some(0));
        assert_eq!(f.parent[1], Some(0));
    }

    #[test]
    fn canonical_path_endpoints() {
        let g = path3();
        let t = dijkstra(&g, 0).unwrap();
        assert_eq!(canonical_path(&t, 0).unwrap().hops(), 0);
        assert_eq!(canonical_path(&t, 2).unwrap().vertices(), &[0, 1, 2]);
    }

    #[test]
    fn bounded_tree_matches_full_tree() {
        let g = generate(
            &Family::Random {
                n: 60,
                m: 200,
                max_weight: 10,
            },
            3,
        )
        .unwrap();
        let full = dijkstra(&g, 5).unwrap();
        let radius = 12;
        let part = bounded_tree(&g, 5, |_, d| d <= radius);
        for v in 0..g.n() {
            if full.dist[v] <= radius {
                assert_eq!(part.dist[&v], full.dist[v]);
                assert_eq!(part.parent.get(&v).copied(), full.parent[v]);
            } else {
                assert!(!part.dist.contains_key(&v));
            }
        }
        let targeted = targeted_tree(&g, 5, &[7, 9]);
        for t in [7, 9] {
            let p = targeted.path_to(t).unwrap();
            assert_eq!(p, canonical_path(&full, t).unwrap().vertices());
        }
    }

    #[test]
    fn path_counts() {
        let g = Graph::new(4, [(0, 2, 1), (0, 1, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        let (_, c) = count_shortest_paths(&g, 0).unwrap();
        assert_eq!(c, vec![1, 1, 1, 2]);
    }
}
