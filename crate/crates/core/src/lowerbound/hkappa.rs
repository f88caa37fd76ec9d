//! The recursive layered graph `H_κ[p, l]` with its pair set and critical
//! edges.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::base_graph::{provide, BaseGraph};
use crate::error::{Error, Result};
use crate::graph::io::{expect_arity, field, read_graph, read_pairs, write_graph, write_pairs, Lines};
use crate::graph::{count_shortest_paths, dijkstra, edge_key, Graph, PairSet, INF};
use crate::ratio::Ratio;

pub const DEFAULT_VERTEX_CAP: usize = 100_000;

/// Supplies the base graph with `p` ports per layer at parameter `l`.
pub trait BaseProvider {
    fn base(&self, p: usize, l: usize) -> Result<BaseGraph>;
}

/// [`provide`] with the largest label budget that fits.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConvexProvider;

impl BaseProvider for ConvexProvider {
    fn base(&self, p: usize, l: usize) -> Result<BaseGraph> {
        provide(p, l)
    }
}

/// A fixed base graph for the outermost level, `fallback` below it.
pub struct FixedTop<P> {
    pub top: BaseGraph,
    pub fallback: P,
}

impl<P: BaseProvider> BaseProvider for FixedTop<P> {
    fn base(&self, p: usize, l: usize) -> Result<BaseGraph> {
        if p == self.top.p && l == self.top.l {
            Ok(self.top.clone())
        } else {
            self.fallback.base(p, l)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HKappaInstance {
    pub kappa: usize,
    pub p: usize,
    pub l: usize,
    pub graph: Graph,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    /// Pairs `(input vertex, output vertex)`.
    pub pairs: Vec<(usize, usize)>,
    /// Per pair, the critical edges on its shortest path.
    pub critical: Vec<Vec<(usize, usize)>>,
    /// Outermost base vertex whose copy contains each vertex; `None` for ports.
    pub owner: Vec<Option<usize>>,
}

struct Level {
    n: usize,
    edges: Vec<(usize, usize, u64)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    /// `(input index, output index)`.
    pairs: Vec<(usize, usize)>,
    critical: Vec<Vec<(usize, usize)>>,
    owner: Vec<Option<usize>>,
}

fn complete_bipartite(p: usize) -> Level {
    let mut edges = Vec::with_capacity(p * p);
    let mut pairs = Vec::with_capacity(p * p);
    let mut critical = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            edges.push((i, p + j, 1));
            pairs.push((i, j));
            critical.push(vec![(i, p + j)]);
        }
    }
    Level {
        n: 2 * p,
        edges,
        inputs: (0..p).collect(),
        outputs: (p..2 * p).collect(),
        pairs,
        critical,
        owner: vec![None; 2 * p],
    }
}

fn wrap(base: &BaseGraph, sub: &Level, kappa: usize) -> Level {
    let (p, l) = (base.p, base.l);
    let interior = (2 * l - 1) * p;
    let n = 2 * p + interior * sub.n;
    let weight = ((2 * l - 1) as u64).pow(kappa as u32);
    // interior base vertex (layer i, residue r) → copy offset
    let offset = |v: usize| 2 * p + (v - p) * sub.n;
    let pi: HashMap<usize, usize> = base.labels.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let last = 2 * l;

    let mut edges = Vec::with_capacity(base.edges.len() + interior * sub.edges.len());
    let mut owner = vec![None; 2 * p];
    owner.reserve(interior * sub.n);
    for v in p..(2 * l) * p {
        let off = offset(v);
        debug_assert_eq!(off, owner.len());
        edges.extend(sub.edges.iter().map(|&(x, y, w)| (off + x, off + y, w)));
        owner.extend(std::iter::repeat_n(Some(v), sub.n));
    }
    let port = |v: usize, i: usize, a: usize, side_layer: usize| -> usize {
        match side_layer {
            0 => v,
            s if s == last => p + (v - last * p),
            _ => {
                let k = pi[&a];
                offset(v)
                    + if i.is_multiple_of(2) {
                        sub.inputs[k]
                    } else {
                        sub.outputs[k]
                    }
            }
        }
    };
    for e in &base.edges {
        let i = base.layer_of(e.from);
        edges.push((port(e.from, i, e.label, i), port(e.to, i, e.label, i + 1), weight));
    }

    let sub_index: HashMap<(usize, usize), usize> = sub.pairs.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let fwd = base.forward();
    let mut pairs = Vec::new();
    let mut critical = Vec::new();
    for u in 0..p {
        for &a in &base.labels {
            for &b in &base.labels {
                let Some(&idx) = sub_index.get(&(pi[&a], pi[&b])) else {
                    continue;
                };
                let mut x = u;
                let mut crit = Vec::with_capacity((2 * l - 1) * sub.critical[idx].len());
                for step in 0..last {
                    let want = if step % 2 == 0 { a } else { b };
                    x = fwd[x].iter().find(|e| e.0 == want).expect("valid base graph").1;
                    if step + 1 < last {
                        let off = offset(x);
                        crit.extend(sub.critical[idx].iter().map(|&(s, t)| edge_key(off + s, off + t)));
                    }
                }
                pairs.push((u, x - last * p));
                critical.push(crit);
            }
        }
    }
    Level {
        n,
        edges,
        inputs: (0..p).collect(),
        outputs: (p..2 * p).collect(),
        pairs,
        critical,
        owner,
    }
}

/// `n_κ` for the chain of base graphs, without building anything.
fn predicted_size(bases: &[BaseGraph], p_last: usize) -> u128 {
    let mut n = 2 * p_last as u128;
    for b in bases.iter().rev() {
        n = 2 * b.p as u128 + ((2 * b.l - 1) * b.p) as u128 * n;
    }
    n
}

pub fn build_h_kappa(provider: &dyn BaseProvider, kappa: usize, p: usize, l: usize) -> Result<HKappaInstance> {
    build_h_kappa_capped(provider, kappa, p, l, DEFAULT_VERTEX_CAP)
}

pub fn build_h_kappa_capped(
    provider: &dyn BaseProvider,
    kappa: usize,
    p: usize,
    l: usize,
    cap: usize,
) -> Result<HKappaInstance> {
    if p == 0 || l == 0 {
        return Err(Error::param("p", "p and l must be positive"));
    }
    let mut bases = Vec::with_capacity(kappa);
    let mut q = p;
    for _ in 0..kappa {
        let b = provider.base(q, l)?;
        if b.p != q || b.l != l {
            return Err(Error::BaseGraph(format!(
                "provider returned p = {}, l = {} for p = {q}, l = {l}",
                b.p, b.l
            )));
        }
        q = b.labels.len();
        bases.push(b);
    }
    let n = predicted_size(&bases, q);
    if n > cap as u128 {
        return Err(Error::SizeCap {
            n: usize::try_from(n).unwrap_or(usize::MAX),
            cap,
        });
    }
    let mut level = complete_bipartite(q);
    for (depth, b) in bases.iter().enumerate().rev() {
        level = wrap(b, &level, kappa - depth);
    }
    let graph = Graph::new(level.n, level.edges)?;
    let pairs = level
        .pairs
        .iter()
        .map(|&(i, j)| (level.inputs[i], level.outputs[j]))
        .collect();
    Ok(HKappaInstance {
        kappa,
        p,
        l,
        graph,
        inputs: level.inputs,
        outputs: level.outputs,
        pairs,
        critical: level.critical,
        owner: level.owner,
    })
}

impl HKappaInstance {
    /// `(2lκ + 1)(2l − 1)^κ`.
    pub fn pair_distance(&self) -> u64 {
        let (l, k) = (self.l as u64, self.kappa as u32);
        (2 * l * k as u64 + 1) * (2 * l - 1).pow(k)
    }

    /// `n ≤ 2(2l)^κ p^{2 − 1/2^κ}`, compared after raising both sides to `2^κ`.
    pub fn upper_size_bound_holds(&self) -> bool {
        let e = 1u32 << self.kappa;
        let lhs = BigUint::from(self.graph.n()).pow(e);
        let c = BigUint::from(2u32) * BigUint::from(2 * self.l).pow(self.kappa as u32);
        let rhs = c.pow(e) * BigUint::from(self.p).pow(2 * e - 1);
        lhs <= rhs
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "hkappa {} {} {}", self.kappa, self.p, self.l).unwrap();
        s.push_str(&write_graph(&self.graph));
        let ps = PairSet::new(self.graph.n(), self.pairs.clone(), false).expect("distinct pairs");
        s.push_str(&write_pairs(&ps));
        for (i, c) in self.critical.iter().enumerate() {
            write!(s, "critical {i}").unwrap();
            for &(u, v) in c {
                write!(s, " {u} {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (no, h) = lines.header("hkappa")?;
        expect_arity(no, &h, 3, "hkappa header")?;
        let kappa: usize = field(no, h.first(), "kappa")?;
        let p: usize = field(no, h.get(1), "p")?;
        let l: usize = field(no, h.get(2), "l")?;
        let graph = read_graph(&mut lines)?;
        let pairs: Vec<(usize, usize)> = read_pairs(&mut lines, graph.n())?.into();
        let mut critical = Vec::with_capacity(pairs.len());
        for i in 0..pairs.len() {
            let (no, h) = lines.header("critical")?;
            let idx: usize = field(no, h.first(), "pair index")?;
            if idx != i || h.len() % 2 != 1 {
                return Err(Error::parse(
                    no,
                    format!("expected `critical {i}` followed by vertex pairs"),
                ));
            }
            let mut c = Vec::new();
            for w in h[1..].chunks(2) {
                let u: usize = field(no, w.first(), "u")?;
                let v: usize = field(no, w.get(1), "v")?;
                if !graph.has_edge(u, v) {
                    return Err(Error::parse(
                        no,
                        format!("critical edge ({u}, {v}) is not in the graph"),
                    ));
                }
                c.push(edge_key(u, v));
            }
            critical.push(c);
        }
        if let Some((no, line)) = lines.next_line() {
            return Err(Error::parse(no, format!("unexpected trailing line `{line}`")));
        }
        Ok(HKappaInstance {
            kappa,
            p,
            l,
            inputs: (0..p).collect(),
            outputs: (p..2 * p).collect(),
            owner: Vec::new(),
            graph,
            pairs,
            critical,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionResult {
    pub pair: usize,
    pub kept: usize,
    pub dist: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismReport {
    pub kappa: usize,
    pub l: usize,
    pub b: usize,
    pub n: usize,
    pub pairs: usize,
    pub pair_distance: u64,
    /// Pairs whose distance differs from `pair_distance` or whose shortest
    /// path is not unique.
    pub non_unique: Vec<usize>,
    pub critical_total: usize,
    pub critical_distinct: usize,
    /// `(2lκ+1)(2l−1)^κ + 2(2l−b)^κ`.
    pub deletion_bound: u64,
    pub deletions: Vec<DeletionResult>,
    pub deletion_failures: Vec<DeletionResult>,
    /// Smallest `d_S / d_G` over the deletion experiment.
    pub min_deleted_stretch: Option<Ratio>,
    /// `1 + 1/(6lκ)`, for `κ ≥ 1`.
    pub threshold: Option<Ratio>,
    /// `⌊(2l−1)/κ⌋ + 1`, for `κ ≥ 1`.
    pub prescribed_b: Option<usize>,
    pub upper_size_bound_holds: bool,
}

impl MechanismReport {
    pub fn passed(&self) -> bool {
        self.non_unique.is_empty() && self.critical_total == self.critical_distinct && self.deletion_failures.is_empty()
    }
}

/// Uniqueness, critical-edge disjointness, and the deletion experiment on up
/// to `sample` pairs (all pairs when `None`).
pub fn verify_mechanism(inst: &HKappaInstance, b: usize, sample: Option<usize>, seed: u64) -> Result<MechanismReport> {
    let (l, kappa) = (inst.l, inst.kappa);
    if b < 2 || b > 2 * l {
        return Err(Error::param("b", format!("must lie in [2, {}], got {b}", 2 * l)));
    }
    let g = &inst.graph;
    let want = inst.pair_distance();

    let mut by_input: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(u, _)) in inst.pairs.iter().enumerate() {
        by_input.entry(u).or_default().push(i);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_input.into_iter().collect();
    let bad: Vec<Vec<usize>> = groups
        .par_iter()
        .map(|(u, idxs)| {
            let (dist, count) = count_shortest_paths(g, *u)?;
            Ok(idxs
                .iter()
                .copied()
                .filter(|&i| {
                    let v = inst.pairs[i].1;
                    dist[v] != want || count[v] != 1
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let non_unique: Vec<usize> = bad.into_iter().flatten().collect();

    let critical_total: usize = inst.critical.iter().map(Vec::len).sum();
    let critical_distinct = inst.critical.iter().flatten().collect::<HashSet<_>>().len();

    let keep = b.pow(kappa as u32) - 1;
    let deletion_bound = want + 2 * ((2 * l - b) as u64).pow(kappa as u32);
    let mut chosen: Vec<usize> = (0..inst.pairs.len()).collect();
    if let Some(s) = sample {
        if s < chosen.len() {
            chosen.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            chosen.truncate(s);
            chosen.sort_unstable();
        }
    }
    let deletions: Vec<DeletionResult> = chosen
        .par_iter()
        .map(|&i| {
            let (u, v) = inst.pairs[i];
            let dropped: HashSet<(usize, usize)> = inst.critical[i].iter().skip(keep).copied().collect();
            let s = g.filter_edges(|e| !dropped.contains(&(e.u, e.v)));
            let d = dijkstra(&s, u)?.dist[v];
            Ok(DeletionResult {
                pair: i,
                kept: inst.critical[i].len().min(keep),
                dist: d,
            })
        })
        .collect::<Result<_>>()?;
    let deletion_failures: Vec<DeletionResult> =
        deletions.iter().filter(|d| d.dist < deletion_bound).cloned().collect();
    let min_deleted_stretch = deletions
        .iter()
        .map(|d| {
            if d.dist == INF {
                Ratio::INFINITY
            } else {
                Ratio::new(d.dist, want)
            }
        })
        .min();
    let (threshold, prescribed_b) = if kappa >= 1 {
        let t = (6 * l * kappa) as u64;
        (Some(Ratio::new(t + 1, t)), Some((2 * l - 1) / kappa + 1))
    } else {
        (None, None)
    };
    Ok(MechanismReport {
        kappa,
        l,
        b,
        n: g.n(),
        pairs: inst.pairs.len(),
        pair_distance: want,
        non_unique,
        critical_total,
        critical_distinct,
        deletion_bound,
        deletions,
        deletion_failures,
        min_deleted_stretch,
        threshold,
        prescribed_b,
        upper_size_bound_holds: inst.upper_size_bound_holds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowerbound::base_graph::convex_label_base_graph;

    #[test]
    fn kappa_zero() {
        let inst = build_h_kappa(&ConvexProvider, 0, 3, 2).unwrap();
        assert_eq!(inst.graph.n(), 6);
        assert_eq!(inst.pairs.len(), 9);
        let r = verify_mechanism(&inst, 2, None, 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.deletion_bound, 3);
        assert!(r.deletions.iter().all(|d| d.dist == 3));
    }

    #[test]
    fn kappa_one_l_two() {
        let inst = build_h_kappa(&ConvexProvider, 1, 81, 2).unwrap();
        assert_eq!(inst.graph.n(), 1620);
        assert_eq!(inst.pairs.len(), 729);
        assert_eq!(inst.pair_distance(), 15);
        assert!(inst.critical.iter().all(|c| c.len() == 3));
        assert!(inst.upper_size_bound_holds());
        let r = verify_mechanism(&inst, 2, Some(60), 1).unwrap();
        assert!(r.passed(), "{:?}", r.deletion_failures);
        assert_eq!(r.deletion_bound, 19);
        assert_eq!(r.critical_distinct, 3 * 729);
        assert!(r.deletions.iter().all(|d| d.dist >= 19));
        assert_eq!(r.threshold, Some(Ratio::new(13, 12)));
        assert_eq!(r.prescribed_b, Some(4));
    }

    #[test]
    fn connecting_weights() {
        let inst = build_h_kappa(&ConvexProvider, 1, 81, 2).unwrap();
        let heavy = inst.graph.edges().iter().filter(|e| e.w == 3).count();
        let light = inst.graph.edges().iter().filter(|e| e.w == 1).count();
        assert_eq!(heavy, 4 * 81 * 3);
        assert_eq!(light, 243 * 9);
        assert_eq!(heavy + light, inst.graph.m());
    }

    #[test]
    fn no_deletion_keeps_distances() {
        let inst = build_h_kappa(&ConvexProvider, 1, 25, 1).unwrap();
        for &(u, v) in inst.pairs.iter().take(20) {
            assert_eq!(dijkstra(&inst.graph, u).unwrap().dist[v], inst.pair_distance());
        }
    }

    #[test]
    fn kappa_two_l_one() {
        let inst = build_h_kappa(&ConvexProvider, 2, 289, 1).unwrap();
        assert_eq!(inst.pair_distance(), 5);
        // |P_2| = p · |P_1[p']| with p' = 16 and |P_1[16]| = 16 · 3²
        assert_eq!(inst.pairs.len(), 289 * 16 * 9);
        assert!(inst.critical.iter().all(|c| c.len() == 1));
        let r = verify_mechanism(&inst, 2, Some(30), 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.deletion_bound, 5);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            build_h_kappa_capped(&ConvexProvider, 1, 81, 2, 1000),
            Err(Error::SizeCap { n: 1620, cap: 1000 })
        ));
    }

    #[test]
    fn fixed_top_and_round_trip() {
        let top = convex_label_base_graph(1, 3).unwrap();
        let provider = FixedTop {
            top: top.clone(),
            fallback: ConvexProvider,
        };
        let inst = build_h_kappa(&provider, 1, top.p, 1).unwrap();
        assert_eq!(inst.pairs.len(), top.p * 9);
        let back = HKappaInstance::parse(&inst.to_text()).unwrap();
        assert_eq!(back.graph, inst.graph);
        assert_eq!(back.pairs, inst.pairs);
        assert_eq!(back.critical, inst.critical);
    }
}
