//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spanlab::audit::audit_bundle;
use spanlab::compose::{compose_pairwise, compose_pairwise_partitioned};
use spanlab::graph::{dijkstra, generate, Family, Graph, PairSet, INF};
use spanlab::hierarchy::{lambda_sequence, level_count, LevelParams};
use spanlab::hopset::{
    audit_hopset, build_hopset_with, AuditMode, Emulator, HopsetBuild, Pointers, PreserverOracle, Tag,
};
use spanlab::lowerbound::{
    additive_base_graph, build_h_kappa, convex_label_base_graph, delta_pairs, forced_edges_witness, sample_and_cover,
    validate_base_graph, verify_mechanism, BaseViolation, ConvexProvider,
};
use spanlab::reductions::{build_prioritized, build_sourcewise, build_subset, PrioritizedConfig, Schedule};
use spanlab::spanner::{Dispatch, Oracle};
use spanlab::{ExactPreserverBuilder, Ratio};

fn verdict(id: u32, what: &str, ok: bool, elapsed: Duration, limit: Option<Duration>) {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let tag = if ok && in_time { "PASS" } else { "FAIL" };
    let limit = limit.map(|l| format!(" (limit {:.0?})", l)).unwrap_or_default();
    println!("criterion {id:>2} {tag} {what} [{elapsed:.2?}{limit}]");
    assert!(ok, "criterion {id} failed: {what}");
    assert!(in_time, "criterion {id} exceeded its time limit");
}

/// Default sampling constant, then a dense one that keeps upper levels nonempty.
fn deltas() -> [Option<Ratio>; 2] {
    [None, Some(Ratio::new(1, 2))]
}

fn params(k: usize, c: usize, seed: u64, delta: Option<Ratio>) -> LevelParams {
    let p = LevelParams::new(k, c, seed).unwrap();
    match delta {
        Some(d) => p.with_delta(d).unwrap(),
        None => p,
    }
}

fn hopset(g: &Graph, seed: u64, delta: Option<Ratio>) -> HopsetBuild {
    build_hopset_with(g, &params(4, 2, seed, delta)).unwrap()
}

fn random_graph(n: usize, m: usize, seed: u64) -> Graph {
    generate(&Family::Random { n, m, max_weight: 100 }, seed).unwrap()
}

/// Hop-limited Bellman–Ford over `g` plus extra weighted edges, run to
/// convergence or `beta` rounds.
fn hop_dist(g: &Graph, extra: &[(usize, usize, u64)], s: usize, beta: usize) -> Vec<u64> {
    let mut all: Vec<(usize, usize, u64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    all.extend_from_slice(extra);
    let mut d = vec![INF; g.n()];
    d[s] = 0;
    for _ in 0..beta {
        let prev = d.clone();
        for &(u, v, w) in &all {
            if prev[u] != INF {
                d[v] = d[v].min(prev[u] + w);
            }
            if prev[v] != INF {
                d[u] = d[u].min(prev[v] + w);
            }
        }
        if d == prev {
            break;
        }
    }
    d
}

#[test]
fn criterion_01_lambda_closed_form() {
    let t = Instant::now();
    let mut ok = true;
    for c in 2..=10usize {
        let seq = lambda_sequence(c, 121).unwrap();
        for (i, lam) in seq.iter().enumerate() {
            let mut want = BigUint::from(1u32);
            for _ in 0..i / c {
                want *= BigUint::from(c + 1);
            }
            ok &= *lam == want;
        }
    }
    verdict(
        1,
        "lambda recurrence equals (c+1)^floor(i/c) for c<=10, i<=120",
        ok,
        t.elapsed(),
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_02_hopset_audit() {
    let t = Instant::now();
    let mut ok = true;
    let mut sizes = Vec::new();
    for (seed, delta) in (0..5).flat_map(|s| deltas().map(|d| (s, d))) {
        let g = random_graph(200, 800, seed);
        let build = hopset(&g, seed, delta);
        let hs = &build.hopset;
        sizes.push(hs.len());
        assert_eq!(hs.declared_stretch(), Ratio::integer(19));
        assert_eq!(hs.declared_hopbound(), 6561);
        let a = audit_hopset(&g, hs, Ratio::integer(19), 6561, seed).unwrap();
        ok &= a.mode == AuditMode::Exhaustive && a.pairs == 200 * 199 / 2 && a.violations.is_empty();
        let extra: Vec<(usize, usize, u64)> = hs.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        for s in (0..200).step_by(17) {
            let d = dijkstra(&g, s).unwrap();
            let h = hop_dist(&g, &extra, s, 6561);
            ok &= h.iter().zip(&d.dist).all(|(&x, &y)| x <= 19 * y);
        }
    }
    verdict(
        2,
        &format!("hopset n=200 k=4 c=2: zero violations at (19, 6561); sizes {sizes:?}"),
        ok,
        t.elapsed(),
        Some(Duration::from_secs(120)),
    );
}

fn pointers_acyclic(p: &PreserverOracle, n: usize) -> bool {
    match p.pointers() {
        Pointers::Pivot { next, .. } => next.iter().all(|lvl| {
            (0..n).all(|u| {
                let mut x = u;
                for _ in 0..=n {
                    match lvl[x] {
                        Some(y) if y != x => x = y,
                        _ => return true,
                    }
                }
                false
            })
        }),
        Pointers::Cluster { trees } => trees.iter().all(|(&center, table)| {
            let map: BTreeMap<usize, usize> = table.iter().copied().collect();
            map.keys().all(|&u| {
                let mut x = u;
                for _ in 0..=map.len() {
                    if x == center {
                        return true;
                    }
                    match map.get(&x) {
                        Some(&y) => x = y,
                        None => return false,
                    }
                }
                false
            })
        }),
    }
}

#[test]
fn criterion_03_preserver_exactness() {
    let t = Instant::now();
    let n = 200;
    let g = random_graph(n, 800, 7);
    let f = level_count(4, 2);
    let mut ok = true;
    let mut supported = 0;
    for delta in deltas() {
        let build = hopset(&g, 7, delta);
        ok &= build.hopset.count(Tag::H1) <= f * n && build.h1.edges().len() <= f * n;
        for u in 0..n {
            let d = dijkstra(&g, u).unwrap();
            for v in u + 1..n {
                for p in [&build.h1, &build.h2] {
                    if p.supports(u, v) {
                        supported += 1;
                        let path = p.query(&g, u, v).unwrap();
                        ok &= path.weight() == d.dist[v] && path.source() == u && path.target() == v;
                        ok &= path.edge_keys().all(|e| p.edges().contains(&e));
                    }
                }
            }
        }
        ok &= pointers_acyclic(&build.h1, n) && pointers_acyclic(&build.h2, n);
    }
    ok &= supported > 0;
    verdict(
        3,
        &format!("preservers exact on {supported} supported pairs, H1 <= F*n, pointers acyclic"),
        ok,
        t.elapsed(),
        None,
    );
}

#[test]
fn criterion_04_h3_size_soft() {
    let t = Instant::now();
    let (n, k, c) = (200usize, 4usize, 2usize);
    let mut notes = Vec::new();
    let mut within = true;
    for d in deltas() {
        let delta = params(k, c, 0, d).delta.to_f64();
        let bound = 10.0 * c as f64 * delta.powi(c as i32 - 1) * (n as f64).powf(1.0 + 1.0 / k as f64);
        let mut total = 0usize;
        for seed in 0..5 {
            let g = random_graph(n, 800, seed);
            total += hopset(&g, seed, d).hopset.count(Tag::H3);
        }
        let mean = total as f64 / 5.0;
        within &= mean <= bound;
        notes.push(format!("delta {delta:.2e}: mean |H3| = {mean:.1} vs {bound:.4}"));
    }
    println!(
        "criterion  4 {} {} [{:.2?}]",
        if within { "PASS" } else { "FAIL (soft, flagged)" },
        notes.join("; "),
        t.elapsed()
    );
}

#[test]
fn criterion_05_pairwise_composition() {
    let t = Instant::now();
    let g = random_graph(200, 800, 11);
    let pairs = PairSet::random(200, 500, 11).unwrap();
    let mut ok = true;
    let mut worst = Ratio::ONE;
    for (delta, partitioned) in deltas().into_iter().flat_map(|d| [(d, false), (d, true)]) {
        let p = params(4, 2, 11, delta);
        let b = if partitioned {
            compose_pairwise_partitioned(&g, pairs.as_slice(), &p, &ExactPreserverBuilder).unwrap()
        } else {
            compose_pairwise(&g, pairs.as_slice(), &p, &ExactPreserverBuilder).unwrap()
        };
        ok &= b.stretch == Ratio::integer(19);
        let r = audit_bundle(&g, &b, pairs.as_slice(), AuditMode::Exhaustive).unwrap();
        ok &= r.violations.is_empty() && r.unsupported.is_empty() && r.max_stretch <= Ratio::integer(19);
        match &b.oracle {
            Oracle::Composed { hop_paths, .. } => {
                ok &= hop_paths.len() == 500;
                ok &= hop_paths.values().all(|hp| hp.hops() <= 6561);
                ok &= hop_paths
                    .values()
                    .all(|hp| hp.graph_edges().all(|(x, y)| b.contains_edge(x, y)));
            }
            _ => ok = false,
        }
        for &(u, v) in pairs.as_slice() {
            let p = b.query(&g, u, v).unwrap();
            ok &= p.edge_keys().all(|(x, y)| g.has_edge(x, y) && b.contains_edge(x, y));
        }
        worst = worst.max(r.max_stretch);
    }
    verdict(
        5,
        &format!("composition: max stretch {worst} <= 19, hop paths <= 6561, edges in S"),
        ok,
        t.elapsed(),
        None,
    );
}

#[test]
fn criterion_06_subset_and_sourcewise() {
    let t = Instant::now();
    let n = 256;
    let g = random_graph(n, 1024, 5);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    let mut a = order[..64].to_vec();
    a.sort_unstable();
    let sub = build_subset(&g, &a, 2, 5, &ExactPreserverBuilder).unwrap();
    let mut ok = sub.stretch == Ratio::integer(3);
    for (i, &x) in a.iter().enumerate() {
        let d = dijkstra(&g, x).unwrap();
        for &y in &a[i + 1..] {
            let p = sub.query(&g, x, y).unwrap();
            ok &= p.source() == x && p.target() == y && p.weight() <= 3 * d.dist[y];
            ok &= p.edge_keys().all(|(s, e)| g.has_edge(s, e) && sub.contains_edge(s, e));
        }
    }
    let sw = build_sourcewise(&g, &sub).unwrap();
    ok &= sw.stretch == Ratio::integer(7);
    match &sw.oracle {
        Oracle::Sourcewise { next, .. } => {
            let forest: BTreeSet<(usize, usize)> = next
                .iter()
                .enumerate()
                .filter_map(|(v, p)| p.map(|p| (v.min(p), v.max(p))))
                .collect();
            ok &= forest.len() < n;
            // union-find over forest edges
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                p[x] = r;
                r
            }
            for &(x, y) in &forest {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                ok &= rx != ry;
                parent[rx] = ry;
            }
        }
        _ => ok = false,
    }
    for &x in &a {
        let d = dijkstra(&g, x).unwrap();
        for v in 0..n {
            if v == x {
                continue;
            }
            let p = sw.query(&g, v, x).unwrap();
            ok &= p.source() == v && p.target() == x && p.weight() <= 7 * d.dist[v];
            ok &= p.edge_keys().all(|(s, e)| g.has_edge(s, e) && sw.contains_edge(s, e));
        }
    }
    verdict(
        6,
        "subset |A|=64 stretch 3, source-wise stretch 7, forest acyclic",
        ok,
        t.elapsed(),
        None,
    );
}

/// `⌈log2(1/(1 − log_n j))⌉`, exact at boundaries.
fn doubling_index(n: usize, j: usize) -> usize {
    if j == 1 {
        return 0;
    }
    let delta = (j as f64).ln() / (n as f64).ln();
    let est = (1.0 / (1.0 - delta)).log2().ceil() as usize;
    // j ≤ n^{1−2^{−i}}  ⇔  j^{2^i} ≤ n^{2^i − 1}
    let fits = |i: usize| {
        let e = 1u32 << i;
        BigUint::from(j).pow(e) <= BigUint::from(n).pow(e - 1)
    };
    let mut i = est.saturating_sub(1);
    while !fits(i) {
        i += 1;
    }
    i
}

#[test]
fn criterion_07_prioritized_dispatch() {
    let t = Instant::now();
    let n = 4096;
    let g = random_graph(n, 4 * n, 3);
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.shuffle(&mut ChaCha8Rng::seed_from_u64(3));
    let config = PrioritizedConfig {
        schedule: Schedule::Doubling,
        beta: None,
        catch_all_k: None,
        seed: 3,
    };
    let b = build_prioritized(&g, &ranking, &config, &ExactPreserverBuilder).unwrap();
    let Oracle::Prioritized(po) = &b.oracle else {
        panic!("not a prioritized oracle")
    };
    let top = *po.thresholds.last().unwrap();
    let mut ok = top >= 1;
    for j in 1..=top {
        let (u, v) = (ranking[j - 1], ranking[n - 1]);
        let (jj, d) = po.dispatch(u, v);
        ok &= jj == j && d == Dispatch::Prefix(doubling_index(n, j));
    }
    if top < n - 1 {
        ok &= po.dispatch(ranking[top], ranking[n - 1]).1 == Dispatch::CatchAll;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 1..=top.min(600) {
        let w = *ranking[j..].choose(&mut rng).unwrap();
        pairs.push((ranking[j - 1], w));
    }
    pairs.extend(PairSet::random(n, 400, 31).unwrap().as_slice());
    let r = audit_bundle(&g, &b, &pairs, AuditMode::Exhaustive).unwrap();
    ok &= r.violations.is_empty() && r.unsupported.is_empty();
    for &(u, v) in pairs.iter().take(200) {
        let d = dijkstra(&g, u).unwrap().dist[v];
        let p = b.query(&g, u, v).unwrap();
        let declared = match po.dispatch(u, v).1 {
            Dispatch::Prefix(i) => po.prefixes[i - po.first_index].0,
            Dispatch::CatchAll => po.catch_all.0,
        };
        ok &= declared.admits(p.weight(), d);
    }
    verdict(
        7,
        &format!("doubling dispatch matches ceil(log(1/(1-delta_j))) for j <= f(T) = {top}"),
        ok,
        t.elapsed(),
        None,
    );
}

#[test]
fn criterion_08_petersen() {
    let t = Instant::now();
    let g = generate(&Family::Petersen, 0).unwrap();
    let inst = delta_pairs(&g, 4, Ratio::ONE).unwrap();
    let mut ok = inst.delta == 2 && inst.pairs.len() == 30;
    // exhaustive: every pair at distance 2 has exactly one common neighbour
    let mut count = 0;
    let mut cover: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for u in 0..10 {
        for v in u + 1..10 {
            if g.has_edge(u, v) {
                continue;
            }
            let mids: Vec<usize> = (0..10).filter(|&w| g.has_edge(u, w) && g.has_edge(w, v)).collect();
            ok &= mids.len() == 1;
            if let [w] = mids[..] {
                count += 1;
                *cover.entry((u.min(w), u.max(w))).or_insert(0) += 1;
                *cover.entry((v.min(w), v.max(w))).or_insert(0) += 1;
            }
        }
    }
    ok &= count == 30 && cover.len() == 15 && cover.values().all(|&c| c == 4);
    ok &= inst.coverage == cover;
    verdict(
        8,
        "Petersen: 30 unique delta-pairs, each edge on exactly 4 paths",
        ok,
        t.elapsed(),
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn criterion_09_heawood_sampling() {
    let t = Instant::now();
    let g = generate(&Family::Heawood, 0).unwrap();
    let inst = delta_pairs(&g, 5, Ratio::ONE).unwrap();
    let per_edge = *inst.coverage.values().next().unwrap();
    let mut ok = inst.coverage.values().all(|&c| c == per_edge) && inst.coverage.len() == 21;
    let p = inst.sampling_probability();
    ok &= p == Ratio::new(1, per_edge as u64);
    let expected = 1.0 - (1.0 - p.to_f64()).powi(per_edge as i32);
    ok &= (expected - (1.0 - 0.75f64.powi(4))).abs() < 1e-12;
    let mut sum = 0.0;
    for seed in 0..200 {
        let r = sample_and_cover(&inst, seed);
        sum += r.coverage.to_f64();
        ok &= forced_edges_witness(&inst, &r.sampled).is_none();
    }
    let mean = sum / 200.0;
    ok &= (mean - expected).abs() <= 0.05;
    verdict(
        9,
        &format!("Heawood: mean coverage {mean:.4} vs {expected:.4}, covered edges forced"),
        ok,
        t.elapsed(),
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_10_h_kappa_mechanism() {
    let t = Instant::now();
    let inst = build_h_kappa(&ConvexProvider, 1, 81, 2).unwrap();
    let mut ok = inst.graph.n() == 1620 && inst.pairs.len() == 729 && inst.pair_distance() == 15;
    let mut seen = HashSet::new();
    for crit in &inst.critical {
        for &e in crit {
            ok &= seen.insert(e);
        }
    }
    for &(u, v) in inst.pairs.iter().step_by(37) {
        ok &= dijkstra(&inst.graph, u).unwrap().dist[v] == 15;
    }
    let r = verify_mechanism(&inst, 2, None, 0).unwrap();
    ok &= r.deletion_bound == 19 && r.non_unique.is_empty() && r.deletion_failures.is_empty();
    ok &= r.deletions.len() == 729 && r.deletions.iter().all(|d| d.dist >= 19);
    verdict(
        10,
        "H_kappa (kappa=1, l=2): n=1620, 729 pairs at 15, disjoint critical edges, deletions >= 19",
        ok,
        t.elapsed(),
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn criterion_11_base_graph_validator() {
    let t = Instant::now();
    let mut ok = true;
    for b in 2..=8 {
        let bg = convex_label_base_graph(1, b).unwrap();
        ok &= validate_base_graph(&bg).is_valid();
    }
    let bg = convex_label_base_graph(2, 4).unwrap();
    ok &= bg.labels == [0, 1, 3] && bg.p == 81 && validate_base_graph(&bg).is_valid();

    let bad = additive_base_graph(2, 81, &[0, 1, 2], 9).unwrap();
    let r = validate_base_graph(&bad);
    ok &= r
        .violations
        .iter()
        .any(|v| matches!(v, BaseViolation::NotUnique { .. }));

    let mut broken = convex_label_base_graph(1, 4).unwrap();
    let first = broken.edges[0];
    let twin = broken
        .edges
        .iter()
        .position(|e| e.from == first.from && e.to != first.to)
        .unwrap();
    broken.edges[twin].to = first.to;
    let r = validate_base_graph(&broken);
    ok &= r.violations.iter().any(
        |v| matches!(v, BaseViolation::SharedTarget { vertex, target } if *vertex == first.from && *target == first.to),
    );
    verdict(
        11,
        "base graphs valid for l=1 (B<=8) and l=2 L={0,1,3}; corrupted candidates rejected",
        ok,
        t.elapsed(),
        None,
    );
}

#[test]
fn criterion_12_tz_emulator() {
    let t = Instant::now();
    let g = random_graph(300, 1200, 12);
    let mut order: Vec<usize> = (0..300).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(12));
    let mut points = order[..64].to_vec();
    points.sort_unstable();
    let metric: Vec<Vec<u64>> = points
        .iter()
        .map(|&x| {
            let d = dijkstra(&g, x).unwrap();
            points.iter().map(|&y| d.dist[y]).collect()
        })
        .collect();
    let mut ok = true;
    for seed in 0..5 {
        let em = Emulator::build_dense(&points, &metric, 2, seed).unwrap();
        let edges: BTreeMap<(usize, usize), u64> = em.edges().into_iter().map(|(x, y, w)| ((x, y), w)).collect();
        for (i, &x) in points.iter().enumerate() {
            for (j, &y) in points.iter().enumerate().skip(i + 1) {
                let p = em.query(x, y).unwrap();
                ok &= p.hops() <= 2 && p.source() == x && p.target() == y;
                let sum: u64 = p.edge_keys().map(|e| edges.get(&e).copied().unwrap_or(INF)).sum();
                ok &= sum == p.weight() && p.weight() <= 3 * metric[i][j];
            }
        }
    }
    verdict(
        12,
        "TZ emulator |A|=64, k=2: stretch <= 3 with <= 2 edges",
        ok,
        t.elapsed(),
        None,
    );
}
