//! Stretch and size audits for spanner bundles, CSV rows, and sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compose::{compose_pairwise, compose_pairwise_partitioned};
use crate::error::{Error, Result};
use crate::graph::{dijkstra, generate, Family, Graph, PairSet, INF};
use crate::hierarchy::LevelParams;
use crate::hopset::{audit_hopset, audit_pairs, build_hopset_with, AuditMode, EXHAUSTIVE_LIMIT, SAMPLED_PAIRS};
use crate::lowerbound::{delta_pairs, sample_and_cover};
use crate::ratio::Ratio;
use crate::reductions::{build_prioritized, build_sourcewise, build_subset, PrioritizedConfig, Schedule};
use crate::spanner::{exact_preserver, ExactPreserverBuilder, SpannerBundle, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Stretch,
    /// The oracle found no path.
    NoPath,
    EdgeOutsideSpanner,
    WrongEndpoints,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditViolation {
    pub u: usize,
    pub v: usize,
    /// `None` when no path was reported.
    pub weight: Option<u64>,
    pub dist: u64,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub construction: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub mode: AuditMode,
    pub pairs: usize,
    /// Pairs disconnected in `G`; skipped.
    pub disconnected: usize,
    pub unsupported: Vec<(usize, usize)>,
    pub declared: Ratio,
    pub max_stretch: Ratio,
    /// Exact mean of `w/d` over checked pairs, as `a/b`.
    pub mean_stretch: String,
    pub violations: Vec<AuditViolation>,
    pub edges: usize,
    pub elapsed_ms: u64,
}

impl AuditReport {
    /// `(|S|, |P|)` reduced; the second entry is 0 when no pairs were audited.
    pub fn overhead(&self) -> (u64, u64) {
        reduce(self.edges as u64, self.pairs as u64)
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn reduce(a: u64, b: u64) -> (u64, u64) {
    if b == 0 {
        return (a, 0);
    }
    let r = Ratio::new(a, b);
    (r.num(), r.den())
}

/// Pairs implied by the bundle's support: exhaustive up to the audit limit,
/// seeded samples beyond it.
pub fn default_pairs(g: &Graph, bundle: &SpannerBundle, seed: u64) -> Result<(AuditMode, Vec<(usize, usize)>)> {
    let exhaustive_cap = EXHAUSTIVE_LIMIT * (EXHAUSTIVE_LIMIT - 1) / 2;
    let (mode, pairs) = match &bundle.support {
        Support::Pairs(p) => (AuditMode::Exhaustive, p.clone()),
        Support::All => audit_pairs(g.n(), seed)?,
        Support::Subset(a) => {
            let all: Vec<(usize, usize)> = a
                .iter()
                .enumerate()
                .flat_map(|(i, &x)| a[i + 1..].iter().map(move |&y| (x, y)))
                .collect();
            sample_if_large(all, exhaustive_cap, seed)
        }
        Support::Sourcewise(a) => {
            let all: Vec<(usize, usize)> = a
                .iter()
                .flat_map(|&x| (0..g.n()).filter(move |&v| v != x).map(move |v| (v, x)))
                .collect();
            sample_if_large(all, exhaustive_cap, seed)
        }
    };
    Ok((mode, pairs))
}

fn sample_if_large(all: Vec<(usize, usize)>, cap: usize, seed: u64) -> (AuditMode, Vec<(usize, usize)>) {
    if all.len() <= cap {
        return (AuditMode::Exhaustive, all);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = (0..SAMPLED_PAIRS).map(|_| all[rng.gen_range(0..all.len())]).collect();
    (
        AuditMode::Sampled {
            count: SAMPLED_PAIRS,
            seed,
        },
        picked,
    )
}

struct PairOutcome {
    observed: Option<(u64, u64)>,
    violation: Option<AuditViolation>,
    unsupported: bool,
    disconnected: bool,
}

/// Query every pair and compare against Dijkstra in `G`.
pub fn audit_bundle(
    g: &Graph,
    bundle: &SpannerBundle,
    pairs: &[(usize, usize)],
    mode: AuditMode,
) -> Result<AuditReport> {
    let start = Instant::now();
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in pairs {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        by_source.entry(u).or_default().push(v);
    }
    let groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
    let outcomes: Vec<Vec<((usize, usize), PairOutcome)>> = groups
        .par_iter()
        .map(|(u, targets)| {
            let d = dijkstra(g, *u)?;
            Ok(targets
                .iter()
                .map(|&v| ((*u, v), check_pair(g, bundle, *u, v, d.dist[v])))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut max_stretch = Ratio::ONE;
    let mut sum = BigRational::zero();
    let mut checked = 0u64;
    let mut violations = Vec::new();
    let mut unsupported = Vec::new();
    let mut disconnected = 0;
    for ((u, v), o) in outcomes.into_iter().flatten() {
        if o.disconnected {
            disconnected += 1;
            continue;
        }
        if o.unsupported {
            unsupported.push((u, v));
            continue;
        }
        match o.observed {
            Some((w, d)) => {
                max_stretch = max_stretch.max(Ratio::observed(w, d));
                if d > 0 {
                    sum += BigRational::new(BigUint::from(w).into(), BigUint::from(d).into());
                } else {
                    sum += BigRational::from_integer(1.into());
                }
                checked += 1;
            }
            None => max_stretch = Ratio::INFINITY,
        }
        if let Some(x) = o.violation {
            violations.push(x);
        }
    }
    let mean = if checked == 0 {
        BigRational::from_integer(1.into())
    } else {
        sum / BigRational::from_integer(checked.into())
    };
    Ok(AuditReport {
        construction: bundle.provenance.construction.clone(),
        params: bundle.provenance.params.clone(),
        seed: bundle.provenance.seed,
        mode,
        pairs: pairs.len(),
        disconnected,
        unsupported,
        declared: bundle.stretch,
        max_stretch,
        mean_stretch: format!("{}/{}", mean.numer(), mean.denom()),
        violations,
        edges: bundle.size(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn check_pair(g: &Graph, bundle: &SpannerBundle, u: usize, v: usize, dist: u64) -> PairOutcome {
    let mut out = PairOutcome {
        observed: None,
        violation: None,
        unsupported: false,
        disconnected: false,
    };
    if dist == INF {
        out.disconnected = true;
        return out;
    }
    let bad = |weight, kind| AuditViolation {
        u,
        v,
        weight,
        dist,
        kind,
    };
    match bundle.query(g, u, v) {
        Err(Error::Unsupported(..)) => out.unsupported = true,
        Err(_) => out.violation = Some(bad(None, ViolationKind::NoPath)),
        Ok(p) => {
            let w = p.weight();
            out.observed = Some((w, dist));
            out.violation = if (p.source(), p.target()) != (u, v) {
                Some(bad(Some(w), ViolationKind::WrongEndpoints))
            } else if p.edge_keys().any(|e| !bundle.edges().contains(&e)) {
                Some(bad(Some(w), ViolationKind::EdgeOutsideSpanner))
            } else if !bundle.stretch_for(u, v).admits(w, dist) {
                Some(bad(Some(w), ViolationKind::Stretch))
            } else {
                None
            };
        }
    }
    out
}

pub const CSV_HEADER: &str =
    "family,n,m,k,c,pairs,seed,edges,overhead_num,overhead_den,max_stretch_num,max_stretch_den,violations,ms";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub c: Option<usize>,
    pub pairs: usize,
    pub seed: Option<u64>,
    pub edges: usize,
    pub overhead: (u64, u64),
    pub max_stretch: Ratio,
    /// Violation count, or `error:<tag>`.
    pub violations: String,
    pub ms: u64,
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl CsvRow {
    /// `ms` is kept only when `timing` is set, so rows stay reproducible.
    pub fn from_report(family: &str, g: &Graph, r: &AuditReport, timing: bool) -> Self {
        let param = |key: &str| r.params.get(key).and_then(|v| v.parse().ok());
        CsvRow {
            family: family.to_string(),
            n: g.n(),
            m: g.m(),
            k: param("k").or_else(|| param("k_em")),
            c: param("c"),
            pairs: r.pairs,
            seed: r.seed,
            edges: r.edges,
            overhead: r.overhead(),
            max_stretch: r.max_stretch,
            violations: r.violations.len().to_string(),
            ms: if timing { r.elapsed_ms } else { 0 },
        }
    }

    pub fn error(family: &str, n: usize, m: usize, seed: u64, e: &Error) -> Self {
        CsvRow {
            family: family.to_string(),
            n,
            m,
            k: None,
            c: None,
            pairs: 0,
            seed: Some(seed),
            edges: 0,
            overhead: (0, 0),
            max_stretch: Ratio::ONE,
            violations: format!("error:{}", e.tag()),
            ms: 0,
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.m,
            opt(&self.k),
            opt(&self.c),
            self.pairs,
            opt(&self.seed),
            self.edges,
            self.overhead.0,
            self.overhead.1,
            self.max_stretch.num(),
            self.max_stretch.den(),
            self.violations,
            self.ms
        )
        .unwrap();
        s
    }

    /// Decimal overhead and stretch, for human-readable summaries.
    pub fn decimal_summary(&self) -> String {
        let over = if self.overhead.1 == 0 {
            "n/a".to_string()
        } else {
            format!("{:.4}", self.overhead.0 as f64 / self.overhead.1 as f64)
        };
        format!(
            "{} n={} seed={} overhead={} max_stretch={:.4} violations={}",
            self.family,
            self.n,
            opt(&self.seed),
            over,
            self.max_stretch.to_f64(),
            self.violations
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Exact,
    Compose,
    ComposePartitioned,
    Subset,
    Sourcewise,
    Prioritized,
    Hopset,
    Delta,
}

/// One sweep entry; every field besides `family` and `construction` is
/// optional with a construction-specific default.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub family: Family,
    pub construction: Construction,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub c: Option<usize>,
    /// Random pairs for pairwise constructions; subset size for subset and
    /// source-wise.
    #[serde(default)]
    pub pairs: Option<usize>,
    #[serde(default)]
    pub delta: Option<Ratio>,
    #[serde(default)]
    pub schedule: Option<Schedule>,
    #[serde(default)]
    pub beta: Option<u64>,
    #[serde(default)]
    pub alpha: Option<Ratio>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub run: Vec<RunSpec>,
}

/// CSV text with a header and one row per `(run, seed)`.
pub fn sweep(config: &SweepConfig, timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for run in &config.run {
        for &seed in &run.seeds {
            let row = run_one(run, seed, timing);
            out.push_str(&row.to_line());
            out.push('\n');
        }
    }
    out
}

pub fn run_one(run: &RunSpec, seed: u64, timing: bool) -> CsvRow {
    let name = run.family.name();
    let g = match generate(&run.family, seed) {
        Ok(g) => g,
        Err(e) => return CsvRow::error(name, 0, 0, seed, &e),
    };
    match run_on(&g, run, seed, timing) {
        Ok(row) => row,
        Err(e) => CsvRow::error(name, g.n(), g.m(), seed, &e),
    }
}

fn level_params(run: &RunSpec, seed: u64) -> Result<LevelParams> {
    let p = LevelParams::new(run.k.unwrap_or(4), run.c.unwrap_or(2), seed)?;
    match run.delta {
        Some(d) => p.with_delta(d),
        None => Ok(p),
    }
}

fn run_on(g: &Graph, run: &RunSpec, seed: u64, timing: bool) -> Result<CsvRow> {
    let name = run.family.name();
    let n = g.n();
    let random_pairs = || PairSet::random(n, run.pairs.unwrap_or(500).min(n * n.saturating_sub(1) / 2), seed);
    let subset = || -> Vec<usize> {
        let size = run.pairs.unwrap_or(64).clamp(1, n.max(1));
        (0..n).step_by((n / size).max(1)).take(size).collect()
    };
    let bundle = match run.construction {
        Construction::Exact => exact_preserver(g, random_pairs()?.as_slice())?,
        Construction::Compose => compose_pairwise(
            g,
            random_pairs()?.as_slice(),
            &level_params(run, seed)?,
            &ExactPreserverBuilder,
        )?,
        Construction::ComposePartitioned => compose_pairwise_partitioned(
            g,
            random_pairs()?.as_slice(),
            &level_params(run, seed)?,
            &ExactPreserverBuilder,
        )?,
        Construction::Subset => build_subset(g, &subset(), run.k.unwrap_or(2), seed, &ExactPreserverBuilder)?,
        Construction::Sourcewise => {
            let s = build_subset(g, &subset(), run.k.unwrap_or(2), seed, &ExactPreserverBuilder)?;
            build_sourcewise(g, &s)?
        }
        Construction::Prioritized => {
            let ranking: Vec<usize> = (0..n).collect();
            let cfg = PrioritizedConfig {
                schedule: run.schedule.unwrap_or(Schedule::Doubling),
                beta: run.beta,
                catch_all_k: run.k,
                seed,
            };
            build_prioritized(g, &ranking, &cfg, &ExactPreserverBuilder)?
        }
        Construction::Hopset => return hopset_row(g, run, seed, timing),
        Construction::Delta => return delta_row(g, run, seed),
    };
    let (mode, pairs) = default_pairs(g, &bundle, seed)?;
    let report = audit_bundle(g, &bundle, &pairs, mode)?;
    Ok(CsvRow::from_report(name, g, &report, timing))
}

fn hopset_row(g: &Graph, run: &RunSpec, seed: u64, timing: bool) -> Result<CsvRow> {
    let start = Instant::now();
    let params = level_params(run, seed)?;
    let build = build_hopset_with(g, &params)?;
    let hs = &build.hopset;
    let beta = usize::try_from(hs.declared_hopbound()).unwrap_or(usize::MAX);
    let a = audit_hopset(g, hs, hs.declared_stretch(), beta, seed)?;
    Ok(CsvRow {
        family: run.family.name().to_string(),
        n: g.n(),
        m: g.m(),
        k: Some(params.k),
        c: Some(params.c),
        pairs: a.pairs,
        seed: Some(seed),
        edges: hs.len(),
        overhead: reduce(hs.len() as u64, a.pairs as u64),
        max_stretch: a.max_stretch,
        violations: a.violations.len().to_string(),
        ms: if timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

fn delta_row(g: &Graph, run: &RunSpec, seed: u64) -> Result<CsvRow> {
    let k = run.k.ok_or_else(|| Error::param("k", "delta runs need k"))?;
    let inst = delta_pairs(g, k, run.alpha.unwrap_or(Ratio::ONE))?;
    let r = sample_and_cover(&inst, seed);
    Ok(CsvRow {
        family: run.family.name().to_string(),
        n: g.n(),
        m: g.m(),
        k: Some(k),
        c: None,
        pairs: r.sampled.len(),
        seed: Some(seed),
        edges: r.covered,
        overhead: reduce(r.covered as u64, r.sampled.len() as u64),
        max_stretch: Ratio::ONE,
        violations: "0".into(),
        ms: 0,
    })
}
