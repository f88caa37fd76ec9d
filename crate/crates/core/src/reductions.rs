//! Subset, source-wise and prioritized spanners built on top of any pairwise
//! builder.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_key, multi_source_forest, Graph};
use crate::hopset::Emulator;
use crate::spanner::{Oracle, PairwiseBuilder, PrioritizedOracle, Provenance, SpannerBundle, Support};

const LOG_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetParams {
    pub n: usize,
    pub a_size: usize,
    pub k: usize,
    /// `log_n(|A|^{1+1/k})`.
    pub q: f64,
    pub p: usize,
}

/// `p = ⌈1/(q−1)⌉` when `q > 1`, else `⌈log n⌉`; always at least 1.
pub fn subset_params(n: usize, a_size: usize, k: usize) -> Result<SubsetParams> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if a_size == 0 || a_size > n {
        return Err(Error::param("A", format!("size must lie in 1..={n}, got {a_size}")));
    }
    let (ln, la) = ((n as f64).log2(), (a_size as f64).log2());
    let q = if n > 1 { (1.0 + 1.0 / k as f64) * la / ln } else { 0.0 };
    // q > 1 exactly when |A|^{k+1} > n^k
    let above = BigUint::from(a_size).pow(k as u32 + 1) > BigUint::from(n).pow(k as u32);
    let p = if above {
        let x = k as f64 * ln / ((k + 1) as f64 * la - k as f64 * ln);
        (x - LOG_EPS).ceil() as usize
    } else {
        (ln - LOG_EPS).ceil() as usize
    };
    Ok(SubsetParams {
        n,
        a_size,
        k,
        q,
        p: p.max(1),
    })
}

/// `A × A` spanner: a Thorup–Zwick emulator over `d_G|_A` whose edges are
/// realized by `inner`. Stretch `(2k_em − 1) · t`.
pub fn build_subset(
    g: &Graph,
    a: &[usize],
    k_em: usize,
    seed: u64,
    inner: &dyn PairwiseBuilder,
) -> Result<SpannerBundle> {
    let emulator = Emulator::build_graph(g, a, k_em, seed)?;
    let pairs: Vec<(usize, usize)> = emulator.edges().iter().map(|e| (e.0, e.1)).collect();
    let inner_bundle = inner.build(g, &pairs)?;
    let stretch = emulator
        .declared_stretch()
        .checked_mul(&inner.declared_stretch())
        .ok_or_else(|| Error::param("stretch", "declared stretch overflows"))?;
    let provenance = Provenance::new("subset", Some(seed))
        .with("a_size", emulator.points().len())
        .with("k_em", k_em)
        .with("k_effective", emulator.effective_k())
        .with("inner", inner.name());
    let support = Support::Subset(emulator.points().to_vec());
    let mut b = SpannerBundle::new(
        provenance,
        stretch,
        support,
        inner_bundle.edges().clone(),
        Oracle::Subset {
            emulator,
            inner: Box::new(inner_bundle.oracle.clone()),
        },
    );
    b.stats.insert("emulator_edges".into(), pairs.len() as u64);
    Ok(b)
}

/// `A × V` spanner: the nearest-root forest of `A` plus `subset`.
/// Stretch `2α + 1`.
pub fn build_sourcewise(g: &Graph, subset: &SpannerBundle) -> Result<SpannerBundle> {
    let roots = match &subset.support {
        Support::Subset(a) => a.clone(),
        _ => return Err(Error::param("subset", "bundle does not support an A × A pair set")),
    };
    let forest = multi_source_forest(g, &roots)?;
    let mut edges = subset.edges().clone();
    let mut forest_edges = 0u64;
    for (c, p) in forest.tree_edges() {
        edges.insert(edge_key(c, p));
        forest_edges += 1;
    }
    let mut provenance = subset.provenance.clone();
    provenance.construction = format!("sourcewise({})", provenance.construction);
    let mut b = SpannerBundle::new(
        provenance,
        subset.stretch.double_plus_one(),
        Support::Sourcewise(roots.clone()),
        edges,
        Oracle::Sourcewise {
            roots,
            next: forest.parent.clone(),
            root_of: forest.root.clone(),
            subset: Box::new(subset.oracle.clone()),
        },
    );
    b.stats = subset.stats.clone();
    b.stats.insert("forest_edges".into(), forest_edges);
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `f(i) = ⌊n^{1−1/i}⌋`, `i ≥ 1`.
    Power,
    /// `f(i) = ⌊n^{1−1/2^i}⌋`, `i ≥ 0`.
    Doubling,
}

impl Schedule {
    pub fn first_index(self) -> usize {
        match self {
            Schedule::Power => 1,
            Schedule::Doubling => 0,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Power => "power",
            Schedule::Doubling => "doubling",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Schedule::Power),
            "doubling" => Ok(Schedule::Doubling),
            _ => Err(Error::param(
                "schedule",
                format!("expected `power` or `doubling`, got `{s}`"),
            )),
        }
    }
}

/// Exact `f(i)` by integer roots.
pub fn schedule_f(schedule: Schedule, n: usize, i: usize) -> Result<usize> {
    let (num, den) = match schedule {
        Schedule::Power if i >= 1 => (i - 1, i),
        Schedule::Doubling if i < 32 => {
            let d = 1usize << i;
            (d - 1, d)
        }
        _ => return Err(Error::param("i", format!("{i} is outside the {schedule} schedule"))),
    };
    let v = BigUint::from(n).pow(num as u32).nth_root(den as u32);
    Ok(v.to_usize().expect("f(i) ≤ n"))
}

/// `⌈log|A| / (log n − 2 log β − log|A|)⌉`, at least 1; `None` when the
/// denominator is not positive.
pub fn k_of_prefix(a_size: usize, n: usize, beta: u64) -> Option<usize> {
    let la = (a_size.max(1) as f64).log2();
    let denom = (n as f64).log2() - 2.0 * (beta.max(1) as f64).log2() - la;
    if denom <= LOG_EPS {
        return None;
    }
    Some(((la / denom - LOG_EPS).ceil() as usize).max(1))
}

/// Indices `first..=T` and their `f` values, where `T` is the last index with
/// `k_of_prefix` defined.
pub fn schedule_prefixes(schedule: Schedule, n: usize, beta: u64) -> Result<Vec<(usize, usize)>> {
    if beta < 2 {
        return Err(Error::param("beta", "must be at least 2"));
    }
    let mut out = Vec::new();
    let mut i = schedule.first_index();
    while let Ok(f) = schedule_f(schedule, n, i) {
        if k_of_prefix(f, n, beta).is_none() {
            break;
        }
        out.push((i, f));
        i += 1;
    }
    if out.is_empty() {
        return Err(Error::param(
            "beta",
            format!("no prefix of the {schedule} schedule is usable for n = {n}, beta = {beta}"),
        ));
    }
    Ok(out)
}

/// `f⁻¹(j)` for `j = 0..=f(T)`; entry 0 is unused.
pub fn finv_table(prefixes: &[(usize, usize)]) -> Vec<usize> {
    let top = prefixes.last().map_or(0, |p| p.1);
    let mut table = vec![prefixes.first().map_or(0, |p| p.0); top + 1];
    let mut t = 0;
    for (j, slot) in table.iter_mut().enumerate().skip(1) {
        while prefixes[t].1 < j {
            t += 1;
        }
        *slot = prefixes[t].0;
    }
    table
}

/// `⌈log n / log log n⌉`, at least 1.
pub fn catch_all_k(n: usize) -> usize {
    let ln = (n as f64).log2();
    if ln <= 2.0 {
        return 1;
    }
    ((ln / ln.log2() - LOG_EPS).ceil() as usize).max(1)
}

pub const CALIBRATION_SIZE: usize = 64;

/// Size coefficient measured on a small subset build over the top-ranked
/// vertices: `max(2, ⌈|S| / C(|A|, 2)⌉)`.
pub fn calibrate_beta(g: &Graph, ranking: &[usize], seed: u64, inner: &dyn PairwiseBuilder) -> Result<u64> {
    let a: Vec<usize> = ranking.iter().take(CALIBRATION_SIZE.min(g.n())).copied().collect();
    let pairs = (a.len() * a.len().saturating_sub(1) / 2) as u64;
    if pairs == 0 {
        return Ok(2);
    }
    let b = build_subset(g, &a, 2, seed, inner)?;
    Ok((b.size() as u64).div_ceil(pairs).max(2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrioritizedConfig {
    pub schedule: Schedule,
    /// Measured by [`calibrate_beta`] when absent.
    pub beta: Option<u64>,
    /// [`catch_all_k`] when absent.
    pub catch_all_k: Option<usize>,
    pub seed: u64,
}

fn check_ranking(n: usize, ranking: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if ranking.len() != n {
        return Err(Error::param(
            "ranking",
            format!("has {} entries, expected {n}", ranking.len()),
        ));
    }
    for &v in ranking {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::param("ranking", format!("is not a permutation (vertex {v})")));
        }
    }
    Ok(())
}

/// Prefix `A_i = {v_1, …, v_{f(i)}}` gets a source-wise spanner for
/// `i ≤ T`; ranks beyond `f(T)` fall to a catch-all subset spanner over `V`.
pub fn build_prioritized(
    g: &Graph,
    ranking: &[usize],
    config: &PrioritizedConfig,
    inner: &dyn PairwiseBuilder,
) -> Result<SpannerBundle> {
    let n = g.n();
    check_ranking(n, ranking)?;
    let beta = match config.beta {
        Some(b) => b,
        None => calibrate_beta(g, ranking, config.seed, inner)?,
    };
    let prefixes = schedule_prefixes(config.schedule, n, beta)?;
    let finv = finv_table(&prefixes);
    let ck = config.catch_all_k.unwrap_or_else(|| catch_all_k(n));

    let built: Vec<SpannerBundle> = prefixes
        .par_iter()
        .map(|&(i, f)| {
            let k = k_of_prefix(f, n, beta).expect("prefix k defined up to T");
            let sub = build_subset(g, &ranking[..f], k, config.seed.wrapping_add(i as u64 + 1), inner)?;
            build_sourcewise(g, &sub)
        })
        .collect::<Result<_>>()?;
    let everyone: Vec<usize> = (0..n).collect();
    let catch_all = build_subset(g, &everyone, ck, config.seed, inner)?;

    let mut edges: BTreeSet<(usize, usize)> = catch_all.edges().clone();
    let mut stretch = catch_all.stretch;
    for b in &built {
        edges.extend(b.edges().iter().copied());
        stretch = stretch.max(b.stretch);
    }
    let mut position = vec![0; n];
    for (r, &v) in ranking.iter().enumerate() {
        position[v] = r;
    }
    let t = prefixes.last().unwrap().0;
    let provenance = Provenance::new("prioritized", Some(config.seed))
        .with("schedule", config.schedule)
        .with("beta", beta)
        .with("T", t)
        .with("f_T", prefixes.last().unwrap().1)
        .with("catch_all_k", ck)
        .with("inner", inner.name());
    let mut stats = std::collections::BTreeMap::new();
    for (&(i, f), b) in prefixes.iter().zip(&built) {
        stats.insert(format!("prefix_{i}_size"), f as u64);
        stats.insert(format!("prefix_{i}_edges"), b.size() as u64);
        stats.insert(format!("prefix_{i}_k"), k_of_prefix(f, n, beta).unwrap() as u64);
    }
    stats.insert("catch_all_edges".into(), catch_all.size() as u64);
    let oracle = PrioritizedOracle {
        ranking: ranking.to_vec(),
        position,
        schedule: config.schedule,
        thresholds: prefixes.iter().map(|p| p.1).collect(),
        first_index: config.schedule.first_index(),
        finv,
        prefixes: built.into_iter().map(|b| (b.stretch, b.oracle)).collect(),
        catch_all: (catch_all.stretch, Box::new(catch_all.oracle)),
    };
    let mut b = SpannerBundle::new(
        provenance,
        stretch,
        Support::All,
        edges,
        Oracle::Prioritized(Box::new(oracle)),
    );
    b.stats = stats;
    Ok(b)
}
