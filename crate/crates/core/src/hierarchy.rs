//! Sampled level hierarchy `A_0 ⊇ … ⊇ A_F` with pivots, bunches and clusters.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{bounded_tree, multi_source_forest, DistanceTree, Graph, INF};
use crate::ratio::Ratio;

fn check_c(c: usize) -> Result<()> {
    if c < 2 {
        return Err(Error::param("c", format!("must be at least 2, got {c}")));
    }
    Ok(())
}

/// `f(i) = ⌊i/c⌋·c + c − 1`.
pub fn f_index(c: usize, i: usize) -> Result<usize> {
    check_c(c)?;
    Ok(i / c * c + c - 1)
}

/// `f⁻¹(j) = ⌊j/c⌋·c`, the least `i` with `f(i) ≥ j`.
pub fn f_inv(c: usize, j: usize) -> Result<usize> {
    check_c(c)?;
    Ok(j / c * c)
}

/// `λ_0 .. λ_{len-1}` by the recurrence `λ_i = 1 + Σ_{l < f⁻¹(i)} λ_l`.
pub fn lambda_sequence(c: usize, len: usize) -> Result<Vec<BigUint>> {
    check_c(c)?;
    let mut out: Vec<BigUint> = Vec::with_capacity(len);
    // prefix[t] = λ_0 + … + λ_{t-1}
    let mut prefix = vec![BigUint::from(0u32)];
    for i in 0..len {
        let lam = if i == 0 {
            BigUint::one()
        } else {
            BigUint::one() + &prefix[f_inv(c, i)?]
        };
        prefix.push(prefix.last().unwrap() + &lam);
        out.push(lam);
    }
    Ok(out)
}

/// `(c+1)^{⌊i/c⌋}`.
pub fn lambda_closed(c: usize, i: usize) -> Result<BigUint> {
    check_c(c)?;
    Ok(BigUint::from(c + 1).pow((i / c) as u32))
}

/// `c · ⌈log_{c+1}(k+1)⌉`.
pub fn level_count(k: usize, c: usize) -> usize {
    let mut t = 0;
    let mut pow = 1u128;
    while pow < (k as u128) + 1 {
        pow *= (c as u128) + 1;
        t += 1;
    }
    c * t
}

/// `k^{−9/(c−1)}` rounded to a multiple of 10⁻⁶, clamped to `[10⁻⁶, 1/2]`.
pub fn default_delta(k: usize, c: usize) -> Ratio {
    let x = (k as f64).powf(-9.0 / (c as f64 - 1.0));
    let num = ((x * 1e6).round() as u64).clamp(1, 500_000);
    Ratio::new(num, 1_000_000)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LevelParams {
    pub k: usize,
    pub c: usize,
    pub delta: Ratio,
    pub levels: usize,
    pub seed: u64,
}

impl LevelParams {
    pub fn new(k: usize, c: usize, seed: u64) -> Result<Self> {
        check_c(c)?;
        if c > k {
            return Err(Error::param("c", format!("must not exceed k = {k}, got {c}")));
        }
        Ok(LevelParams {
            k,
            c,
            delta: default_delta(k, c),
            levels: level_count(k, c),
            seed,
        })
    }

    pub fn with_delta(mut self, delta: Ratio) -> Result<Self> {
        if delta.is_infinite() || delta.num() == 0 || delta > Ratio::new(1, 2) {
            return Err(Error::param("delta", format!("must lie in (0, 1/2], got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    /// `δ · n^{−λ_i/k}`.
    pub fn sample_probability(&self, n: usize, lambda: &BigUint) -> f64 {
        let lam = lambda.to_f64().unwrap_or(f64::INFINITY);
        self.delta.to_f64() * (n as f64).powf(-lam / self.k as f64)
    }

    /// Expected bunch size bound `(1/δ)·n^{λ_j/k}`.
    pub fn bunch_bound(&self, n: usize, j: usize) -> f64 {
        let lam = lambda_closed(self.c, j).unwrap().to_f64().unwrap_or(f64::INFINITY);
        (n as f64).powf(lam / self.k as f64) / self.delta.to_f64()
    }
}

/// Truncated shortest-path tree of one center `v ∈ A_j \ A_{j+1}` over
/// `{u : d(u, v) < d(u, A_{j+1})}`.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub center: usize,
    pub level: usize,
    /// `(u, d(u, center), next hop towards center)`, sorted by `u`.
    members: Vec<(usize, u64, usize)>,
}

impl Cluster {
    pub fn members(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.members.iter().map(|&(u, d, _)| (u, d))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, u: usize) -> Option<(u64, usize)> {
        self.members
            .binary_search_by_key(&u, |m| m.0)
            .ok()
            .map(|i| (self.members[i].1, self.members[i].2))
    }

    pub fn contains(&self, u: usize) -> bool {
        self.get(u).is_some()
    }

    /// `u → center` walk along the stored next-hop pointers.
    pub fn walk(&self, u: usize) -> Option<Vec<usize>> {
        let mut x = u;
        let mut out = vec![u];
        while x != self.center {
            let (_, next) = self.get(x)?;
            out.push(next);
            x = next;
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub params: LevelParams,
    n: usize,
    levels: Vec<Vec<usize>>,
    /// Largest `i` with `v ∈ A_i`.
    rank: Vec<usize>,
    /// Nearest-`A_i` forests for `i < F`; `None` when `A_i` is empty.
    forests: Vec<Option<DistanceTree>>,
    /// Per level `j`, the clusters of `A_j \ A_{j+1}` sorted by center.
    clusters: Vec<Vec<Cluster>>,
    /// `bunches[j][u]` sorted by member id.
    bunches: Vec<Vec<Vec<(usize, u64)>>>,
}

/// Sample `A_1 .. A_{F-1}` and force `A_F = ∅`.
pub fn sample_hierarchy(g: &Graph, params: &LevelParams) -> Result<Hierarchy> {
    let n = g.n();
    let f = params.levels;
    let lambdas = lambda_sequence(params.c, f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut levels = vec![(0..n).collect::<Vec<_>>()];
    for lam in lambdas.iter().take(f.saturating_sub(1)) {
        let p = params.sample_probability(n, lam);
        let next: Vec<usize> = levels
            .last()
            .unwrap()
            .iter()
            .copied()
            .filter(|_| rng.gen::<f64>() < p)
            .collect();
        levels.push(next);
    }
    levels.push(Vec::new());
    Hierarchy::from_levels(g, params.clone(), levels)
}

impl Hierarchy {
    /// Build pivots, bunches and clusters for explicit levels `A_0 .. A_F`.
    pub fn from_levels(g: &Graph, params: LevelParams, mut levels: Vec<Vec<usize>>) -> Result<Self> {
        let n = g.n();
        let f = params.levels;
        if levels.len() != f + 1 {
            return Err(Error::param(
                "levels",
                format!("need {} sets, got {}", f + 1, levels.len()),
            ));
        }
        for l in &mut levels {
            l.sort_unstable();
            l.dedup();
            if let Some(&v) = l.last() {
                g.check_vertex(v)?;
            }
        }
        if levels[0].len() != n || !levels[f].is_empty() {
            return Err(Error::param("levels", "A_0 must be V and A_F empty"));
        }
        let mut rank = vec![0usize; n];
        for i in 1..=f {
            let mut prev = levels[i - 1].iter().peekable();
            for &v in &levels[i] {
                while prev.next_if(|&&x| x < v).is_some() {}
                if prev.peek() != Some(&&v) {
                    return Err(Error::param(
                        "levels",
                        format!("vertex {v} in A_{i} but not A_{}", i - 1),
                    ));
                }
                rank[v] = i;
            }
        }
        let forests: Vec<Option<DistanceTree>> = levels[..f]
            .par_iter()
            .map(|a| {
                if a.is_empty() {
                    Ok(None)
                } else {
                    multi_source_forest(g, a).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let dist_to =
            |i: usize, x: usize| -> u64 { forests.get(i).and_then(|t| t.as_ref()).map_or(INF, |t| t.dist[x]) };
        let mut clusters = Vec::with_capacity(f);
        for (j, lvl) in levels.iter().enumerate().take(f) {
            let centers: Vec<usize> = lvl.iter().copied().filter(|&v| rank[v] == j).collect();
            let level: Vec<Cluster> = centers
                .par_iter()
                .map(|&v| {
                    let tree = bounded_tree(g, v, |x, d| d < dist_to(j + 1, x));
                    let mut members: Vec<(usize, u64, usize)> = tree
                        .dist
                        .iter()
                        .map(|(&u, &d)| (u, d, tree.parent.get(&u).copied().unwrap_or(u)))
                        .collect();
                    members.sort_unstable();
                    Cluster {
                        center: v,
                        level: j,
                        members,
                    }
                })
                .collect();
            clusters.push(level);
        }
        let mut bunches = vec![vec![Vec::new(); n]; f];
        for (j, level) in clusters.iter().enumerate() {
            for cl in level {
                for (u, d) in cl.members() {
                    bunches[j][u].push((cl.center, d));
                }
            }
        }
        Ok(Hierarchy {
            params,
            n,
            levels,
            rank,
            forests,
            clusters,
            bunches,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `F`.
    pub fn depth(&self) -> usize {
        self.params.levels
    }

    pub fn level(&self, i: usize) -> &[usize] {
        &self.levels[i]
    }

    pub fn in_level(&self, v: usize, i: usize) -> bool {
        i == 0 || (i < self.levels.len() - 1 && self.rank[v] >= i)
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// `(p_i(u), d(u, p_i(u)))`; `None` if `A_i` is empty or unreachable.
    pub fn pivot(&self, i: usize, u: usize) -> Option<(usize, u64)> {
        let t = self.forests.get(i)?.as_ref()?;
        t.root[u].map(|r| (r, t.dist[u]))
    }

    /// `d(u, A_i)`, `INF` when `i = F` or nothing is reachable.
    pub fn dist_to_level(&self, i: usize, u: usize) -> u64 {
        self.forests.get(i).and_then(|t| t.as_ref()).map_or(INF, |t| t.dist[u])
    }

    /// Level-`i` pivot forest; the parent of `u` is `q_i(u)`.
    pub fn forest(&self, i: usize) -> Option<&DistanceTree> {
        self.forests.get(i)?.as_ref()
    }

    /// `B_j(u)` as `(member, distance)` sorted by member id.
    pub fn bunch(&self, j: usize, u: usize) -> &[(usize, u64)] {
        &self.bunches[j][u]
    }

    pub fn clusters(&self, j: usize) -> &[Cluster] {
        &self.clusters[j]
    }

    /// Untrimmed cluster of `v` at its own level.
    pub fn cluster_of(&self, v: usize) -> Option<&Cluster> {
        let j = self.rank[v];
        let level = self.clusters.get(j)?;
        level.binary_search_by_key(&v, |c| c.center).ok().map(|i| &level[i])
    }

    /// `C(v) = {u ∈ A_{f⁻¹(j)} : v ∈ B_j(u)}` for `v ∈ A_j \ A_{j+1}`.
    pub fn cluster_members(&self, cl: &Cluster) -> Vec<(usize, u64)> {
        let lo = f_inv(self.params.c, cl.level).unwrap();
        cl.members().filter(|&(u, _)| self.in_level(u, lo)).collect()
    }
}
