//! Synthetic graphs with a planted partition.
//!
//! [`generate_abcd_lite`] follows the shape of the ABCD benchmark: power-law
//! community sizes and degrees, each node's stubs split between its own
//! community and a global background configuration model. It is a
//! simplified generator and does not reproduce reference ABCD output.
//!
//! The background share is corrected for background edges that happen to
//! land inside a community, so that `xi` is the expected fraction of
//! inter-community edges rather than the raw background share (which would
//! under-shoot it by a factor `1 − Σ_c (vol_c / vol)²`). At `xi = 1` the
//! background share saturates at 1 and edges ignore the communities.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::seed::{self, Rng};

/// Attempts at re-wiring one self-loop or multi-edge before its two stubs
/// are dropped.
const REWIRE_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbcdParams {
    pub n: usize,
    /// Degree power-law exponent.
    pub gamma: f64,
    pub d_min: usize,
    pub d_max: usize,
    /// Community-size power-law exponent.
    pub beta: f64,
    pub c_min: usize,
    pub c_max: usize,
    /// Expected fraction of inter-community edges.
    pub xi: f64,
    pub d_max_iter: usize,
    pub c_max_iter: usize,
    pub seed: u64,
}

impl Default for AbcdParams {
    fn default() -> Self {
        AbcdParams {
            n: 10_000,
            gamma: 2.5,
            d_min: 5,
            d_max: 50,
            beta: 1.5,
            c_min: 100,
            c_max: 1_000,
            xi: 0.2,
            d_max_iter: 1_000,
            c_max_iter: 1_000,
            seed: 0,
        }
    }
}

impl AbcdParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Error::param(name, reason);
        if self.d_min < 1 {
            return Err(bad("d_min", "must be at least 1".into()));
        }
        if self.d_min > self.d_max {
            return Err(bad(
                "d_max",
                format!("{} is below d_min {}", self.d_max, self.d_min),
            ));
        }
        if self.d_max >= self.n {
            return Err(bad(
                "d_max",
                format!("{} must be below n = {}", self.d_max, self.n),
            ));
        }
        if self.c_min < 1 || self.c_min > self.c_max {
            return Err(bad(
                "c_min",
                format!("need 1 <= c_min <= c_max, got {}", self.c_min),
            ));
        }
        if self.c_max > self.n {
            return Err(bad(
                "c_max",
                format!("{} exceeds n = {}", self.c_max, self.n),
            ));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(bad("xi", format!("{} is outside [0, 1]", self.xi)));
        }
        for (name, v) in [("gamma", self.gamma), ("beta", self.beta)] {
            if !v.is_finite() {
                return Err(bad(name, "must be finite".into()));
            }
        }
        if self.d_max_iter == 0 {
            return Err(bad("d_max_iter", "must be positive".into()));
        }
        if self.c_max_iter == 0 {
            return Err(bad("c_max_iter", "must be positive".into()));
        }
        Ok(())
    }
}

/// Generator bookkeeping, recorded alongside the output files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthStats {
    pub communities: usize,
    /// Share of stubs routed to the background graph after correction.
    pub background_share: f64,
    /// Community stubs that exceeded `size − 1` and went to the background.
    pub diverted_stubs: usize,
    /// Stubs discarded (irreparable self-loops/multi-edges, or excess
    /// community stubs when there is no background graph).
    pub dropped_stubs: usize,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub graph: Graph,
    pub planted: Partition,
    pub stats: SynthStats,
}

/// Inverse-CDF sampler for `P(k) ∝ k^(−exponent)` on `lo..=hi`.
struct TruncatedPowerLaw {
    lo: usize,
    cumulative: Vec<f64>,
}

impl TruncatedPowerLaw {
    fn new(exponent: f64, lo: usize, hi: usize) -> Self {
        let mut acc = 0.0;
        let cumulative = (lo..=hi)
            .map(|k| {
                acc += (k as f64).powf(-exponent);
                acc
            })
            .collect();
        TruncatedPowerLaw { lo, cumulative }
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.lo + idx.min(self.cumulative.len() - 1)
    }
}

fn community_sizes(p: &AbcdParams, rng: &mut Rng) -> Result<Vec<usize>> {
    let law = TruncatedPowerLaw::new(p.beta, p.c_min, p.c_max);
    for _ in 0..p.c_max_iter {
        let mut sizes = Vec::new();
        let mut total = 0;
        while total < p.n {
            let s = law.sample(rng).min(p.n - total);
            sizes.push(s);
            total += s;
        }
        if *sizes.last().unwrap() >= p.c_min {
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            return Ok(sizes);
        }
    }
    Err(Error::Sampling {
        stage: "community size",
        attempts: p.c_max_iter,
    })
}

fn degrees(p: &AbcdParams, rng: &mut Rng) -> Result<Vec<usize>> {
    let law = TruncatedPowerLaw::new(p.gamma, p.d_min, p.d_max);
    let mut deg: Vec<usize> = (0..p.n).map(|_| law.sample(rng)).collect();
    let mut sum: usize = deg.iter().sum();
    let mut attempts = 0;
    while sum % 2 == 1 {
        if attempts == p.d_max_iter {
            return Err(Error::Sampling {
                stage: "degree",
                attempts,
            });
        }
        attempts += 1;
        let i = rng.random_range(0..p.n);
        sum -= deg[i];
        deg[i] = law.sample(rng);
        sum += deg[i];
    }
    Ok(deg)
}

/// Configuration-model pairing of `stubs` into `out`, avoiding self-loops
/// and edges already in `present`. Bad pairs are re-wired against edges of
/// the same pass; returns the number of stubs dropped.
fn pair_stubs(
    mut stubs: Vec<usize>,
    present: &mut HashSet<(usize, usize)>,
    out: &mut Vec<(usize, usize)>,
    rng: &mut Rng,
) -> usize {
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    stubs.shuffle(rng);
    let start = out.len();
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && present.insert(key(u, v)) {
            out.push(key(u, v));
        } else {
            bad.push((u, v));
        }
    }
    let mut dropped = stubs.len() % 2;
    for (u, v) in bad {
        let mut placed = false;
        let pool = out.len() - start;
        for _ in 0..REWIRE_ATTEMPTS {
            if pool == 0 {
                break;
            }
            let e = start + rng.random_range(0..pool);
            let (mut a, mut b) = out[e];
            if rng.random::<bool>() {
                std::mem::swap(&mut a, &mut b);
            }
            let (first, second) = (key(u, a), key(v, b));
            if u == a || v == b || first == second {
                continue;
            }
            if present.contains(&first) || present.contains(&second) {
                continue;
            }
            present.remove(&out[e]);
            present.insert(first);
            present.insert(second);
            out[e] = first;
            out.push(second);
            placed = true;
            break;
        }
        if !placed {
            dropped += 2;
        }
    }
    dropped
}

pub fn generate_abcd_lite(p: &AbcdParams) -> Result<Synthetic> {
    p.validate()?;
    let mut rng = seed::rng(p.seed);
    let sizes = community_sizes(p, &mut rng)?;
    let deg = degrees(p, &mut rng)?;

    let mut nodes: Vec<usize> = (0..p.n).collect();
    nodes.shuffle(&mut rng);
    let mut labels = vec![0usize; p.n];
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for (c, &s) in sizes.iter().enumerate() {
        let block = nodes[offset..offset + s].to_vec();
        for &v in &block {
            labels[v] = c;
        }
        members.push(block);
        offset += s;
    }

    let volume: f64 = deg.iter().sum::<usize>() as f64;
    let concentration: f64 = members
        .iter()
        .map(|m| {
            let share = m.iter().map(|&v| deg[v]).sum::<usize>() as f64 / volume;
            share * share
        })
        .sum();
    let spread = 1.0 - concentration;
    let share = if spread > 0.0 {
        (p.xi / spread).min(1.0)
    } else {
        p.xi
    };
    let has_background = p.xi > 0.0;

    let mut stats = SynthStats {
        communities: sizes.len(),
        background_share: share,
        ..SynthStats::default()
    };
    let mut community_stubs = vec![0usize; p.n];
    let mut background_stubs = vec![0usize; p.n];
    for (c, block) in members.iter().enumerate() {
        let capacity = sizes[c] - 1;
        for &v in block {
            let exact = share * deg[v] as f64;
            let mut z = exact.floor() as usize;
            if rng.random::<f64>() < exact - exact.floor() {
                z += 1;
            }
            let mut y = deg[v] - z;
            if y > capacity {
                let excess = y - capacity;
                y = capacity;
                if has_background {
                    z += excess;
                    stats.diverted_stubs += excess;
                } else {
                    stats.dropped_stubs += excess;
                }
            }
            community_stubs[v] = y;
            background_stubs[v] = z;
        }
        if block.iter().map(|&v| community_stubs[v]).sum::<usize>() % 2 == 1 {
            let &v = block
                .iter()
                .max_by_key(|&&v| (community_stubs[v], std::cmp::Reverse(v)))
                .unwrap();
            community_stubs[v] -= 1;
            if has_background {
                background_stubs[v] += 1;
                stats.diverted_stubs += 1;
            } else {
                stats.dropped_stubs += 1;
            }
        }
    }

    let mut present = HashSet::new();
    let mut edges = Vec::new();
    for block in &members {
        let stubs: Vec<usize> = block
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, community_stubs[v]))
            .collect();
        stats.dropped_stubs += pair_stubs(stubs, &mut present, &mut edges, &mut rng);
    }
    let stubs: Vec<usize> = (0..p.n)
        .flat_map(|v| std::iter::repeat_n(v, background_stubs[v]))
        .collect();
    stats.dropped_stubs += pair_stubs(stubs, &mut present, &mut edges, &mut rng);

    let (graph, _) = Graph::from_edges(p.n, edges)?;
    Ok(Synthetic {
        graph,
        planted: Partition::from_labels(&labels),
        stats,
    })
}

/// Calls `f` for each index in `0..total` kept by independent Bernoulli(p)
/// trials, jumping over rejected runs with geometric skips.
fn bernoulli_indices(total: u64, p: f64, rng: &mut Rng, mut f: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(f);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx: u64 = 0;
    loop {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if skip >= (total - idx) as f64 {
            return;
        }
        idx += skip as u64;
        f(idx);
        idx += 1;
        if idx >= total {
            return;
        }
    }
}

/// `t`-th pair `(u, v)`, `u < v`, in the order (0,1), (0,2), (1,2), (0,3), …
fn triangle_pair(t: u64) -> (u64, u64) {
    let mut v = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > t {
        v -= 1;
    }
    while (v + 1) * v / 2 <= t {
        v += 1;
    }
    (t - v * (v - 1) / 2, v)
}

/// Stochastic block model with blocks of the given sizes: node ids are
/// assigned block by block, edges appear independently with `p_in` inside
/// a block and `p_out` across blocks.
pub fn generate_planted(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Partition)> {
    for (name, v) in [("intra_p", p_in), ("inter_p", p_out)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(name, format!("{v} is outside [0, 1]")));
        }
    }
    if sizes.contains(&0) {
        return Err(Error::param("sizes", "every block needs at least one node"));
    }
    let mut rng = seed::rng(seed);
    let n: usize = sizes.iter().sum();
    let mut starts = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        starts.push(acc);
        acc += s;
    }
    let mut edges = Vec::new();
    for (a, (&sa, &oa)) in sizes.iter().zip(&starts).enumerate() {
        let within = sa as u64 * (sa as u64 - 1) / 2;
        bernoulli_indices(within, p_in, &mut rng, |t| {
            let (u, v) = triangle_pair(t);
            edges.push((oa + u as usize, oa + v as usize));
        });
        for (&sb, &ob) in sizes.iter().zip(&starts).skip(a + 1) {
            bernoulli_indices(sa as u64 * sb as u64, p_out, &mut rng, |t| {
                edges.push((oa + (t / sb as u64) as usize, ob + (t % sb as u64) as usize));
            });
        }
    }
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect();
    let (graph, _) = Graph::from_edges(n, edges)?;
    Ok((graph, Partition::from_labels(&labels)))
}

/// Block sizes of the minority/majority planting: `round(minority_frac · n)`
/// (half away from zero) and the rest.
pub fn two_community_sizes(n: usize, minority_frac: f64) -> Result<[usize; 2]> {
    if !(minority_frac > 0.0 && minority_frac < 1.0) {
        return Err(Error::param(
            "minority",
            format!("{minority_frac} is outside (0, 1)"),
        ));
    }
    let minority = (minority_frac * n as f64).round() as usize;
    if minority == 0 || minority >= n {
        return Err(Error::param(
            "minority",
            format!("n = {n} with fraction {minority_frac} leaves a block empty"),
        ));
    }
    Ok([minority, n - minority])
}

/// Two-block planting: community 0 is the minority (nodes
/// `0..round(minority_frac · n)`), community 1 the majority.
pub fn generate_two_community(
    n: usize,
    minority_frac: f64,
    intra_p: f64,
    inter_p: f64,
    seed: u64,
) -> Result<(Graph, Partition)> {
    let sizes = two_community_sizes(n, minority_frac)?;
    generate_planted(&sizes, intra_p, inter_p, seed)
}
