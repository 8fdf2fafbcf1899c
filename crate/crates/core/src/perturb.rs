//! Controlled perturbations of a planted partition and IB response sweeps.
//!
//! A focal node's predicted community is derived from its ground-truth one
//! by adding outsiders (expand), removing members (shrink), or both
//! (change), in proportion to a ratio in `[0, 1]`. The focal node always
//! stays in its own predicted community. Counts are
//! `round(ratio · available)`, rounding half away from zero.
//!
//! IB depends only on the three counts (overlap, old size, new size), so
//! every run at a given ratio yields the same focal IB; runs still draw
//! different nodes and are averaged, which keeps the protocol intact for
//! node-sensitive variants.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::bias::{ib_all_fast_with, mean_and_population_std};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partition::Partition;
use crate::seed::{self, tag, Rng};
use crate::synth::generate_two_community;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Expand,
    Shrink,
    Change,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Minority,
    Majority,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Expand, Scenario::Shrink, Scenario::Change];
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Minority, Target::Majority];

    /// Planted community id of the target in a two-community planting.
    fn community(self) -> usize {
        match self {
            Target::Minority => 0,
            Target::Majority => 1,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Expand => "expand",
            Scenario::Shrink => "shrink",
            Scenario::Change => "change",
        })
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Minority => "minority",
            Target::Majority => "majority",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expand" => Ok(Scenario::Expand),
            "shrink" => Ok(Scenario::Shrink),
            "change" => Ok(Scenario::Change),
            other => Err(Error::param(
                "scenario",
                format!("unknown scenario `{other}`"),
            )),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minority" => Ok(Target::Minority),
            "majority" => Ok(Target::Majority),
            other => Err(Error::param("target", format!("unknown target `{other}`"))),
        }
    }
}

fn count_for(ratio: f64, available: usize) -> usize {
    ((ratio * available as f64).round() as usize).min(available)
}

fn check_inputs(gt: &Partition, focal: usize, ratio: f64) -> Result<()> {
    if focal >= gt.n() {
        return Err(Error::NodeOutOfRange {
            index: focal,
            n: gt.n(),
        });
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::param("ratio", format!("{ratio} is outside [0, 1]")));
    }
    Ok(())
}

/// Moves `round(ratio · |members|)` random entries of `members` to `to`.
fn relabel_some(labels: &mut [usize], members: &[usize], ratio: f64, to: usize, rng: &mut Rng) {
    let k = count_for(ratio, members.len());
    for pos in index::sample(rng, members.len(), k) {
        labels[members[pos]] = to;
    }
}

fn split(gt: &Partition, focal: usize) -> (Vec<usize>, Vec<usize>) {
    let c = gt.label(focal);
    let mut peers = Vec::new();
    let mut outside = Vec::new();
    for (i, &l) in gt.labels().iter().enumerate() {
        if l != c {
            outside.push(i);
        } else if i != focal {
            peers.push(i);
        }
    }
    (peers, outside)
}

/// Relabels `round(ratio · |outside|)` random non-members into the focal
/// node's community.
pub fn perturb_expand(gt: &Partition, focal: usize, ratio: f64, seed: u64) -> Result<Partition> {
    perturb(Scenario::Expand, gt, focal, ratio, seed)
}

/// Moves `round(ratio · (s − 1))` random members other than the focal node
/// into one fresh community.
pub fn perturb_shrink(gt: &Partition, focal: usize, ratio: f64, seed: u64) -> Result<Partition> {
    perturb(Scenario::Shrink, gt, focal, ratio, seed)
}

/// Shrink and expand at the same ratio; at ratio 1 the focal node's
/// predicted community is its complement plus itself.
pub fn perturb_change(gt: &Partition, focal: usize, ratio: f64, seed: u64) -> Result<Partition> {
    perturb(Scenario::Change, gt, focal, ratio, seed)
}

pub fn perturb(
    scenario: Scenario,
    gt: &Partition,
    focal: usize,
    ratio: f64,
    seed: u64,
) -> Result<Partition> {
    check_inputs(gt, focal, ratio)?;
    let mut rng = seed::rng(seed);
    let (peers, outside) = split(gt, focal);
    let mut labels = gt.labels().to_vec();
    let home = gt.label(focal);
    let fresh = gt.k();
    if matches!(scenario, Scenario::Shrink | Scenario::Change) {
        relabel_some(&mut labels, &peers, ratio, fresh, &mut rng);
    }
    if matches!(scenario, Scenario::Expand | Scenario::Change) {
        relabel_some(&mut labels, &outside, ratio, home, &mut rng);
    }
    Ok(Partition::from_labels(&labels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub target: Target,
    /// Ascending, each in `[0, 1]`.
    pub ratios: Vec<f64>,
    pub runs: usize,
    pub n: usize,
    pub seed: u64,
    pub minority_frac: f64,
    /// Edge probabilities of the planted graph; default to `min(1, 20/n)`
    /// inside blocks and `min(1, 1/n)` across.
    pub intra_p: Option<f64>,
    pub inter_p: Option<f64>,
}

impl SweepConfig {
    pub fn new(scenario: Scenario, target: Target, n: usize) -> Self {
        SweepConfig {
            scenario,
            target,
            ratios: ratio_grid(10),
            runs: 100,
            n,
            seed: 0,
            minority_frac: 0.2,
            intra_p: None,
            inter_p: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::param("runs", "must be at least 1"));
        }
        if self.ratios.is_empty() {
            return Err(Error::param("ratios", "need at least one ratio"));
        }
        if let Some(r) = self.ratios.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::param("ratios", format!("{r} is outside [0, 1]")));
        }
        if self.ratios.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("ratios", "must be sorted ascending"));
        }
        Ok(())
    }
}

/// `(min(1, 20/n), min(1, 1/n))`: sparse blocks with an expected internal
/// degree near 20·block share and about one edge per node across.
pub fn default_edge_probabilities(n: usize) -> (f64, f64) {
    ((20.0 / n as f64).min(1.0), (1.0 / n as f64).min(1.0))
}

/// `0, 1/steps, …, 1`, each computed as `i / steps` so that printed values
/// stay short (`0.1`, not `0.30000000000000004`).
pub fn ratio_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ratio: f64,
    pub mean_ib: f64,
    /// Population standard deviation across runs.
    pub std_ib: f64,
    pub runs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub target: Target,
    pub n: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean_ib).collect()
    }

    pub const CSV_HEADER: &'static str = "scenario,target,n,ratio,mean_ib,std_ib";
    pub const RUNS_CSV_HEADER: &'static str = "scenario,target,n,ratio,run,ib";

    /// CSV `scenario,target,n,ratio,mean_ib,std_ib`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.scenario, self.target, self.n, p.ratio, p.mean_ib, p.std_ib
            )?;
        }
        Ok(())
    }

    /// Long format, one row per run.
    pub fn write_runs_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::RUNS_CSV_HEADER)?;
        for p in &self.points {
            for (run, v) in p.runs.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    self.scenario, self.target, self.n, p.ratio, run, v
                )?;
            }
        }
        Ok(())
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, Execution::default())
}

/// Builds the two-community planting once, then for every (ratio, run)
/// picks a random focal node in the target community, perturbs, and reads
/// the focal node's IB off `ib_all_fast`. Point `(r, k)` draws from seed
/// `derive(seed, [SWEEP, r, k])`, so results do not depend on scheduling.
pub fn run_sweep_with(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    cfg.validate()?;
    let n = cfg.n;
    let (default_intra, default_inter) = default_edge_probabilities(n);
    let intra = cfg.intra_p.unwrap_or(default_intra);
    let inter = cfg.inter_p.unwrap_or(default_inter);
    let planting_seed = seed::derive(cfg.seed, &[tag::PLANTING]);
    let (_graph, gt) = generate_two_community(n, cfg.minority_frac, intra, inter, planting_seed)?;
    let members = gt.members();
    let pool = &members[cfg.target.community()];

    let runs = cfg.runs;
    let values = exec.map(cfg.ratios.len() * runs, |idx| -> Result<f64> {
        let (r, k) = (idx / runs, idx % runs);
        let point_seed = seed::derive(cfg.seed, &[tag::SWEEP, r as u64, k as u64]);
        let mut rng = seed::rng(point_seed);
        let focal = pool[index::sample(&mut rng, pool.len(), 1).index(0)];
        let pred = perturb(
            cfg.scenario,
            &gt,
            focal,
            cfg.ratios[r],
            seed::derive(point_seed, &[1]),
        )?;
        Ok(ib_all_fast_with(&gt, &pred, Execution::Sequential)?.ib[focal])
    });
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;

    let points = cfg
        .ratios
        .iter()
        .zip(values.chunks(runs))
        .map(|(&ratio, chunk)| {
            let (mean_ib, std_ib) = mean_and_population_std(chunk);
            SweepPoint {
                ratio,
                mean_ib,
                std_ib,
                runs: chunk.to_vec(),
            }
        })
        .collect();
    Ok(SweepResult {
        scenario: cfg.scenario,
        target: cfg.target,
        n,
        points,
    })
}
