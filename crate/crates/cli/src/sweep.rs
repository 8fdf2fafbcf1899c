//! `sweep`: one CSV per (scenario, target) combination.

use std::path::PathBuf;

use anyhow::bail;
use ibfair_core::perturb::{ratio_grid, run_sweep, Scenario, SweepConfig, Target};
use serde::{Deserialize, Serialize};

use crate::args::SweepFlags;
use crate::config::{self, Overlay};
use crate::output::{write_json, write_with, Provenance};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepCliConfig {
    pub scenarios: Vec<Scenario>,
    pub targets: Vec<Target>,
    /// Explicit grid; overrides `steps`.
    pub ratios: Vec<f64>,
    pub steps: usize,
    pub runs: usize,
    pub n: usize,
    pub minority: f64,
    pub intra_p: Option<f64>,
    pub inter_p: Option<f64>,
    pub per_run: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for SweepCliConfig {
    fn default() -> Self {
        SweepCliConfig {
            scenarios: Scenario::ALL.to_vec(),
            targets: Target::ALL.to_vec(),
            ratios: Vec::new(),
            steps: 10,
            runs: 100,
            n: 10_000,
            minority: 0.2,
            intra_p: None,
            inter_p: None,
            per_run: false,
            seed: 0,
            out: None,
        }
    }
}

impl SweepCliConfig {
    pub fn sweep_config(&self, scenario: Scenario, target: Target) -> SweepConfig {
        SweepConfig {
            ratios: if self.ratios.is_empty() {
                ratio_grid(self.steps)
            } else {
                self.ratios.clone()
            },
            runs: self.runs,
            seed: self.seed,
            minority_frac: self.minority,
            intra_p: self.intra_p,
            inter_p: self.inter_p,
            ..SweepConfig::new(scenario, target, self.n)
        }
    }
}

pub fn file_stem(scenario: Scenario, target: Target) -> String {
    format!("sweep_{scenario}_{target}")
}

pub fn run(f: SweepFlags) -> anyhow::Result<()> {
    let mut o = Overlay(config::load(f.common.config.as_deref())?);
    o.set("out", &f.common.out)
        .set_list("scenarios", &f.scenarios)
        .set_list("targets", &f.targets)
        .set_list("ratios", &f.ratios)
        .set("steps", &f.steps)
        .set("runs", &f.runs)
        .set("n", &f.n)
        .set("minority", &f.minority)
        .set("intra_p", &f.intra_p)
        .set("inter_p", &f.inter_p)
        .set("per_run", &f.per_run)
        .set("seed", &f.seed);
    let cfg: SweepCliConfig = o.resolve()?;
    if cfg.scenarios.is_empty() || cfg.targets.is_empty() {
        bail!("need at least one scenario and one target");
    }
    if cfg.ratios.is_empty() && cfg.steps == 0 {
        bail!("steps must be at least 1");
    }
    let dir = config::out_dir(cfg.out.clone());
    // Validate every combination before writing anything.
    for &s in &cfg.scenarios {
        for &t in &cfg.targets {
            cfg.sweep_config(s, t).validate()?;
        }
    }
    for &scenario in &cfg.scenarios {
        for &target in &cfg.targets {
            let result = run_sweep(&cfg.sweep_config(scenario, target))?;
            let stem = file_stem(scenario, target);
            let path = dir.join(format!("{stem}.csv"));
            write_with(&path, |w| Ok(result.write_csv(w)?))?;
            if cfg.per_run {
                write_with(&dir.join(format!("{stem}_runs.csv")), |w| {
                    Ok(result.write_runs_csv(w)?)
                })?;
            }
            let last = result.points.last().map_or(f64::NAN, |p| p.mean_ib);
            println!(
                "{scenario}/{target}: IB at ratio {} = {last:.4} -> {}",
                result.points.last().map_or(f64::NAN, |p| p.ratio),
                path.display()
            );
        }
    }
    #[derive(Serialize)]
    struct Record {
        schema_version: u32,
        provenance: Provenance,
    }
    write_json(
        &dir.join("sweep.json"),
        &Record {
            schema_version: crate::SCHEMA_VERSION,
            provenance: Provenance::new("sweep", &cfg),
        },
    )
}
