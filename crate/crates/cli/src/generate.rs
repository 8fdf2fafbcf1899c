//! `generate abcd` and `generate two-community`.

use std::path::{Path, PathBuf};

use ibfair_core::perturb::default_edge_probabilities;
use ibfair_core::synth::{generate_abcd_lite, generate_two_community, AbcdParams, SynthStats};
use ibfair_core::{Graph, NodeMap, Partition};
use serde::{Deserialize, Serialize};

use crate::args::{AbcdFlags, GenerateCommand, TwoCommunityFlags};
use crate::config::{self, Overlay};
use crate::output::{write_json, write_with, Provenance};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AbcdConfig {
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub params: AbcdParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoCommunityParams {
    pub n: usize,
    pub minority: f64,
    pub intra_p: Option<f64>,
    pub inter_p: Option<f64>,
    pub seed: u64,
}

impl Default for TwoCommunityParams {
    fn default() -> Self {
        TwoCommunityParams {
            n: 100,
            minority: 0.2,
            intra_p: None,
            inter_p: None,
            seed: 0,
        }
    }
}

impl TwoCommunityParams {
    /// Fills unset edge probabilities with their size-dependent defaults.
    pub fn resolved(mut self) -> Self {
        let (intra, inter) = default_edge_probabilities(self.n);
        self.intra_p.get_or_insert(intra);
        self.inter_p.get_or_insert(inter);
        self
    }

    pub fn generate(&self) -> ibfair_core::Result<(Graph, Partition)> {
        let p = self.clone().resolved();
        generate_two_community(
            p.n,
            p.minority,
            p.intra_p.unwrap_or_default(),
            p.inter_p.unwrap_or_default(),
            p.seed,
        )
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoCommunityConfig {
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub params: TwoCommunityParams,
}

#[derive(Serialize)]
struct GenerateRecord<'a> {
    schema_version: u32,
    provenance: Provenance,
    n: usize,
    m: usize,
    communities: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<&'a SynthStats>,
}

pub fn run(cmd: GenerateCommand) -> anyhow::Result<()> {
    match cmd {
        GenerateCommand::Abcd(flags) => abcd(flags),
        GenerateCommand::TwoCommunity(flags) => two_community(flags),
    }
}

fn abcd(f: AbcdFlags) -> anyhow::Result<()> {
    let mut o = Overlay(config::load(f.common.config.as_deref())?);
    o.set("out", &f.common.out)
        .set("n", &f.n)
        .set("gamma", &f.gamma)
        .set("d_min", &f.d_min)
        .set("d_max", &f.d_max)
        .set("beta", &f.beta)
        .set("c_min", &f.c_min)
        .set("c_max", &f.c_max)
        .set("xi", &f.xi)
        .set("d_max_iter", &f.d_max_iter)
        .set("c_max_iter", &f.c_max_iter)
        .set("seed", &f.seed);
    let cfg: AbcdConfig = o.resolve()?;
    let synth = generate_abcd_lite(&cfg.params)?;
    let dir = config::out_dir(cfg.out.clone());
    let prov = Provenance::new("generate abcd", &cfg);
    write_outputs(&dir, &synth.graph, &synth.planted, prov, Some(&synth.stats))
}

fn two_community(f: TwoCommunityFlags) -> anyhow::Result<()> {
    let mut o = Overlay(config::load(f.common.config.as_deref())?);
    o.set("out", &f.common.out)
        .set("n", &f.n)
        .set("minority", &f.minority)
        .set("intra_p", &f.intra_p)
        .set("inter_p", &f.inter_p)
        .set("seed", &f.seed);
    let mut cfg: TwoCommunityConfig = o.resolve()?;
    cfg.params = cfg.params.resolved();
    let (graph, planted) = cfg.params.generate()?;
    let dir = config::out_dir(cfg.out.clone());
    let prov = Provenance::new("generate two-community", &cfg);
    write_outputs(&dir, &graph, &planted, prov, None)
}

fn write_outputs(
    dir: &Path,
    graph: &Graph,
    planted: &Partition,
    provenance: Provenance,
    stats: Option<&SynthStats>,
) -> anyhow::Result<()> {
    let nodes = NodeMap::Identity(graph.n());
    let edges = dir.join("edges.txt");
    let partition = dir.join("partition.txt");
    let record = dir.join("provenance.json");
    write_with(&edges, |w| Ok(graph.write_edge_list(w, &nodes)?))?;
    write_with(&partition, |w| Ok(planted.write(w, &nodes)?))?;
    write_json(
        &record,
        &GenerateRecord {
            schema_version: crate::SCHEMA_VERSION,
            provenance,
            n: graph.n(),
            m: graph.m(),
            communities: planted.k(),
            stats,
        },
    )?;
    println!(
        "n={} m={} communities={} -> {}, {}, {}",
        graph.n(),
        graph.m(),
        planted.k(),
        edges.display(),
        partition.display(),
        record.display()
    );
    Ok(())
}
