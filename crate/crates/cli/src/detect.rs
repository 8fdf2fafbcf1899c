//! `detect`: one detector, one graph, one partition file.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context};
use ibfair_core::detect::{run_detector_with, DetectorSpec};
use ibfair_core::graph::load_edge_list;
use serde::{Deserialize, Serialize};

use crate::args::{DetectFlags, Ids};
use crate::config::{self, Overlay};
use crate::output::write_with;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    pub graph: Option<PathBuf>,
    pub ids: Ids,
    pub detector: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn run(f: DetectFlags) -> anyhow::Result<()> {
    let mut o = Overlay(config::load(f.config.as_deref())?);
    o.set("graph", &f.graph)
        .set("ids", &f.ids)
        .set("detector", &f.detector.as_ref().map(ToString::to_string))
        .set("seed", &f.seed)
        .set("out", &f.out);
    let cfg: DetectConfig = o.resolve()?;
    let Some(graph_path) = &cfg.graph else {
        bail!("no graph given (--graph)");
    };
    let Some(spec) = &cfg.detector else {
        bail!("no detector given (--detector)");
    };
    let spec: DetectorSpec = spec.parse()?;
    let file =
        File::open(graph_path).with_context(|| format!("opening {}", graph_path.display()))?;
    let loaded = load_edge_list(BufReader::new(file), cfg.ids.into())
        .with_context(|| format!("reading {}", graph_path.display()))?;
    let partition = run_detector_with(&spec, &loaded.graph, &loaded.nodes, cfg.seed)?;
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| config::out_dir(None).join("partition.txt"));
    write_with(&out, |w| Ok(partition.write(w, &loaded.nodes)?))?;
    println!("{spec}: {} communities -> {}", partition.k(), out.display());
    Ok(())
}
