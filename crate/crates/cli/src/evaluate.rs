//! `evaluate`: every (graph, detector) cell gets IB/IB_G, quality scores
//! and Φ; cells are then aggregated per detector as mean ± population std.
//!
//! Seeds: generated graph `r` uses `derive(seed, [GRAPH, r])`; cell
//! `(g, d)` runs its detector with `derive(seed, [DETECTOR, g, d])` unless
//! the spec names its own `seed`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ibfair_core::bias::{
    ib_all_fast_with, ib_all_naive_with, mean_and_population_std, BiasSummary, DEFAULT_ORACLE_CAP,
};
use ibfair_core::detect::{run_detector_with, DetectorSpec};
use ibfair_core::graph::load_edge_list;
use ibfair_core::group::{phi, GroupFairnessResult, PhiMatrix, Property, Score};
use ibfair_core::partition::{contingency, load_partition_with};
use ibfair_core::quality::{ari_from_table, modularity, nf1_from_table, nmi_from_table, NmiNorm};
use ibfair_core::synth::{generate_abcd_lite, AbcdParams, SynthStats};
use ibfair_core::{seed, Execution, Graph, NodeMap, Partition};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{EvaluateFlags, GeneratorKind, Ids, Metric};
use crate::config::{self, Overlay};
use crate::generate::TwoCommunityParams;
use crate::output::{cell, csv_field, write_json, write_with, Provenance};

/// Detector name that passes the ground truth through unchanged.
pub const PASSTHROUGH: &str = "ground_truth";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluateConfig {
    pub graphs: Vec<PathBuf>,
    pub ground_truth: Vec<PathBuf>,
    pub ids: Ids,
    pub generate: Option<GeneratorKind>,
    pub replicates: usize,
    /// Generator parameters; `seed` is replaced per replicate.
    pub abcd: AbcdParams,
    pub two_community: TwoCommunityParams,
    pub detectors: Vec<String>,
    pub metrics: Vec<Metric>,
    pub nmi_norm: NmiNorm,
    pub oracle: bool,
    pub oracle_cap: usize,
    pub group: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        EvaluateConfig {
            graphs: Vec::new(),
            ground_truth: Vec::new(),
            ids: Ids::Integer,
            generate: None,
            replicates: 1,
            abcd: AbcdParams::default(),
            two_community: TwoCommunityParams::default(),
            detectors: Vec::new(),
            metrics: Metric::ALL.to_vec(),
            nmi_norm: NmiNorm::default(),
            oracle: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
            group: None,
            seed: 0,
            out: None,
        }
    }
}

impl EvaluateConfig {
    fn wants(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    fn check(&self) -> anyhow::Result<Vec<DetectorSpec>> {
        match (self.graphs.is_empty(), self.generate) {
            (true, None) => bail!("no graph source: give --graph files or --generate"),
            (false, Some(_)) => bail!("give either --graph files or --generate, not both"),
            (false, None) if self.ground_truth.len() != self.graphs.len() => bail!(
                "{} graphs but {} ground-truth files; pair each --graph with one --ground-truth",
                self.graphs.len(),
                self.ground_truth.len()
            ),
            (true, Some(_)) if !self.ground_truth.is_empty() => {
                bail!("generated graphs use their planted partition; drop --ground-truth")
            }
            _ => {}
        }
        if self.generate.is_some() && self.replicates == 0 {
            bail!("replicates must be at least 1");
        }
        if self.detectors.is_empty() {
            bail!("no detectors: add --detector, e.g. --detector louvain");
        }
        self.detectors
            .iter()
            .map(|s| s.parse::<DetectorSpec>().map_err(anyhow::Error::from))
            .collect()
    }
}

/// Where a graph came from, with enough detail to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub communities: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth_stats: Option<SynthStats>,
    /// Self-loops and duplicate edges removed while loading.
    #[serde(default)]
    pub dropped_edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quality {
    pub modularity: Option<f64>,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
    pub nf1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// One (graph, detector) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub graph: String,
    pub detector: String,
    pub seed: u64,
    pub status: Status,
    /// Why the detector itself failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub communities: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<BiasSummary>,
    /// Largest |fast − oracle| over all nodes, when the oracle ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_max_abs_diff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<Quality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiMatrix>,
    /// Requested metrics that could not be computed, with the reason.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failed_metrics: BTreeMap<String, String>,
}

/// Mean and population std over the cells where a metric is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub detector: String,
    pub graphs: usize,
    pub ok: usize,
    pub metrics: BTreeMap<String, Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub graphs: Vec<GraphInfo>,
    pub cells: Vec<CellReport>,
    pub aggregates: Vec<Aggregate>,
}

impl RunReport {
    pub fn group(&self) -> Option<&str> {
        self.provenance.config.get("group").and_then(Value::as_str)
    }
}

/// Flat metric names in column order.
pub fn metric_names() -> Vec<String> {
    let mut names: Vec<String> = ["ib_g", "mean_ib", "modularity", "nmi", "ari", "nf1"]
        .map(String::from)
        .to_vec();
    for p in Property::ALL {
        for s in Score::ALL {
            names.push(phi_name(p, s));
        }
    }
    names
}

pub fn phi_name(p: Property, s: Score) -> String {
    format!("phi_{}_{}", p.name(), s.name())
}

impl CellReport {
    /// Value of a flat metric, `None` when absent or undefined.
    pub fn metric(&self, name: &str) -> Option<f64> {
        let q = self.quality.as_ref();
        match name {
            "ib_g" => self.bias.map(|b| b.ib_g),
            "mean_ib" => self.bias.map(|b| b.mean_ib),
            "modularity" => q.and_then(|q| q.modularity),
            "nmi" => q.and_then(|q| q.nmi),
            "ari" => q.and_then(|q| q.ari),
            "nf1" => q.and_then(|q| q.nf1),
            _ => {
                let phi = self.phi.as_ref()?;
                Property::ALL
                    .iter()
                    .flat_map(|&p| Score::ALL.map(move |s| (p, s)))
                    .find(|&(p, s)| phi_name(p, s) == name)
                    .and_then(|(p, s)| phi.get(p, s))
            }
        }
    }
}

/// A finished evaluation: the report plus what is needed to write the
/// per-cell files.
pub struct Evaluation {
    pub report: RunReport,
    pub artifacts: Vec<Option<Artifacts>>,
    /// Node tokens per graph.
    pub nodes: Vec<NodeMap>,
}

struct Instance {
    info: GraphInfo,
    graph: Graph,
    nodes: NodeMap,
    truth: Partition,
}

/// Per-node outputs written next to the report.
pub struct Artifacts {
    partition: Partition,
    ib: Option<ibfair_core::BiasReport>,
    group: Option<GroupFairnessResult>,
}

pub fn run(f: EvaluateFlags) -> anyhow::Result<()> {
    let mut o = Overlay(config::load(f.common.config.as_deref())?);
    let detectors: Vec<String> = f.detectors.iter().map(ToString::to_string).collect();
    o.set("out", &f.common.out)
        .set_list("graphs", &f.graphs)
        .set_list("ground_truth", &f.ground_truth)
        .set("ids", &f.ids)
        .set("generate", &f.generate)
        .set("replicates", &f.replicates)
        .set_list("detectors", &detectors)
        .set_list("metrics", &f.metrics)
        .set("nmi_norm", &f.nmi_norm)
        .set("oracle", &f.oracle)
        .set("oracle_cap", &f.oracle_cap)
        .set("group", &f.group)
        .set("seed", &f.seed);
    for parent in ["abcd", "two_community"] {
        o.set_in(parent, "n", &f.n);
    }
    o.set_in("abcd", "xi", &f.xi)
        .set_in("abcd", "c_min", &f.c_min)
        .set_in("abcd", "c_max", &f.c_max)
        .set_in("two_community", "minority", &f.minority);
    let cfg: EvaluateConfig = o.resolve()?;
    let dir = config::out_dir(cfg.out.clone());
    let eval = evaluate(&cfg, Execution::default())?;
    write_outputs(&dir, &eval)?;
    let report = &eval.report;
    for c in report.cells.iter().filter(|c| c.status == Status::Failed) {
        eprintln!(
            "warning: {} on {} failed: {}",
            c.detector,
            c.graph,
            c.error.as_deref().unwrap_or("")
        );
    }
    for a in &report.aggregates {
        let ib_g = a.metrics.get("ib_g").and_then(|s| s.mean);
        let nmi = a.metrics.get("nmi").and_then(|s| s.mean);
        println!(
            "{}: {}/{} ok, IB_G {}, NMI {}",
            a.detector,
            a.ok,
            a.graphs,
            fmt_opt(ib_g),
            fmt_opt(nmi)
        );
    }
    println!("report -> {}", dir.join("report.json").display());
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.4}"))
}

/// Runs the whole evaluation in memory. Cells may run concurrently; their
/// order in the report is always graph-major, then detector order.
pub fn evaluate(cfg: &EvaluateConfig, exec: Execution) -> anyhow::Result<Evaluation> {
    let specs = cfg.check()?;
    let instances = load_instances(cfg, exec)?;
    let d = specs.len();
    let results = exec.map(instances.len() * d, |idx| {
        let (gi, di) = (idx / d, idx % d);
        let cell_seed = seed::derive(cfg.seed, &[seed::tag::DETECTOR, gi as u64, di as u64]);
        run_cell(cfg, &instances[gi], &specs[di], cell_seed)
    });
    let (cells, artifacts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let aggregates = specs
        .iter()
        .enumerate()
        .map(|(di, spec)| aggregate(spec.to_string(), cells.iter().skip(di).step_by(d)))
        .collect();
    let (graphs, nodes) = instances.into_iter().map(|i| (i.info, i.nodes)).unzip();
    let report = RunReport {
        schema_version: crate::SCHEMA_VERSION,
        provenance: Provenance::new("evaluate", cfg),
        graphs,
        cells,
        aggregates,
    };
    Ok(Evaluation {
        report,
        artifacts,
        nodes,
    })
}

fn load_instances(cfg: &EvaluateConfig, exec: Execution) -> anyhow::Result<Vec<Instance>> {
    match cfg.generate {
        None => cfg
            .graphs
            .iter()
            .zip(&cfg.ground_truth)
            .map(|(g, t)| load_instance(g, t, cfg.ids))
            .collect(),
        Some(kind) => exec
            .map(cfg.replicates, |r| {
                let graph_seed = seed::derive(cfg.seed, &[seed::tag::GRAPH, r as u64]);
                generate_instance(cfg, kind, r, graph_seed)
            })
            .into_iter()
            .collect(),
    }
}

fn load_instance(graph_path: &Path, truth_path: &Path, ids: Ids) -> anyhow::Result<Instance> {
    let open = |p: &Path| -> anyhow::Result<BufReader<File>> {
        Ok(BufReader::new(
            File::open(p).with_context(|| format!("opening {}", p.display()))?,
        ))
    };
    let loaded = load_edge_list(open(graph_path)?, ids.into())
        .with_context(|| format!("reading {}", graph_path.display()))?;
    let truth = load_partition_with(open(truth_path)?, &loaded.nodes)
        .with_context(|| format!("reading {}", truth_path.display()))?;
    let dropped = loaded.dropped.duplicates + loaded.dropped.self_loops;
    Ok(Instance {
        info: GraphInfo {
            label: graph_path.display().to_string(),
            n: loaded.graph.n(),
            m: loaded.graph.m(),
            communities: truth.k(),
            path: Some(graph_path.to_owned()),
            ground_truth: Some(truth_path.to_owned()),
            seed: None,
            synth_stats: None,
            dropped_edges: dropped,
        },
        graph: loaded.graph,
        nodes: loaded.nodes,
        truth,
    })
}

fn generate_instance(
    cfg: &EvaluateConfig,
    kind: GeneratorKind,
    r: usize,
    graph_seed: u64,
) -> anyhow::Result<Instance> {
    let (graph, truth, stats, label) = match kind {
        GeneratorKind::Abcd => {
            let params = AbcdParams {
                seed: graph_seed,
                ..cfg.abcd
            };
            let s = generate_abcd_lite(&params).with_context(|| format!("generating graph {r}"))?;
            (s.graph, s.planted, Some(s.stats), format!("abcd-{r}"))
        }
        GeneratorKind::TwoCommunity => {
            let params = TwoCommunityParams {
                seed: graph_seed,
                ..cfg.two_community.clone()
            };
            let (g, p) = params
                .generate()
                .with_context(|| format!("generating graph {r}"))?;
            (g, p, None, format!("two-community-{r}"))
        }
    };
    Ok(Instance {
        info: GraphInfo {
            label,
            n: graph.n(),
            m: graph.m(),
            communities: truth.k(),
            path: None,
            ground_truth: None,
            seed: Some(graph_seed),
            synth_stats: stats,
            dropped_edges: 0,
        },
        nodes: NodeMap::Identity(graph.n()),
        graph,
        truth,
    })
}

fn run_cell(
    cfg: &EvaluateConfig,
    inst: &Instance,
    spec: &DetectorSpec,
    cell_seed: u64,
) -> (CellReport, Option<Artifacts>) {
    let mut report = CellReport {
        graph: inst.info.label.clone(),
        detector: spec.to_string(),
        seed: cell_seed,
        status: Status::Ok,
        error: None,
        communities: None,
        bias: None,
        oracle_max_abs_diff: None,
        quality: None,
        phi: None,
        failed_metrics: BTreeMap::new(),
    };
    let predicted = if spec.name == PASSTHROUGH && spec.params.is_empty() {
        Ok(inst.truth.clone())
    } else {
        run_detector_with(spec, &inst.graph, &inst.nodes, cell_seed)
    };
    let pred = match predicted.and_then(|p| contingency(&inst.truth, &p).map(|ct| (p, ct))) {
        Ok(p) => p,
        Err(e) => {
            report.status = Status::Failed;
            report.error = Some(e.to_string());
            return (report, None);
        }
    };
    let (pred, table) = pred;
    report.communities = Some(pred.k());
    let (g, gt) = (&inst.graph, &inst.truth);
    let fail = |r: &mut CellReport, name: &str, e: &dyn std::fmt::Display| {
        r.failed_metrics.insert(name.to_owned(), e.to_string());
    };
    // Cells already run concurrently; keep per-cell work sequential.
    let inner = Execution::Sequential;
    let mut artifacts = Artifacts {
        partition: pred.clone(),
        ib: None,
        group: None,
    };
    if cfg.wants(Metric::Ib) {
        match ib_all_fast_with(gt, &pred, inner) {
            Ok(b) => {
                report.bias = Some(b.summary());
                if cfg.oracle {
                    match ib_all_naive_with(gt, &pred, cfg.oracle_cap, inner) {
                        Ok(naive) => {
                            let diff =
                                b.ib.iter()
                                    .zip(&naive.ib)
                                    .map(|(x, y)| (x - y).abs())
                                    .fold(0.0, f64::max);
                            report.oracle_max_abs_diff = Some(diff);
                        }
                        Err(e) => fail(&mut report, "oracle", &e),
                    }
                }
                artifacts.ib = Some(b);
            }
            Err(e) => fail(&mut report, "ib", &e),
        }
    }
    if cfg.wants(Metric::Quality) {
        let modularity = modularity(g, &pred)
            .map_err(|e| fail(&mut report, "modularity", &e))
            .ok();
        let ari = ari_from_table(&table)
            .map_err(|e| fail(&mut report, "ari", &e))
            .ok();
        report.quality = Some(Quality {
            modularity,
            nmi: Some(nmi_from_table(&table, cfg.nmi_norm)),
            ari,
            nf1: Some(nf1_from_table(&table)),
        });
    }
    if cfg.wants(Metric::Phi) {
        match phi(g, gt, &pred) {
            Ok(result) => {
                for p in Property::ALL {
                    for s in Score::ALL {
                        if result.phi.get(p, s).is_none() {
                            fail(
                                &mut report,
                                &phi_name(p, s),
                                &"property is constant across ground-truth communities",
                            );
                        }
                    }
                }
                report.phi = Some(result.phi);
                artifacts.group = Some(result);
            }
            Err(e) => fail(&mut report, "phi", &e),
        }
    }
    (report, Some(artifacts))
}

fn aggregate<'a>(detector: String, cells: impl Iterator<Item = &'a CellReport>) -> Aggregate {
    let cells: Vec<&CellReport> = cells.collect();
    let ok = cells.iter().filter(|c| c.status == Status::Ok).count();
    let metrics = metric_names()
        .into_iter()
        .map(|name| {
            let values: Vec<f64> = cells.iter().filter_map(|c| c.metric(&name)).collect();
            let stat = if values.is_empty() {
                Stat {
                    mean: None,
                    std: None,
                    count: 0,
                }
            } else {
                let (mean, std) = mean_and_population_std(&values);
                Stat {
                    mean: Some(mean),
                    std: Some(std),
                    count: values.len(),
                }
            };
            (name, stat)
        })
        .collect();
    Aggregate {
        detector,
        graphs: cells.len(),
        ok,
        metrics,
    }
}

/// CSV header of `evaluate.csv`.
pub fn csv_header() -> String {
    let mut cols = vec![
        "kind".to_owned(),
        "graph".into(),
        "detector".into(),
        "status".into(),
        "communities".into(),
    ];
    cols.extend(metric_names());
    cols.push("error".into());
    cols.join(",")
}

pub fn write_outputs(dir: &Path, eval: &Evaluation) -> anyhow::Result<()> {
    let report = &eval.report;
    write_json(&dir.join("report.json"), report)?;
    let names = metric_names();
    write_with(&dir.join("evaluate.csv"), |w| {
        writeln!(w, "{}", csv_header())?;
        for c in &report.cells {
            let status = match c.status {
                Status::Ok => "ok",
                Status::Failed => "failed",
            };
            write!(
                w,
                "cell,{},{},{status},{}",
                csv_field(&c.graph),
                csv_field(&c.detector),
                c.communities.map_or(String::new(), |k| k.to_string())
            )?;
            for name in &names {
                write!(w, ",{}", cell(c.metric(name)))?;
            }
            writeln!(w, ",{}", csv_field(c.error.as_deref().unwrap_or("")))?;
        }
        for a in &report.aggregates {
            for (kind, pick) in [("mean", 0), ("std", 1)] {
                write!(w, "{kind},,{},,", csv_field(&a.detector))?;
                for name in &names {
                    let s = a.metrics.get(name);
                    let v = s.and_then(|s| if pick == 0 { s.mean } else { s.std });
                    write!(w, ",{}", cell(v))?;
                }
                writeln!(w, ",")?;
            }
        }
        Ok(())
    })?;
    for (gi, nodes) in eval.nodes.iter().enumerate() {
        if matches!(nodes, NodeMap::Tokens { .. }) {
            write_with(
                &dir.join("graphs").join(format!("g{gi:03}_nodes.csv")),
                |w| Ok(nodes.write_csv(w)?),
            )?;
        }
    }
    let d = report.aggregates.len().max(1);
    for (idx, art) in eval.artifacts.iter().enumerate() {
        let Some(art) = art else { continue };
        let (gi, di) = (idx / d, idx % d);
        let cell_dir = dir.join("cells").join(format!("g{gi:03}_d{di:02}"));
        let nodes = &eval.nodes[gi];
        write_with(&cell_dir.join("partition.txt"), |w| {
            Ok(art.partition.write(w, nodes)?)
        })?;
        if let Some(ib) = &art.ib {
            write_with(&cell_dir.join("ib.csv"), |w| Ok(ib.write_csv(w, nodes)?))?;
        }
        if let Some(group) = &art.group {
            write_with(&cell_dir.join("phi_points.csv"), |w| {
                Ok(group.write_points_csv(w, None)?)
            })?;
        }
    }
    Ok(())
}
