//! `report`: long-format plot data from run reports, plus one SVG scatter
//! per metric (IB_G on x, the metric on y).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::args::ReportFlags;
use crate::config::{self, Overlay};
use crate::evaluate::{metric_names, RunReport, Stat};
use crate::output::{cell, csv_field, write_with};
use crate::svg::{scatter, Point};

pub const CSV_HEADER: &str =
    "detector,graph_group,ib_g,ib_g_std,metric_name,metric_value,metric_std";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    pub reports: Vec<PathBuf>,
    pub metrics: Vec<String>,
    pub out: Option<PathBuf>,
}

/// One (report, detector, metric) row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub detector: String,
    pub group: String,
    pub ib_g: Option<Stat>,
    pub metric: String,
    pub value: Option<Stat>,
}

fn default_metrics() -> Vec<String> {
    metric_names()
        .into_iter()
        .filter(|m| m != "ib_g" && m != "mean_ib")
        .collect()
}

pub fn load_report(path: &std::path::Path) -> anyhow::Result<RunReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let version = raw
        .get("schema_version")
        .and_then(serde_json::Value::as_u64);
    if version != Some(u64::from(crate::SCHEMA_VERSION)) {
        bail!(
            "{}: schema version {} is not supported (expected {})",
            path.display(),
            version.map_or("missing".to_owned(), |v| v.to_string()),
            crate::SCHEMA_VERSION
        );
    }
    serde_json::from_value(raw).with_context(|| format!("{} is not a run report", path.display()))
}

pub fn collect(reports: &[(String, RunReport)], metrics: &[String]) -> Vec<Row> {
    let mut rows = Vec::new();
    for (group, report) in reports {
        for agg in &report.aggregates {
            for metric in metrics {
                rows.push(Row {
                    detector: agg.detector.clone(),
                    group: group.clone(),
                    ib_g: agg.metrics.get("ib_g").copied(),
                    metric: metric.clone(),
                    value: agg.metrics.get(metric).copied(),
                });
            }
        }
    }
    rows
}

pub fn run(f: ReportFlags) -> anyhow::Result<()> {
    let mut o = Overlay(config::load(f.common.config.as_deref())?);
    o.set("out", &f.common.out)
        .set_list("reports", &f.reports)
        .set_list("metrics", &f.metrics);
    let cfg: ReportConfig = o.resolve()?;
    if cfg.reports.is_empty() {
        bail!("no run reports given");
    }
    let known = metric_names();
    let metrics = if cfg.metrics.is_empty() {
        default_metrics()
    } else {
        cfg.metrics.clone()
    };
    if let Some(bad) = metrics.iter().find(|m| !known.contains(m)) {
        bail!("unknown metric `{bad}`; choose from {}", known.join(", "));
    }
    let mut reports = Vec::new();
    for path in &cfg.reports {
        let report = load_report(path)?;
        let group = report
            .group()
            .map_or_else(|| path.display().to_string(), str::to_owned);
        reports.push((group, report));
    }
    let rows = collect(&reports, &metrics);
    let dir = config::out_dir(cfg.out.clone());
    let csv = dir.join("report.csv");
    write_with(&csv, |w| {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                csv_field(&r.detector),
                csv_field(&r.group),
                cell(r.ib_g.and_then(|s| s.mean)),
                cell(r.ib_g.and_then(|s| s.std)),
                r.metric,
                cell(r.value.and_then(|s| s.mean)),
                cell(r.value.and_then(|s| s.std)),
            )?;
        }
        Ok(())
    })?;
    for metric in &metrics {
        let points: Vec<Point> = rows
            .iter()
            .filter(|r| &r.metric == metric)
            .filter_map(|r| {
                let (x, y) = (r.ib_g?, r.value?);
                Some(Point {
                    label: format!("{} / {}", r.detector, r.group),
                    x: x.mean?,
                    y: y.mean?,
                    x_err: x.std,
                    y_err: y.std,
                })
            })
            .collect();
        let svg = scatter(
            &format!("IB_G vs {metric}"),
            metric,
            &points,
            metric.starts_with("phi_"),
        );
        let path = dir.join(format!("report_{metric}.svg"));
        write_with(&path, |w| Ok(w.write_all(svg.as_bytes())?))?;
    }
    println!("{} rows -> {}", rows.len(), csv.display());
    Ok(())
}
