//! Individual bias (IB) and graph individual bias (IB_G).
//!
//! `IB_i = 1 − (Γ_i · Γ'_i) / (‖Γ_i‖ ‖Γ'_i‖)` where `Γ_i` and `Γ'_i` are node
//! `i`'s ground-truth and predicted co-occurrence rows. Both rows are binary,
//! so the dot product is the overlap `o` of the two communities containing
//! `i` and the squared norms are their sizes `s` and `s'`:
//!
//! ```text
//! IB_i = 1 − o / √(s · s')
//! ```
//!
//! Every node belongs to its own community in both partitions, so `o ≥ 1`
//! and `IB_i < 1`. `IB_G` is the population standard deviation of the
//! `IB_i`, hence in `[0, 0.5]`.
//!
//! [`ib_all_fast`] evaluates the closed form from a contingency table;
//! [`ib_all_naive`] builds the rows explicitly and is kept as the oracle.
//! Both compute `1 − dot / √(‖u‖² ‖v‖²)` in the same order, so on the same
//! input they agree bit for bit.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::NodeMap;
use crate::partition::{cc_row, ContingencyTable, Partition};

/// Largest `n` the naive oracle accepts unless told otherwise.
pub const DEFAULT_ORACLE_CAP: usize = 5_000;

/// `1 − u·v / (‖u‖‖v‖)`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(distance_from_products(dot, uu, vv))
}

#[inline]
fn distance_from_products(dot: f64, uu: f64, vv: f64) -> f64 {
    (1.0 - dot / (uu * vv).sqrt()).max(0.0)
}

/// IB of a node whose ground-truth community has `gt_size` members, whose
/// predicted community has `pred_size`, and whose two communities share
/// `overlap` nodes.
#[inline]
pub fn ib_from_counts(overlap: usize, gt_size: usize, pred_size: usize) -> f64 {
    distance_from_products(overlap as f64, gt_size as f64, pred_size as f64)
}

/// IB of any node labelled `gt_label` in the ground truth and `pred_label`
/// in the prediction.
///
/// Panics if the two communities do not intersect: a node always shares a
/// community with itself, so such a label pair cannot belong to a node.
pub fn ib_node_fast(ct: &ContingencyTable, gt_label: usize, pred_label: usize) -> f64 {
    let overlap = ct.overlap(gt_label, pred_label);
    assert!(
        overlap >= 1,
        "communities {gt_label} (ground truth) and {pred_label} (predicted) do not intersect"
    );
    ib_from_counts(overlap, ct.row_sums()[gt_label], ct.col_sums()[pred_label])
}

/// Per-node IB values and their graph-level summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub ib: Vec<f64>,
    /// Population standard deviation of `ib`.
    pub ib_g: f64,
    pub mean_ib: f64,
    pub k_gt: usize,
    pub k_pred: usize,
    /// Mean IB per ground-truth community, indexed by dense label.
    pub community_mean_ib: Vec<f64>,
}

/// The JSON summary written next to the per-node CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasSummary {
    pub ib_g: f64,
    pub mean_ib: f64,
    pub n: usize,
    pub k_gt: usize,
    pub k_pred: usize,
}

impl BiasReport {
    fn assemble(ib: Vec<f64>, gt: &Partition, k_pred: usize) -> BiasReport {
        let (mean_ib, ib_g) = mean_and_population_std(&ib);
        let mut sums = vec![0.0; gt.k()];
        for (&v, &c) in ib.iter().zip(gt.labels()) {
            sums[c] += v;
        }
        let community_mean_ib = sums
            .iter()
            .zip(gt.sizes())
            .map(|(&s, &size)| s / size as f64)
            .collect();
        BiasReport {
            ib,
            ib_g,
            mean_ib,
            k_gt: gt.k(),
            k_pred,
            community_mean_ib,
        }
    }

    pub fn n(&self) -> usize {
        self.ib.len()
    }

    pub fn summary(&self) -> BiasSummary {
        BiasSummary {
            ib_g: self.ib_g,
            mean_ib: self.mean_ib,
            n: self.n(),
            k_gt: self.k_gt,
            k_pred: self.k_pred,
        }
    }

    /// CSV `node_id,ib`.
    pub fn write_csv<W: Write>(&self, mut out: W, nodes: &NodeMap) -> Result<()> {
        writeln!(out, "node_id,ib")?;
        for (i, v) in self.ib.iter().enumerate() {
            writeln!(out, "{},{}", crate::graph::csv_field(&nodes.token(i)), v)?;
        }
        Ok(())
    }
}

/// Two-pass mean and population standard deviation, summed in index order.
pub fn mean_and_population_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// IB for every node via the contingency table, `O(n + cells)`.
pub fn ib_all_fast(gt: &Partition, pred: &Partition) -> Result<BiasReport> {
    ib_all_fast_with(gt, pred, Execution::default())
}

pub fn ib_all_fast_with(gt: &Partition, pred: &Partition, exec: Execution) -> Result<BiasReport> {
    let ct = ContingencyTable::new(gt, pred)?;
    Ok(ib_from_table(&ct, gt, pred, exec))
}

/// As [`ib_all_fast_with`] for callers that already hold the table.
pub fn ib_from_table(
    ct: &ContingencyTable,
    gt: &Partition,
    pred: &Partition,
    exec: Execution,
) -> BiasReport {
    let ib = exec.map(gt.n(), |i| ib_node_fast(ct, gt.label(i), pred.label(i)));
    BiasReport::assemble(ib, gt, pred.k())
}

/// IB from explicitly materialised co-occurrence rows, `O(n²)`. Refuses
/// `n > DEFAULT_ORACLE_CAP`.
pub fn ib_all_naive(gt: &Partition, pred: &Partition) -> Result<BiasReport> {
    ib_all_naive_with(gt, pred, DEFAULT_ORACLE_CAP, Execution::default())
}

pub fn ib_all_naive_with(
    gt: &Partition,
    pred: &Partition,
    cap: usize,
    exec: Execution,
) -> Result<BiasReport> {
    if gt.n() != pred.n() {
        return Err(Error::SizeMismatch {
            left: gt.n(),
            right: pred.n(),
        });
    }
    let n = gt.n();
    if n > cap {
        return Err(Error::OracleCap { n, cap });
    }
    let ib = exec
        .map(n, |i| {
            let row = cc_row(gt, i)?;
            let row_pred = cc_row(pred, i)?;
            cosine_distance(&row, &row_pred)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(BiasReport::assemble(ib, gt, pred.k()))
}
