//! Community quality scores: modularity (internal) and NMI, ARI, NF1
//! (agreement with a ground truth). The three external scores read
//! everything they need from a [`ContingencyTable`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{ContingencyTable, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScores {
    pub modularity: f64,
    pub nmi: f64,
    pub ari: f64,
    pub nf1: f64,
}

pub fn quality_scores(
    g: &Graph,
    gt: &Partition,
    pred: &Partition,
    norm: NmiNorm,
) -> Result<QualityScores> {
    let ct = ContingencyTable::new(gt, pred)?;
    Ok(QualityScores {
        modularity: modularity(g, pred)?,
        nmi: nmi_from_table(&ct, norm),
        ari: ari_from_table(&ct)?,
        nf1: nf1_from_table(&ct),
    })
}

/// Newman–Girvan modularity `Σ_c [e_c/m − (d_c/2m)²]`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    modularity_with_resolution(g, p, 1.0)
}

/// Modularity with the null-model term scaled by `resolution`.
pub fn modularity_with_resolution(g: &Graph, p: &Partition, resolution: f64) -> Result<f64> {
    if g.n() != p.n() {
        return Err(Error::SizeMismatch {
            left: g.n(),
            right: p.n(),
        });
    }
    if g.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    let m = g.m() as f64;
    let mut internal = vec![0usize; p.k()];
    let mut degree = vec![0usize; p.k()];
    for &(u, v) in g.edges() {
        let (cu, cv) = (p.label(u), p.label(v));
        if cu == cv {
            internal[cu] += 1;
        }
        degree[cu] += 1;
        degree[cv] += 1;
    }
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| {
            let share = d as f64 / (2.0 * m);
            e as f64 / m - resolution * share * share
        })
        .sum())
}

/// Normaliser applied to mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NmiNorm {
    /// `(H(gt) + H(pred)) / 2`
    #[default]
    Arithmetic,
    Max,
    Min,
    Geometric,
}

impl FromStr for NmiNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arithmetic" => Ok(NmiNorm::Arithmetic),
            "max" => Ok(NmiNorm::Max),
            "min" => Ok(NmiNorm::Min),
            "geometric" => Ok(NmiNorm::Geometric),
            other => Err(Error::param(
                "nmi-norm",
                format!("`{other}` is not one of arithmetic, max, min, geometric"),
            )),
        }
    }
}

impl fmt::Display for NmiNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NmiNorm::Arithmetic => "arithmetic",
            NmiNorm::Max => "max",
            NmiNorm::Min => "min",
            NmiNorm::Geometric => "geometric",
        })
    }
}

fn entropy(sizes: &[usize], n: usize) -> f64 {
    let n = n as f64;
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

pub fn nmi(gt: &Partition, pred: &Partition, norm: NmiNorm) -> Result<f64> {
    Ok(nmi_from_table(&ContingencyTable::new(gt, pred)?, norm))
}

/// Two single-community partitions score 1; one single-community side
/// against a non-trivial one scores 0.
pub fn nmi_from_table(ct: &ContingencyTable, norm: NmiNorm) -> f64 {
    let n = ct.n();
    let h_gt = entropy(ct.row_sums(), n);
    let h_pred = entropy(ct.col_sums(), n);
    if h_gt == 0.0 && h_pred == 0.0 {
        return 1.0;
    }
    if h_gt == 0.0 || h_pred == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    // Σ p_ab ln(p_ab / (p_a p_b)), equal to H(gt) + H(pred) − H(gt, pred).
    let mi: f64 = ct
        .cells()
        .map(|(a, b, o)| {
            let o = o as f64;
            let ratio = o * nf / (ct.row_sums()[a] as f64 * ct.col_sums()[b] as f64);
            o / nf * ratio.ln()
        })
        .sum::<f64>()
        .max(0.0);
    let denom = match norm {
        NmiNorm::Arithmetic => 0.5 * (h_gt + h_pred),
        NmiNorm::Max => h_gt.max(h_pred),
        NmiNorm::Min => h_gt.min(h_pred),
        NmiNorm::Geometric => (h_gt * h_pred).sqrt(),
    };
    (mi / denom).clamp(0.0, 1.0)
}

fn pairs(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

pub fn ari(gt: &Partition, pred: &Partition) -> Result<f64> {
    ari_from_table(&ContingencyTable::new(gt, pred)?)
}

/// Hubert–Arabie adjusted Rand index from pair counts.
pub fn ari_from_table(ct: &ContingencyTable) -> Result<f64> {
    let n = ct.n();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, n });
    }
    let index: f64 = ct.cells().map(|(_, _, o)| pairs(o)).sum();
    let a: f64 = ct.row_sums().iter().map(|&s| pairs(s)).sum();
    let b: f64 = ct.col_sums().iter().map(|&s| pairs(s)).sum();
    let expected = a * b / pairs(n);
    let max = 0.5 * (a + b);
    if max == expected {
        // Only when both sides are all-singletons or both all-in-one.
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

pub fn nf1(gt: &Partition, pred: &Partition) -> Result<f64> {
    Ok(nf1_from_table(&ContingencyTable::new(gt, pred)?))
}

/// Normalised F1.
///
/// Each predicted community is matched to the ground-truth community it
/// overlaps most (ties to the smaller ground-truth id) and scored by F1.
/// The mean F1 is multiplied by coverage (share of ground-truth communities
/// matched at least once) and divided by redundancy (predicted communities
/// per distinct matched ground-truth community). Not clamped.
pub fn nf1_from_table(ct: &ContingencyTable) -> f64 {
    let k_pred = ct.col_sums().len();
    let k_gt = ct.row_sums().len();
    if k_pred == 0 || k_gt == 0 {
        return 0.0;
    }
    // Rows are visited in ascending order, so a strict `>` keeps the smaller id.
    let mut best = vec![(usize::MAX, 0usize); k_pred];
    for (a, b, o) in ct.cells() {
        if o > best[b].1 {
            best[b] = (a, o);
        }
    }
    let mut matched = vec![false; k_gt];
    let mut f1_sum = 0.0;
    for (b, &(a, o)) in best.iter().enumerate() {
        matched[a] = true;
        f1_sum += f1(o, ct.col_sums()[b], ct.row_sums()[a]);
    }
    let distinct = matched.iter().filter(|&&m| m).count() as f64;
    let coverage = distinct / k_gt as f64;
    let redundancy = k_pred as f64 / distinct;
    f1_sum / k_pred as f64 * coverage / redundancy
}

/// Harmonic mean of precision `overlap / predicted` and recall `overlap / truth`.
pub(crate) fn f1(overlap: usize, predicted: usize, truth: usize) -> f64 {
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / predicted as f64;
    let recall = overlap as f64 / truth as f64;
    2.0 * precision * recall / (precision + recall)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
            .unwrap()
            .0
    }

    #[test]
    fn modularity_two_triangles() {
        let g = two_triangles();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &p).unwrap() - 0.5).abs() < EPS);
        assert!(modularity(&g, &Partition::whole(6)).unwrap().abs() < EPS);
    }

    #[test]
    fn modularity_edgeless_is_error() {
        let (g, _) = Graph::from_edges(3, []).unwrap();
        assert!(matches!(
            modularity(&g, &Partition::whole(3)),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn nmi_examples() {
        let gt = Partition::from_labels(&[0, 0, 1, 1, 2, 2]);
        assert!((nmi(&gt, &gt, NmiNorm::Arithmetic).unwrap() - 1.0).abs() < EPS);

        let halves: Vec<usize> = (0..100).map(|i| usize::from(i >= 50)).collect();
        let parity: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let v = nmi(
            &Partition::from_labels(&halves),
            &Partition::from_labels(&parity),
            NmiNorm::Arithmetic,
        )
        .unwrap();
        assert!(v.abs() < EPS, "{v}");

        let split = Partition::from_labels(&[0, 0, 1, 1]);
        assert_eq!(
            nmi(&split, &Partition::whole(4), NmiNorm::Arithmetic).unwrap(),
            0.0
        );
        assert_eq!(
            nmi(
                &Partition::whole(4),
                &Partition::whole(4),
                NmiNorm::Arithmetic
            )
            .unwrap(),
            1.0
        );
    }

    #[test]
    fn nmi_norm_variants_order() {
        let gt = Partition::from_labels(&[0, 0, 0, 1, 1, 1, 2, 2]);
        let pred = Partition::from_labels(&[0, 0, 1, 1, 1, 1, 1, 0]);
        let get = |norm| nmi(&gt, &pred, norm).unwrap();
        // max ≥ arithmetic ≥ geometric ≥ min for the denominators
        assert!(get(NmiNorm::Max) <= get(NmiNorm::Arithmetic) + EPS);
        assert!(get(NmiNorm::Arithmetic) <= get(NmiNorm::Geometric) + EPS);
        assert!(get(NmiNorm::Geometric) <= get(NmiNorm::Min) + EPS);
        assert_eq!("geometric".parse::<NmiNorm>().unwrap(), NmiNorm::Geometric);
        assert!("median".parse::<NmiNorm>().is_err());
    }

    #[test]
    fn ari_examples() {
        let gt = Partition::from_labels(&[0, 0, 1, 1]);
        assert!((ari(&gt, &gt).unwrap() - 1.0).abs() < EPS);
        let pred = Partition::from_labels(&[0, 1, 0, 1]);
        assert!((ari(&gt, &pred).unwrap() + 0.5).abs() < EPS);
        assert!(ari(&Partition::whole(1), &Partition::whole(1)).is_err());
    }

    #[test]
    fn nf1_examples() {
        let gt = Partition::from_labels(&[0, 0, 1, 1, 2, 2]);
        assert!((nf1(&gt, &gt).unwrap() - 1.0).abs() < EPS);

        let thirds = Partition::from_labels(&[0, 0, 0, 1, 1, 1, 2, 2, 2]);
        let v = nf1(&thirds, &Partition::whole(9)).unwrap();
        assert!((v - 1.0 / 6.0).abs() < EPS, "{v}");
    }

    #[test]
    fn nf1_is_directional() {
        let gt = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let pred = Partition::from_labels(&[0, 0, 1, 2, 2, 2]);
        let forward = nf1(&gt, &pred).unwrap();
        let backward = nf1(&pred, &gt).unwrap();
        assert!((forward - backward).abs() > 1e-3);
    }
}
