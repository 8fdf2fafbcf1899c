//! Brute-force reference implementations. Each works from first
//! definitions (node pairs, explicit matrices) and shares no code with the
//! library paths it checks.
#![allow(dead_code)]

use ibfair_core::{Graph, Partition};

/// Co-occurrence dot product `Σ_j Γ_ij Γ'_ij` by scanning all nodes.
pub fn cc_dot(gt: &Partition, pred: &Partition, i: usize) -> usize {
    (0..gt.n())
        .filter(|&j| gt.label(j) == gt.label(i) && pred.label(j) == pred.label(i))
        .count()
}

/// IB straight from the definition on explicit 0/1 rows.
pub fn ib_pairwise(gt: &Partition, pred: &Partition, i: usize) -> f64 {
    let n = gt.n();
    let row = |p: &Partition| -> Vec<f64> {
        (0..n)
            .map(|j| if p.label(j) == p.label(i) { 1.0 } else { 0.0 })
            .collect()
    };
    let (u, v) = (row(gt), row(pred));
    let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    1.0 - dot / (nu * nv)
}

/// `Q = 1/(2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)` over all ordered pairs.
pub fn modularity_pairwise(g: &Graph, p: &Partition) -> f64 {
    let n = g.n();
    let two_m = 2.0 * g.m() as f64;
    let deg: Vec<f64> = (0..n).map(|i| g.neighbors(i).len() as f64).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if p.label(i) != p.label(j) {
                continue;
            }
            let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
            q += a - deg[i] * deg[j] / two_m;
        }
    }
    q / two_m
}

/// ARI from the four pair-agreement counts over all unordered node pairs.
pub fn ari_pairs(gt: &Partition, pred: &Partition) -> f64 {
    let n = gt.n();
    let (mut both, mut only_gt, mut only_pred, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (gt.label(i) == gt.label(j), pred.label(i) == pred.label(j)) {
                (true, true) => both += 1.0,
                (true, false) => only_gt += 1.0,
                (false, true) => only_pred += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let num = 2.0 * (neither * both - only_gt * only_pred);
    let den = (neither + only_pred) * (only_pred + both) + (neither + only_gt) * (only_gt + both);
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// NF1 by matching each predicted community against every ground-truth
/// community via explicit member sets.
pub fn nf1_brute(gt: &Partition, pred: &Partition) -> f64 {
    let n = gt.n();
    let members =
        |p: &Partition, c: usize| -> Vec<usize> { (0..n).filter(|&i| p.label(i) == c).collect() };
    let mut matched = vec![false; gt.k()];
    let mut f1_sum = 0.0;
    for b in 0..pred.k() {
        let pm = members(pred, b);
        let mut best = (0usize, 0usize);
        for a in 0..gt.k() {
            let o = pm.iter().filter(|&&i| gt.label(i) == a).count();
            if o > best.1 {
                best = (a, o);
            }
        }
        let (a, o) = best;
        matched[a] = true;
        let precision = o as f64 / pm.len() as f64;
        let recall = o as f64 / members(gt, a).len() as f64;
        f1_sum += 2.0 * precision * recall / (precision + recall);
    }
    let distinct = matched.iter().filter(|&&m| m).count() as f64;
    f1_sum / pred.k() as f64 * (distinct / gt.k() as f64) / (pred.k() as f64 / distinct)
}
