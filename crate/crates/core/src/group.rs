//! Slope-based group fairness Φ.
//!
//! Each ground-truth community gets three structural properties (size,
//! conductance, density) and three recovery scores against its
//! best-overlapping predicted community (FCCN, F1, FCCE). For every
//! (property, score) pair the property is min-max normalised across the
//! ground-truth communities and an ordinary least-squares line is fitted
//! through the points; Φ is its slope. Φ = 0 means recovery quality does
//! not depend on the property; Φ > 0 favours communities with larger
//! values of it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{ContingencyTable, Partition};
use crate::quality::f1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Size,
    Conductance,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Score {
    Fccn,
    F1,
    Fcce,
}

impl Property {
    pub const ALL: [Property; 3] = [Property::Size, Property::Conductance, Property::Density];

    pub fn name(self) -> &'static str {
        match self {
            Property::Size => "size",
            Property::Conductance => "conductance",
            Property::Density => "density",
        }
    }
}

impl Score {
    pub const ALL: [Score; 3] = [Score::Fccn, Score::F1, Score::Fcce];

    pub fn name(self) -> &'static str {
        match self {
            Score::Fccn => "fccn",
            Score::F1 => "f1",
            Score::Fcce => "fcce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityStats {
    pub size: usize,
    /// `2e / (s(s−1))`; 1 for singletons.
    pub density: f64,
    /// `cut / min(vol, vol(V∖c))`; 0 when that minimum is 0.
    pub conductance: f64,
}

impl CommunityStats {
    pub fn get(&self, property: Property) -> f64 {
        match property {
            Property::Size => self.size as f64,
            Property::Conductance => self.conductance,
            Property::Density => self.density,
        }
    }
}

pub fn community_stats(g: &Graph, p: &Partition) -> Result<Vec<CommunityStats>> {
    check_cover(g, p)?;
    let k = p.k();
    let mut internal = vec![0usize; k];
    let mut cut = vec![0usize; k];
    let mut volume = vec![0usize; k];
    for &(u, v) in g.edges() {
        let (cu, cv) = (p.label(u), p.label(v));
        volume[cu] += 1;
        volume[cv] += 1;
        if cu == cv {
            internal[cu] += 1;
        } else {
            cut[cu] += 1;
            cut[cv] += 1;
        }
    }
    let total = 2 * g.m();
    Ok((0..k)
        .map(|c| {
            let s = p.size(c);
            let density = if s < 2 {
                1.0
            } else {
                2.0 * internal[c] as f64 / (s as f64 * (s as f64 - 1.0))
            };
            let denom = volume[c].min(total - volume[c]);
            let conductance = if denom == 0 {
                0.0
            } else {
                cut[c] as f64 / denom as f64
            };
            CommunityStats {
                size: s,
                density,
                conductance,
            }
        })
        .collect())
}

/// Recovery of one ground-truth community by its best-overlapping
/// predicted community.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityScore {
    /// Dense id of the matched predicted community.
    pub matched: usize,
    pub fccn: f64,
    pub f1: f64,
    /// Share of internal edges with both ends in the matched community; a
    /// community without internal edges takes its FCCN.
    pub fcce: f64,
}

impl CommunityScore {
    pub fn get(&self, score: Score) -> f64 {
        match score {
            Score::Fccn => self.fccn,
            Score::F1 => self.f1,
            Score::Fcce => self.fcce,
        }
    }
}

pub fn community_scores(
    g: &Graph,
    gt: &Partition,
    pred: &Partition,
) -> Result<Vec<CommunityScore>> {
    check_cover(g, gt)?;
    let ct = ContingencyTable::new(gt, pred)?;
    let matched: Vec<(usize, usize)> = (0..gt.k()).map(|a| ct.best_match_of_row(a)).collect();

    let mut internal = vec![0usize; gt.k()];
    let mut kept = vec![0usize; gt.k()];
    for &(u, v) in g.edges() {
        let a = gt.label(u);
        if gt.label(v) != a {
            continue;
        }
        internal[a] += 1;
        let b = matched[a].0;
        if pred.label(u) == b && pred.label(v) == b {
            kept[a] += 1;
        }
    }

    Ok(matched
        .iter()
        .enumerate()
        .map(|(a, &(b, o))| {
            let size = gt.size(a);
            let fccn = o as f64 / size as f64;
            let fcce = if internal[a] == 0 {
                fccn
            } else {
                kept[a] as f64 / internal[a] as f64
            };
            CommunityScore {
                matched: b,
                fccn,
                f1: f1(o, pred.size(b), size),
                fcce,
            }
        })
        .collect())
}

fn check_cover(g: &Graph, p: &Partition) -> Result<()> {
    if g.n() != p.n() {
        return Err(Error::SizeMismatch {
            left: g.n(),
            right: p.n(),
        });
    }
    Ok(())
}

/// Rescales to `[0, 1]`; `None` if all values are equal.
pub fn min_max_normalize(values: &[f64]) -> Option<Vec<f64>> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // also catches empty input and NaN
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    Some(values.iter().map(|v| (v - min) / (max - min)).collect())
}

/// Least-squares slope of `y` on `x`; `None` when `x` has no spread.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "ols_slope needs paired samples");
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One row of Φ values: one slope per recovery score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhiRow {
    pub fccn: Option<f64>,
    pub f1: Option<f64>,
    pub fcce: Option<f64>,
}

impl PhiRow {
    pub fn get(&self, score: Score) -> Option<f64> {
        match score {
            Score::Fccn => self.fccn,
            Score::F1 => self.f1,
            Score::Fcce => self.fcce,
        }
    }

    fn set(&mut self, score: Score, v: Option<f64>) {
        match score {
            Score::Fccn => self.fccn = v,
            Score::F1 => self.f1 = v,
            Score::Fcce => self.fcce = v,
        }
    }
}

/// Φ for every (property, score) pair. `None` marks an undefined slope
/// (all communities share one property value) and serialises as `null`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhiMatrix {
    pub size: PhiRow,
    pub conductance: PhiRow,
    pub density: PhiRow,
}

impl PhiMatrix {
    pub fn row(&self, property: Property) -> &PhiRow {
        match property {
            Property::Size => &self.size,
            Property::Conductance => &self.conductance,
            Property::Density => &self.density,
        }
    }

    fn row_mut(&mut self, property: Property) -> &mut PhiRow {
        match property {
            Property::Size => &mut self.size,
            Property::Conductance => &mut self.conductance,
            Property::Density => &mut self.density,
        }
    }

    pub fn get(&self, property: Property, score: Score) -> Option<f64> {
        self.row(property).get(score)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupFairnessResult {
    pub phi: PhiMatrix,
    pub stats: Vec<CommunityStats>,
    pub scores: Vec<CommunityScore>,
    /// Min-max normalised property values, in [`Property::ALL`] order.
    pub normalized: [Option<Vec<f64>>; 3],
}

impl GroupFairnessResult {
    /// CSV `community,property,property_norm,fccn,f1,fcce`: one row per
    /// (ground-truth community, property); `property` holds the property
    /// name and an undefined normalisation leaves `property_norm` empty.
    pub fn write_points_csv<W: Write>(&self, mut out: W, names: Option<&[String]>) -> Result<()> {
        writeln!(out, "community,property,property_norm,fccn,f1,fcce")?;
        for (c, score) in self.scores.iter().enumerate() {
            let community = names.map_or_else(|| c.to_string(), |n| n[c].clone());
            for (pi, property) in Property::ALL.iter().enumerate() {
                let norm = self.normalized[pi]
                    .as_ref()
                    .map_or(String::new(), |v| v[c].to_string());
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    crate::graph::csv_field(&community),
                    property.name(),
                    norm,
                    score.fccn,
                    score.f1,
                    score.fcce
                )?;
            }
        }
        Ok(())
    }
}

pub fn phi(g: &Graph, gt: &Partition, pred: &Partition) -> Result<GroupFairnessResult> {
    if gt.k() < 2 {
        return Err(Error::TooFewCommunities(gt.k()));
    }
    let stats = community_stats(g, gt)?;
    let scores = community_scores(g, gt, pred)?;
    let mut matrix = PhiMatrix::default();
    let normalized = Property::ALL.map(|property| {
        let raw: Vec<f64> = stats.iter().map(|s| s.get(property)).collect();
        min_max_normalize(&raw)
    });
    for (pi, &property) in Property::ALL.iter().enumerate() {
        for score in Score::ALL {
            let slope = normalized[pi].as_ref().and_then(|x| {
                let y: Vec<f64> = scores.iter().map(|s| s.get(score)).collect();
                ols_slope(x, &y)
            });
            matrix.row_mut(property).set(score, slope);
        }
    }
    Ok(GroupFairnessResult {
        phi: matrix,
        stats,
        scores,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    #[test]
    fn stats_disconnected_triangle() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let s = community_stats(&g, &p).unwrap();
        assert_eq!(s[0].size, 3);
        assert_eq!(s[0].density, 1.0);
        assert_eq!(s[0].conductance, 0.0);
    }

    #[test]
    fn stats_split_path() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let p = Partition::from_labels(&[0, 0, 1, 1]);
        for s in community_stats(&g, &p).unwrap() {
            assert_eq!(s.size, 2);
            assert_eq!(s.density, 1.0);
            assert!((s.conductance - 1.0 / 3.0).abs() < EPS);
        }
    }

    #[test]
    fn stats_singleton_and_whole_graph() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let p = Partition::from_labels(&[0, 1, 1]);
        let s = community_stats(&g, &p).unwrap();
        assert_eq!(s[0].density, 1.0);
        assert_eq!(s[0].conductance, 1.0);
        let whole = community_stats(&g, &Partition::whole(3)).unwrap();
        assert_eq!(whole[0].conductance, 0.0);
    }

    #[test]
    fn scores_split_community() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let gt = Partition::whole(4);
        let pred = Partition::from_labels(&[0, 0, 1, 1]);
        let s = community_scores(&g, &gt, &pred).unwrap();
        assert_eq!(s[0].matched, 0);
        assert!((s[0].fccn - 0.5).abs() < EPS);
        assert!((s[0].f1 - 2.0 / 3.0).abs() < EPS);
        // only edge 0–1 lies inside predicted community 0
        assert!((s[0].fcce - 0.25).abs() < EPS);
    }

    #[test]
    fn fcce_triangle_two_of_three() {
        let g = graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let gt = Partition::from_labels(&[0, 0, 0, 1]);
        let pred = Partition::from_labels(&[0, 0, 1, 1]);
        let s = community_scores(&g, &gt, &pred).unwrap();
        assert!((s[0].fcce - 1.0 / 3.0).abs() < EPS);
    }

    #[test]
    fn ols_three_points() {
        let slope = ols_slope(&[0.0, 0.5, 1.0], &[0.2, 0.5, 0.8]).unwrap();
        assert!((slope - 0.6).abs() < EPS);
        assert_eq!(ols_slope(&[1.0, 1.0], &[0.0, 1.0]), None);
    }

    #[test]
    fn normalization_of_constant_is_missing() {
        assert_eq!(min_max_normalize(&[3.0, 3.0]), None);
        assert_eq!(
            min_max_normalize(&[1.0, 3.0, 2.0]).unwrap(),
            vec![0.0, 1.0, 0.5]
        );
    }

    #[test]
    fn perfect_prediction_has_zero_phi() {
        let g = graph(
            7,
            &[
                (0, 1),
                (1, 2),
                (0, 2),
                (3, 4),
                (4, 5),
                (5, 6),
                (3, 6),
                (2, 3),
            ],
        );
        let gt = Partition::from_labels(&[0, 0, 0, 1, 1, 1, 1]);
        let r = phi(&g, &gt, &gt).unwrap();
        for property in Property::ALL {
            for score in Score::ALL {
                if let Some(v) = r.phi.get(property, score) {
                    assert_eq!(v, 0.0, "{property:?}/{score:?}");
                }
            }
        }
        assert!(r.phi.size.fccn.is_some());
        assert!(r
            .scores
            .iter()
            .all(|s| s.fccn == 1.0 && s.f1 == 1.0 && s.fcce == 1.0));
    }

    #[test]
    fn phi_needs_two_communities() {
        let g = graph(3, &[(0, 1)]);
        assert!(matches!(
            phi(&g, &Partition::whole(3), &Partition::whole(3)),
            Err(Error::TooFewCommunities(1))
        ));
    }

    #[test]
    fn equal_sizes_make_size_phi_missing() {
        let g = graph(4, &[(0, 1), (2, 3), (1, 2)]);
        let gt = Partition::from_labels(&[0, 0, 1, 1]);
        let r = phi(&g, &gt, &Partition::whole(4)).unwrap();
        assert_eq!(r.phi.size, PhiRow::default());
        let json = serde_json::to_string(&r.phi).unwrap();
        assert!(json.starts_with("{\"size\":{\"fccn\":null"));
    }
}
