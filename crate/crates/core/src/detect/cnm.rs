use std::collections::BTreeMap;

use crate::error::Result;
use crate::graph::Graph;
use crate::partition::Partition;

/// Merge gain scaled by `2m²`: `ΔQ · 2m² = 2m·e_ij − d_i·d_j`, with `e_ij`
/// the edge count between the two communities and `d` their degree sums.
/// Integer arithmetic makes ties exact.
fn gain(two_m: i128, between: u64, d_i: u64, d_j: u64) -> i128 {
    two_m * between as i128 - d_i as i128 * d_j as i128
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Candidate {
    gain: i128,
    pair: (usize, usize),
}

impl Candidate {
    /// Larger gain wins, then the lexicographically smaller pair.
    fn beats(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => self.gain > o.gain || (self.gain == o.gain && self.pair < o.pair),
        }
    }
}

/// Clauset–Newman–Moore greedy agglomeration: from singletons, merge the
/// adjacent community pair with the largest modularity gain until no merge
/// gains. Ties go to the lexicographically smallest pair; the survivor keeps
/// the smaller id.
pub fn greedy_agglomerative(g: &Graph) -> Result<Partition> {
    super::require_edges(g)?;
    let n = g.n();
    let two_m = 2 * g.m() as i128;
    let mut links: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); n];
    for &(u, v) in g.edges() {
        links[u].insert(v, 1);
        links[v].insert(u, 1);
    }
    let mut degree: Vec<u64> = g.degrees().into_iter().map(|d| d as u64).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut alive = vec![true; n];

    let best_of = |c: usize, links: &[BTreeMap<usize, u64>], degree: &[u64]| {
        let mut best: Option<Candidate> = None;
        for (&p, &w) in &links[c] {
            let cand = Candidate {
                gain: gain(two_m, w, degree[c], degree[p]),
                pair: (c.min(p), c.max(p)),
            };
            if cand.beats(&best) {
                best = Some(cand);
            }
        }
        best
    };
    let mut best: Vec<Option<Candidate>> = (0..n).map(|c| best_of(c, &links, &degree)).collect();

    loop {
        let mut top: Option<Candidate> = None;
        for c in (0..n).filter(|&c| alive[c]) {
            if let Some(cand) = best[c] {
                if cand.beats(&top) {
                    top = Some(cand);
                }
            }
        }
        let Some(Candidate { gain, pair: (i, j) }) = top else {
            break;
        };
        if gain <= 0 {
            break;
        }

        let absorbed = std::mem::take(&mut links[j]);
        for (&l, &w) in &absorbed {
            links[l].remove(&j);
            if l != i {
                *links[i].entry(l).or_insert(0) += w;
                *links[l].entry(i).or_insert(0) += w;
            }
        }
        links[i].remove(&j);
        degree[i] += degree[j];
        alive[j] = false;
        best[j] = None;
        parent[j] = i;

        best[i] = best_of(i, &links, &degree);
        let touched: Vec<usize> = links[i].keys().copied().collect();
        for l in touched {
            best[l] = best_of(l, &links, &degree);
        }
    }

    let labels: Vec<usize> = (0..n)
        .map(|mut c| {
            while parent[c] != c {
                c = parent[c];
            }
            c
        })
        .collect();
    Ok(Partition::from_labels(&labels))
}
