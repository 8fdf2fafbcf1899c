use rand::seq::SliceRandom;

use crate::error::Result;
use crate::graph::Graph;
use crate::partition::Partition;
use crate::seed::{self, Rng};

/// Weighted graph used between aggregation levels.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of the self-loop carried by each node (internal edges of the
    /// community it stands for).
    self_loop: Vec<f64>,
    /// Weighted degree, self-loops counted twice.
    strength: Vec<f64>,
    /// `2m`
    total: f64,
}

impl Level {
    fn from_graph(g: &Graph) -> Level {
        let adj: Vec<Vec<(usize, f64)>> = (0..g.n())
            .map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect())
            .collect();
        let strength = adj.iter().map(|row| row.len() as f64).collect();
        Level {
            adj,
            self_loop: vec![0.0; g.n()],
            strength,
            total: 2.0 * g.m() as f64,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Collapses each community into one node.
    fn aggregate(&self, community: &[usize], k: usize) -> Level {
        let mut self_loop = vec![0.0; k];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for i in 0..self.n() {
            let ci = community[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_loop[ci] += w / 2.0;
                } else {
                    rows[ci].push((cj, w));
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = rows
            .into_iter()
            .map(|mut row| {
                row.sort_unstable_by_key(|&(j, _)| j);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
                for (j, w) in row {
                    match merged.last_mut() {
                        Some(last) if last.0 == j => last.1 += w,
                        _ => merged.push((j, w)),
                    }
                }
                merged
            })
            .collect();
        let strength = (0..k)
            .map(|c| 2.0 * self_loop[c] + adj[c].iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        Level {
            adj,
            self_loop,
            strength,
            total: self.total,
        }
    }
}

/// Local moving phase. Returns dense community ids and their count, or
/// `None` when no node moved.
fn move_nodes(level: &Level, resolution: f64, rng: &mut Rng) -> Option<(Vec<usize>, usize)> {
    let n = level.n();
    let mut community: Vec<usize> = (0..n).collect();
    let mut tot = level.strength.clone();
    let mut weight_to = vec![0.0f64; n];
    let mut listed = vec![false; n];
    let mut neighbor_comms: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut any_move = false;
    let scale = resolution / level.total;

    loop {
        order.shuffle(rng);
        let mut moved = false;
        for &i in &order {
            let ci = community[i];
            let ki = level.strength[i];
            neighbor_comms.clear();
            neighbor_comms.push(ci);
            listed[ci] = true;
            for &(j, w) in &level.adj[i] {
                let cj = community[j];
                if !listed[cj] {
                    listed[cj] = true;
                    neighbor_comms.push(cj);
                }
                weight_to[cj] += w;
            }

            tot[ci] -= ki;
            let mut best = ci;
            let mut best_gain = weight_to[ci] - scale * tot[ci] * ki;
            // guards against flip-flopping on rounding noise
            let tolerance = 1e-12 * ki.max(1.0);
            for &c in &neighbor_comms[1..] {
                let gain = weight_to[c] - scale * tot[c] * ki;
                if gain > best_gain + tolerance {
                    best_gain = gain;
                    best = c;
                }
            }
            tot[best] += ki;
            if best != ci {
                community[i] = best;
                moved = true;
            }
            for &c in &neighbor_comms {
                weight_to[c] = 0.0;
                listed[c] = false;
            }
        }
        if !moved {
            break;
        }
        any_move = true;
    }

    if !any_move {
        return None;
    }
    let mut dense = vec![usize::MAX; n];
    let mut k = 0;
    for c in community.iter_mut() {
        if dense[*c] == usize::MAX {
            dense[*c] = k;
            k += 1;
        }
        *c = dense[*c];
    }
    Some((community, k))
}

/// Two-phase Louvain modularity optimisation: greedy local moves with
/// `resolution` scaling the null-model term, then aggregation, until a
/// level changes nothing. Node visiting order is seeded.
pub fn louvain(g: &Graph, seed: u64, resolution: f64) -> Result<Partition> {
    super::require_edges(g)?;
    let mut rng = seed::rng(seed);
    let mut membership: Vec<usize> = (0..g.n()).collect();
    let mut level = Level::from_graph(g);
    while let Some((community, k)) = move_nodes(&level, resolution, &mut rng) {
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        if k == level.n() {
            break;
        }
        level = level.aggregate(&community, k);
    }
    Ok(Partition::from_labels(&membership))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quality::modularity;

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
            .unwrap()
            .0;
        for seed in 0..5 {
            let p = louvain(&g, seed, 1.0).unwrap();
            assert_eq!(p.labels(), &[0, 0, 0, 1, 1, 1]);
            assert!((modularity(&g, &p).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn star_stays_whole() {
        let g = Graph::from_edges(11, (1..11).map(|l| (0, l))).unwrap().0;
        let p = louvain(&g, 3, 1.0).unwrap();
        assert_eq!(p.k(), 1);
        // no bipartition beats the single community
        let q_whole = modularity(&g, &p).unwrap();
        for mask in 1u32..(1 << 10) {
            let labels: Vec<usize> = (0..11)
                .map(|i| {
                    if i == 0 {
                        0
                    } else {
                        ((mask >> (i - 1)) & 1) as usize
                    }
                })
                .collect();
            let q = modularity(&g, &Partition::from_labels(&labels)).unwrap();
            assert!(q <= q_whole + 1e-12, "mask {mask:b}: {q}");
        }
    }

    #[test]
    fn ring_of_cliques_is_split() {
        // eight 5-cliques joined in a ring
        let mut edges = Vec::new();
        for c in 0..8 {
            let base = c * 5;
            for u in 0..5 {
                for v in u + 1..5 {
                    edges.push((base + u, base + v));
                }
            }
            edges.push((base + 4, (base + 5) % 40));
        }
        let g = Graph::from_edges(40, edges).unwrap().0;
        let p = louvain(&g, 11, 1.0).unwrap();
        assert_eq!(p.k(), 8);
        let coarse = louvain(&g, 11, 0.05).unwrap();
        assert!(coarse.k() < 8);
    }
}
