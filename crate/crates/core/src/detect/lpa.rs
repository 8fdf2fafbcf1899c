use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::Result;
use crate::graph::Graph;
use crate::partition::Partition;
use crate::seed;

/// Asynchronous label propagation.
///
/// Each sweep visits the nodes in a fresh seeded order; a node takes the
/// label most frequent among its neighbours. It keeps its current label
/// when that label is among the most frequent, otherwise picks one of the
/// tied labels at random. Stops after a sweep without changes or after
/// `max_sweeps`.
pub fn label_propagation(g: &Graph, seed: u64, max_sweeps: usize) -> Result<Partition> {
    super::require_edges(g)?;
    let n = g.n();
    let mut rng = seed::rng(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts = vec![0usize; n];
    let mut seen: Vec<usize> = Vec::new();
    let mut tied: Vec<usize> = Vec::new();

    for _ in 0..max_sweeps {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &i in &order {
            let neighbors = g.neighbors(i);
            if neighbors.is_empty() {
                continue;
            }
            for &j in neighbors {
                let l = labels[j];
                if counts[l] == 0 {
                    seen.push(l);
                }
                counts[l] += 1;
            }
            let top = seen.iter().map(|&l| counts[l]).max().unwrap_or(0);
            tied.clear();
            tied.extend(seen.iter().copied().filter(|&l| counts[l] == top));
            if !tied.contains(&labels[i]) {
                tied.sort_unstable();
                labels[i] = tied[rng.random_range(0..tied.len())];
                changed = true;
            }
            for l in seen.drain(..) {
                counts[l] = 0;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Partition::from_labels(&labels))
}
