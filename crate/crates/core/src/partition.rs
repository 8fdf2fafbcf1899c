//! Community assignments and the contingency table between two of them.
//!
//! A partition's co-occurrence matrix has `Γ[i][j] = 1` iff `i` and `j`
//! share a community. It is never stored: `Γ_i · Γ'_i` equals the
//! contingency cell of `(c_i, c'_i)` and `‖Γ_i‖²` is the size of `c_i`, which
//! is all any score here needs. [`cc_row`] materialises a row for the test
//! oracle only.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{data_lines, NodeMap};

/// One community label per node; labels are dense (`0..k`) and every
/// community is non-empty.
#[derive(Debug, Clone)]
pub struct Partition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    /// External community ids, indexed by dense label, when loaded from a file.
    names: Option<Vec<String>>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for Partition {}

impl Partition {
    /// Relabels arbitrary ids densely, in order of first appearance over
    /// nodes `0..n`.
    pub fn from_labels(raw: &[usize]) -> Partition {
        let mut dense: HashMap<usize, usize> = HashMap::new();
        let mut sizes = Vec::new();
        let labels = raw
            .iter()
            .map(|&r| {
                let next = dense.len();
                let c = *dense.entry(r).or_insert(next);
                if c == sizes.len() {
                    sizes.push(0);
                }
                sizes[c] += 1;
                c
            })
            .collect();
        Partition {
            labels,
            sizes,
            names: None,
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            labels: (0..n).collect(),
            sizes: vec![1; n],
            names: None,
        }
    }

    /// Every node in one community.
    pub fn whole(n: usize) -> Partition {
        Partition {
            labels: vec![0; n],
            sizes: if n == 0 { vec![] } else { vec![n] },
            names: None,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of communities.
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, c: usize) -> usize {
        self.sizes[c]
    }

    /// External community ids by dense label, if this partition came from a file.
    pub fn community_names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Node lists per community, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Writes `node community` lines, using `nodes` for node tokens and the
    /// original community ids when known.
    pub fn write<W: Write>(&self, mut out: W, nodes: &NodeMap) -> Result<()> {
        for (i, &c) in self.labels.iter().enumerate() {
            match &self.names {
                Some(names) => writeln!(out, "{} {}", nodes.token(i), names[c])?,
                None => writeln!(out, "{} {}", nodes.token(i), c)?,
            }
        }
        Ok(())
    }
}

/// Reads `node_id community_id` lines where node ids are integers in `0..n`.
pub fn load_partition<R: BufRead>(source: R, n: usize) -> Result<Partition> {
    load_partition_with(source, &NodeMap::Identity(n))
}

/// Reads `node_id community_id` lines, resolving node tokens through `nodes`.
pub fn load_partition_with<R: BufRead>(source: R, nodes: &NodeMap) -> Result<Partition> {
    let n = nodes.len();
    let mut raw: Vec<Option<String>> = vec![None; n];
    for item in data_lines(source) {
        let (line, fields) = item?;
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!(
                    "expected `node_id community_id`, found {} fields",
                    fields.len()
                ),
            });
        }
        let node = nodes
            .resolve(&fields[0])
            .ok_or_else(|| Error::UnknownNode {
                node: fields[0].clone(),
                line,
            })?;
        if raw[node].is_some() {
            return Err(Error::DuplicateNode {
                node: fields[0].clone(),
                line,
            });
        }
        raw[node] = Some(fields[1].clone());
    }

    let mut dense: HashMap<String, usize> = HashMap::new();
    let mut names = Vec::new();
    let mut sizes = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for (i, slot) in raw.into_iter().enumerate() {
        let name = slot.ok_or(Error::UnassignedNode(i))?;
        let c = match dense.get(&name) {
            Some(&c) => c,
            None => {
                let c = names.len();
                dense.insert(name.clone(), c);
                names.push(name);
                sizes.push(0);
                c
            }
        };
        sizes[c] += 1;
        labels.push(c);
    }
    Ok(Partition {
        labels,
        sizes,
        names: Some(names),
    })
}

/// Materialises row `i` of the co-occurrence matrix: `v[j] = 1` iff
/// `c_j = c_i`. `O(n)` per row; for verification only.
pub fn cc_row(p: &Partition, i: usize) -> Result<Vec<f64>> {
    if i >= p.n() {
        return Err(Error::NodeOutOfRange { index: i, n: p.n() });
    }
    let ci = p.label(i);
    Ok(p.labels
        .iter()
        .map(|&c| if c == ci { 1.0 } else { 0.0 })
        .collect())
}

/// Overlap counts `|c_a ∩ c'_b|` between a ground-truth and a predicted
/// partition, stored sparsely by ground-truth row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `rows[a]` holds `(b, count)` pairs with `count > 0`, sorted by `b`.
    rows: Vec<Vec<(usize, usize)>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    /// Single pass over the nodes plus a per-row scratch sweep:
    /// `O(n + k_gt + k_pred + cells log cells)`.
    pub fn new(gt: &Partition, pred: &Partition) -> Result<ContingencyTable> {
        if gt.n() != pred.n() {
            return Err(Error::SizeMismatch {
                left: gt.n(),
                right: pred.n(),
            });
        }
        let n = gt.n();
        let k_gt = gt.k();
        let k_pred = pred.k();

        // Counting sort of nodes by ground-truth label.
        let mut start = vec![0usize; k_gt + 1];
        for &a in gt.labels() {
            start[a + 1] += 1;
        }
        for a in 0..k_gt {
            start[a + 1] += start[a];
        }
        let mut fill = start.clone();
        let mut order = vec![0usize; n];
        for (i, &a) in gt.labels().iter().enumerate() {
            order[fill[a]] = i;
            fill[a] += 1;
        }

        let mut scratch = vec![0usize; k_pred];
        let mut touched = Vec::new();
        let mut rows = Vec::with_capacity(k_gt);
        for a in 0..k_gt {
            for &i in &order[start[a]..start[a + 1]] {
                let b = pred.label(i);
                if scratch[b] == 0 {
                    touched.push(b);
                }
                scratch[b] += 1;
            }
            touched.sort_unstable();
            let row = touched
                .drain(..)
                .map(|b| (b, std::mem::take(&mut scratch[b])))
                .collect();
            rows.push(row);
        }

        Ok(ContingencyTable {
            rows,
            row_sums: gt.sizes().to_vec(),
            col_sums: pred.sizes().to_vec(),
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn overlap(&self, a: usize, b: usize) -> usize {
        let row = &self.rows[a];
        row.binary_search_by_key(&b, |&(col, _)| col)
            .map_or(0, |pos| row[pos].1)
    }

    /// Non-zero cells of ground-truth community `a`, sorted by predicted id.
    pub fn row(&self, a: usize) -> &[(usize, usize)] {
        &self.rows[a]
    }

    /// Non-zero cells as `(a, b, count)`, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&(b, c)| (a, b, c)))
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Ground-truth community sizes.
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// Predicted community sizes.
    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    /// Ground-truth community `a`'s best-overlapping predicted community;
    /// ties go to the smaller predicted id.
    pub fn best_match_of_row(&self, a: usize) -> (usize, usize) {
        let mut best = (usize::MAX, 0);
        for &(b, c) in &self.rows[a] {
            if c > best.1 {
                best = (b, c);
            }
        }
        best
    }
}

/// Shorthand for [`ContingencyTable::new`].
pub fn contingency(gt: &Partition, pred: &Partition) -> Result<ContingencyTable> {
    ContingencyTable::new(gt, pred)
}
