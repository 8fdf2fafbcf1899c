//! Undirected simple graphs over dense node indices, and edge-list I/O.

use std::borrow::Cow;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Immutable undirected simple graph. Nodes are `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// `(u, v)` with `u < v`, sorted.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbour lists.
    adj: Vec<Vec<usize>>,
}

/// What [`Graph::from_edges`] threw away.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

impl Graph {
    /// Builds a simple graph, dropping self-loops and repeated edges (in
    /// either orientation). Fails only on an endpoint `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Graph, EdgeStats)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut stats = EdgeStats::default();
        let mut list = Vec::new();
        for (u, v) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::NodeOutOfRange { index, n });
                }
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        stats.duplicates = before - list.len();

        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok((
            Graph {
                n,
                edges: list,
                adj,
            },
            stats,
        ))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges, `|E|`.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        self.adj.get(i).map(Vec::len).ok_or(Error::NodeOutOfRange {
            index: i,
            n: self.n,
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Writes one `u v` line per edge, using `nodes` for the external ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W, nodes: &NodeMap) -> Result<()> {
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", nodes.token(u), nodes.token(v))?;
        }
        Ok(())
    }
}

/// How edge-list tokens become node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdMode {
    /// Tokens are non-negative integers used as indices directly; `n` is the
    /// largest id plus one, so gaps become isolated nodes.
    #[default]
    RawInteger,
    /// Arbitrary tokens, numbered in order of first appearance.
    Remap,
}

/// Mapping between external node tokens and dense indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeMap {
    Identity(usize),
    Tokens {
        tokens: Vec<String>,
        index: HashMap<String, usize>,
    },
}

impl NodeMap {
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        NodeMap::Tokens { tokens, index }
    }

    pub fn len(&self) -> usize {
        match self {
            NodeMap::Identity(n) => *n,
            NodeMap::Tokens { tokens, .. } => tokens.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn token(&self, i: usize) -> Cow<'_, str> {
        match self {
            NodeMap::Identity(_) => Cow::Owned(i.to_string()),
            NodeMap::Tokens { tokens, .. } => Cow::Borrowed(&tokens[i]),
        }
    }

    pub fn resolve(&self, token: &str) -> Option<usize> {
        match self {
            NodeMap::Identity(n) => token.parse::<usize>().ok().filter(|i| i < n),
            NodeMap::Tokens { index, .. } => index.get(token).copied(),
        }
    }

    /// CSV `token,index`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "token,index")?;
        for i in 0..self.len() {
            writeln!(out, "{},{}", csv_field(&self.token(i)), i)?;
        }
        Ok(())
    }
}

/// Quotes a CSV field when it contains a delimiter, quote or line break.
pub fn csv_field(s: &str) -> Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        Cow::Owned(format!("\"{}\"", s.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(s)
    }
}

/// A parsed edge list.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub nodes: NodeMap,
    pub dropped: EdgeStats,
}

/// Iterates `(line_number, tokens)` over the meaningful lines of a
/// whitespace-separated text file, skipping blanks and `#` comments.
pub(crate) fn data_lines<R: BufRead>(
    source: R,
) -> impl Iterator<Item = Result<(usize, Vec<String>)>> {
    source
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(line) => {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    let tokens = trimmed.split_whitespace().map(str::to_owned).collect();
                    Some(Ok((i + 1, tokens)))
                }
            }
        })
}

pub fn load_edge_list<R: BufRead>(source: R, mode: IdMode) -> Result<LoadedGraph> {
    let mut raw_edges = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut max_id: Option<usize> = None;

    for item in data_lines(source) {
        let (line, fields) = item?;
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected two node tokens, found {}", fields.len()),
            });
        }
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&fields) {
            *slot = match mode {
                IdMode::RawInteger => {
                    let id = tok.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("`{tok}` is not a non-negative integer node id"),
                    })?;
                    max_id = Some(max_id.map_or(id, |m| m.max(id)));
                    id
                }
                IdMode::Remap => match index.get(tok.as_str()) {
                    Some(&i) => i,
                    None => {
                        let i = tokens.len();
                        tokens.push(tok.clone());
                        index.insert(tok.clone(), i);
                        i
                    }
                },
            };
        }
        raw_edges.push((ends[0], ends[1]));
    }

    if raw_edges.is_empty() {
        return Err(Error::EmptyInput("edges"));
    }
    let nodes = match mode {
        IdMode::RawInteger => NodeMap::Identity(max_id.map_or(0, |m| m + 1)),
        IdMode::Remap => NodeMap::Tokens { tokens, index },
    };
    let (graph, dropped) = Graph::from_edges(nodes.len(), raw_edges)?;
    Ok(LoadedGraph {
        graph,
        nodes,
        dropped,
    })
}
