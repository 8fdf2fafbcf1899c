//! Reference community detectors and a uniform dispatch over them.
//!
//! `label_propagation` and `louvain` are seeded; `cnm` is fully
//! deterministic. Anything else enters as an `external` partition file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeMap};
use crate::partition::{load_partition_with, Partition};

mod cnm;
mod louvain;
mod lpa;

pub use cnm::greedy_agglomerative;
pub use louvain::louvain;
pub use lpa::label_propagation;

pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// A detector name plus its parameters, written `name:key=value,key=value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl DetectorSpec {
    pub fn new(name: impl Into<String>) -> Self {
        DetectorSpec {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    fn allow_only(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::param(
                "detector",
                format!("`{}` does not take parameter `{k}`", self.name),
            )),
            None => Ok(()),
        }
    }

    fn parsed<T: FromStr>(&self, key: &'static str) -> Result<Option<T>> {
        self.params
            .get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|_| Error::param(key, format!("cannot parse `{raw}`")))
            })
            .transpose()
    }
}

impl FromStr for DetectorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        if name.is_empty() {
            return Err(Error::param("detector", "empty detector name"));
        }
        let mut spec = DetectorSpec::new(name);
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::param("detector", format!("`{pair}` is not key=value")))?;
            spec.params.insert(k.to_owned(), v.to_owned());
        }
        Ok(spec)
    }
}

impl fmt::Display for DetectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// Runs `spec` on a graph with integer node ids and seed 0 unless the spec
/// carries its own.
pub fn run_detector(spec: &DetectorSpec, g: &Graph) -> Result<Partition> {
    run_detector_with(spec, g, &NodeMap::Identity(g.n()), 0)
}

/// Runs `spec`. `nodes` resolves node tokens in external partition files;
/// `default_seed` applies when the spec has no `seed` parameter.
pub fn run_detector_with(
    spec: &DetectorSpec,
    g: &Graph,
    nodes: &NodeMap,
    default_seed: u64,
) -> Result<Partition> {
    let seed = || -> Result<u64> { Ok(spec.parsed("seed")?.unwrap_or(default_seed)) };
    match spec.name.as_str() {
        "label_propagation" | "lpa" => {
            spec.allow_only(&["seed", "max_sweeps"])?;
            let sweeps = spec.parsed("max_sweeps")?.unwrap_or(DEFAULT_MAX_SWEEPS);
            label_propagation(g, seed()?, sweeps)
        }
        "louvain" => {
            spec.allow_only(&["seed", "resolution"])?;
            let resolution = spec.parsed("resolution")?.unwrap_or(1.0);
            louvain(g, seed()?, resolution)
        }
        "cnm" | "greedy_agglomerative" => {
            spec.allow_only(&[])?;
            greedy_agglomerative(g)
        }
        "external" => {
            spec.allow_only(&["path"])?;
            let path = spec
                .params
                .get("path")
                .ok_or_else(|| Error::param("path", "external detector needs path=<file>"))?;
            let wrap = |e: Error| Error::File {
                path: path.clone(),
                source: Box::new(e),
            };
            let file = File::open(path).map_err(|e| wrap(e.into()))?;
            load_partition_with(BufReader::new(file), nodes).map_err(wrap)
        }
        other => Err(Error::UnknownDetector(other.to_owned())),
    }
}

pub(crate) fn require_edges(g: &Graph) -> Result<()> {
    if g.m() == 0 {
        Err(Error::EmptyGraph)
    } else {
        Ok(())
    }
}
