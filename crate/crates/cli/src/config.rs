//! Merging a JSON config file under command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Reads `path` as a JSON object. A run report is accepted too: its
/// `provenance.config` is used.
pub fn load(path: Option<&Path>) -> anyhow::Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let value = match value.pointer("/provenance/config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => bail!("config {} is not a JSON object", path.display()),
    }
}

/// Accumulates flag values over a config object.
pub struct Overlay(pub Map<String, Value>);

impl Overlay {
    pub fn set<T: Serialize>(&mut self, key: &str, value: &Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(
                key.to_owned(),
                serde_json::to_value(v).expect("flag serializes"),
            );
        }
        self
    }

    pub fn set_list<T: Serialize>(&mut self, key: &str, values: &[T]) -> &mut Self {
        if !values.is_empty() {
            self.0.insert(
                key.to_owned(),
                serde_json::to_value(values).expect("flag serializes"),
            );
        }
        self
    }

    /// Sets `key` inside the nested object `parent`, creating it if needed.
    pub fn set_in<T: Serialize>(
        &mut self,
        parent: &str,
        key: &str,
        value: &Option<T>,
    ) -> &mut Self {
        if let Some(v) = value {
            let slot = self
                .0
                .entry(parent.to_owned())
                .or_insert_with(|| Value::Object(Map::new()));
            if let Value::Object(obj) = slot {
                obj.insert(
                    key.to_owned(),
                    serde_json::to_value(v).expect("flag serializes"),
                );
            }
        }
        self
    }

    /// Rejects unknown keys (typos would otherwise be silently ignored),
    /// then deserializes.
    pub fn resolve<T: DeserializeOwned + Serialize + Default>(self) -> anyhow::Result<T> {
        check_keys::<T>(&self.0, "")?;
        serde_json::from_value(Value::Object(self.0)).context("invalid configuration")
    }
}

fn check_keys<T: Serialize + Default>(map: &Map<String, Value>, scope: &str) -> anyhow::Result<()> {
    let known = serde_json::to_value(T::default()).expect("default serializes");
    let Value::Object(known) = known else {
        return Ok(());
    };
    for key in map.keys() {
        if !known.contains_key(key) {
            bail!("unknown config key `{scope}{key}`");
        }
    }
    Ok(())
}

/// Output directory: explicit value, else the environment variable, else
/// `ibfair-out`.
pub fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(crate::OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ibfair-out"))
}
