//! Run configuration embedded in every output file.
//!
//! The configuration is serialized with sorted keys and hashed, so identical
//! invocations produce identical headers; the timestamp rides along as a
//! separate field that never enters the hash.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::time::{SystemTime, UNIX_EPOCH};

/// Everything that determines a run's output, in hashable form.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub seed: u64,
    params: Map<String, Value>,
}

impl RunConfig {
    pub fn new(command: &'static str, seed: u64) -> Self {
        RunConfig { command, seed, params: Map::new() }
    }

    pub fn with_f64(mut self, key: &str, v: f64) -> Self {
        // Non-finite parameters cannot appear in JSON numbers; none of the
        // flags admit them, so encode directly.
        self.params.insert(key.into(), Value::from(v));
        self
    }

    pub fn with_u64(mut self, key: &str, v: u64) -> Self {
        self.params.insert(key.into(), Value::from(v));
        self
    }

    pub fn with_str(mut self, key: &str, v: &str) -> Self {
        self.params.insert(key.into(), Value::from(v));
        self
    }

    pub fn with_f64_list(mut self, key: &str, vs: &[f64]) -> Self {
        self.params.insert(key.into(), Value::from(vs.to_vec()));
        self
    }

    pub fn with_u64_list(mut self, key: &str, vs: &[u64]) -> Self {
        self.params.insert(key.into(), Value::from(vs.to_vec()));
        self
    }

    /// Canonical JSON body: sorted keys, no timestamp.
    pub fn canonical(&self) -> Value {
        // serde_json maps are BTree-backed, so key order is sorted and the
        // serialization is reproducible.
        let mut root = Map::new();
        root.insert("command".into(), Value::from(self.command));
        root.insert("params".into(), Value::Object(self.params.clone()));
        root.insert("seed".into(), Value::from(self.seed));
        Value::Object(root)
    }

    /// SHA-256 of the canonical serialization, lowercase hex.
    pub fn hash(&self) -> String {
        let body = self.canonical().to_string();
        let digest = Sha256::digest(body.as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            use std::fmt::Write;
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

/// Tool version baked in at compile time.
pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Seconds since the Unix epoch; the one field excluded from hashing.
pub fn timestamp_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_insertion_order_and_is_stable() {
        let a = RunConfig::new("omega-grid", 7)
            .with_f64("kappa", 2.0)
            .with_u64("resolution", 201);
        let b = RunConfig::new("omega-grid", 7)
            .with_u64("resolution", 201)
            .with_f64("kappa", 2.0);
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let c = RunConfig::new("omega-grid", 8)
            .with_f64("kappa", 2.0)
            .with_u64("resolution", 201);
        assert_ne!(a.hash(), c.hash());
    }
}
