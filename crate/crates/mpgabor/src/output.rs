//! Output files. Every file carries the resolved-config hash; numbers are
//! written in their shortest round-trip form so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use mpgabor_core::Matrix;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct OutputDir {
    root: PathBuf,
    hash: String,
    config: Value,
    written: Vec<PathBuf>,
}

/// Shortest round-trip decimal; `inf`, `-inf` and `NaN` spelled out.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// `{"d": d, "rows": [...]}` for a `2d × 2d` matrix.
pub fn matrix_json(m: &Matrix) -> Value {
    json!({ "d": m.rows() / 2, "rows": m.to_rows() })
}

impl OutputDir {
    pub fn create(root: &Path, cfg: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(CliError::io)?;
        let config = serde_json::to_value(cfg).expect("config serializes");
        let out = OutputDir { root: root.to_path_buf(), hash: cfg.hash(), config, written: Vec::new() };
        fs::write(root.join("config.resolved.json"), cfg.to_json()).map_err(CliError::io)?;
        Ok(out)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `body` with `config_hash` and `config` added at the top level.
    pub fn json(&mut self, name: &str, body: Value) -> Result<(), CliError> {
        let mut map = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert(String::from("report"), other);
                m
            }
        };
        map.insert(String::from("config_hash"), Value::String(self.hash.clone()));
        map.insert(String::from("config"), self.config.clone());
        let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// A CSV table preceded by a `# config_hash=…` comment line.
    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut buf = format!("# config_hash={}\n", self.hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let fail = |e: csv::Error| CliError::computation(format!("csv: {e}"));
            w.write_record(header).map_err(fail)?;
            for r in rows {
                w.write_record(r).map_err(fail)?;
            }
            w.flush().map_err(CliError::io)?;
        }
        self.write(name, &buf)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(CliError::io)?;
        self.written.push(path);
        Ok(())
    }
}

/// Machine-readable record of a failed run, written next to the outputs.
pub fn write_failure(root: &Path, hash: Option<&str>, err: &CliError) {
    let body = json!({
        "code": err.code,
        "kind": err.kind,
        "message": err.message,
        "config_hash": hash,
    });
    if fs::create_dir_all(root).is_ok() {
        let _ = fs::write(root.join("failure.json"), serde_json::to_string_pretty(&body).unwrap_or_default() + "\n");
    }
}

/// Column names `prefix1 … prefixK`.
pub fn columns(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}
