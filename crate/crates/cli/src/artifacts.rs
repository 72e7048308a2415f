//! Deterministic artifact files: CSV with 17-significant-digit scientific
//! notation and '\n' line endings, JSON via serde. Every file carries the
//! config hash, the effective seed, and the tool version, so reruns with an
//! identical configuration are byte-identical.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactMeta {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl ArtifactMeta {
    pub fn new(config_text: &str, seed: u64) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            config_hash: config_hash(config_text),
            seed,
        }
    }
}

pub fn config_hash(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// 17 significant digits, scientific notation, '.' decimal separator.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(
    path: &Path,
    meta: &ArtifactMeta,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# lee {}\n", meta.tool_version));
    out.push_str(&format!("# config_hash = {}\n", meta.config_hash));
    out.push_str(&format!("# seed = {}\n", meta.seed));
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_float(*v));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable artifact");
    text.push('\n');
    fs::write(path, text)
}
