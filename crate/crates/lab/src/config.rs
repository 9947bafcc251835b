//! Optional `key = value` defaults file and thread-count resolution.

use std::path::Path;

use crate::error::{LabError, LabResult};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "RAMSEY_THREADS";

/// Reads `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; a leading `--` on the key is accepted.
pub fn load_config_file(path: &Path) -> LabResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

pub fn parse_config(text: &str, origin: &str) -> LabResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| LabError::Config {
            path: origin.to_string(),
            line: i + 1,
            msg: "expected key = value".into(),
        })?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(LabError::Config {
                path: origin.to_string(),
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Worker count: explicit value, else the machine's available parallelism.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    requested
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
