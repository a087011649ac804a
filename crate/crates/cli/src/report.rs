//! JSON reports `{command, inputs, results, assertions}` and atomic file output.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// One checked property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub holds: bool,
    pub details: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, holds: bool, details: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            holds,
            details: details.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn all_hold(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold plain JSON values")
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
