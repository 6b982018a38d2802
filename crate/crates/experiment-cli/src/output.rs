use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliResult;

/// Directory receiving a workflow's artifacts.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Write through a temporary file and rename, so readers never see a
    /// partial artifact.
    pub fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents)?;
        fs::rename(&tmp, &target)?;
        log::info!("wrote {}", target.display());
        Ok(target)
    }
}

/// Ordered `key=value` summary of one workflow run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
    /// `false` when an iterative step ran out of budget.
    pub converged: bool,
}

impl Report {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            converged: true,
        }
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    /// Float with a fixed number of significant digits.
    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.put(key, fmt_num(value))
    }

    pub fn opt(&mut self, key: impl Into<String>, value: Option<f64>) -> &mut Self {
        match value {
            Some(v) => self.num(key, v),
            None => self.put(key, "none"),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Same entries as `#` comment lines, for CSV preambles.
    pub fn to_comments(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("# {k}={v}\n"))
            .collect()
    }
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.9e}")
}
