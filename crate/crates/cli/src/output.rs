//! Versioned CSV files with a config-echo header, JSON summaries and gnuplot scripts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use ucp_ofdm::Error;

/// Bumped whenever a column is added, removed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, Error> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `# ucp-ofdm <kind> v<version>`, one `# key: value` line per
    /// header entry, then `body` (column line included).
    pub fn csv(&mut self, name: &str, kind: &str, header: &[(&str, String)], body: &str) -> Result<(), Error> {
        let mut text = format!("# ucp-ofdm {kind} v{SCHEMA_VERSION}\n");
        for (k, v) in header {
            text.push_str(&format!("# {k}: {v}\n"));
        }
        text.push_str(body);
        self.write(name, &text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Error> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<(), Error> {
        let path = self.path(name);
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Compact JSON of a config for the CSV header.
pub fn echo<T: Serialize>(cfg: &T) -> String {
    serde_json::to_string(cfg).unwrap_or_default()
}

/// Gnuplot script plotting one column against another for each series of a
/// long-format CSV whose first column is the series name.
pub fn gnuplot(csv: &str, series: &[String], x: usize, y: usize, xlabel: &str, ylabel: &str, logy: bool) -> String {
    let mut s = String::from("set datafile separator ','\nset grid\n");
    if logy {
        s.push_str("set logscale y\n");
    }
    s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\nplot \\\n"));
    let lines: Vec<String> = series
        .iter()
        .map(|name| format!("  '{csv}' using (strcol(1) eq '{name}' ? ${x} : NaN):{y} with lines title '{name}'"))
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    s
}
