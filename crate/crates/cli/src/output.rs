use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Writes `<out>/<stem>.json` (config and result together) and `<out>/<stem>.csv`.
pub struct Output {
    dir: PathBuf,
    config: Value,
}

impl Output {
    pub fn new(dir: &Path, config: Value) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        eprintln!("config: {}", serde_json::to_string(&config)?);
        Ok(Output { dir: dir.to_path_buf(), config })
    }

    pub fn write<T: Serialize>(&self, stem: &str, result: &T, csv: &str) -> Result<()> {
        let doc = json!({ "config": self.config, "result": result });
        let json_path = self.dir.join(format!("{stem}.json"));
        fs::write(&json_path, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", json_path.display()))?;
        let csv_path = self.dir.join(format!("{stem}.csv"));
        fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
        eprintln!("wrote {} and {}", json_path.display(), csv_path.display());
        Ok(())
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// Rows of a CSV table after a versioned schema comment.
pub fn csv(schema: &str, header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("# bpprg-{schema} v1\n{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}
