use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

/// Writes artifacts into one directory, stamping each with the run metadata.
pub struct Artifacts {
    dir: PathBuf,
    meta: Value,
    header: String,
}

impl Artifacts {
    pub fn new(
        dir: &Path,
        command: &str,
        config_hash: &str,
        depth: u32,
        d: u64,
        n: u64,
    ) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let meta = json!({
            "command": command,
            "config_sha256": config_hash,
            "K": depth,
            "D": d,
            "n": n,
        });
        let header =
            format!("# command={command} config_sha256={config_hash} K={depth} D={d} n={n}\n");
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            meta,
            header,
        })
    }

    pub fn json(&self, name: &str, result: &impl Serialize) -> anyhow::Result<()> {
        let doc = json!({"meta": self.meta, "result": result});
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// CSV with a leading `#` metadata line.
    pub fn csv<R: Serialize>(
        &self,
        name: &str,
        rows: impl IntoIterator<Item = R>,
    ) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        let mut file =
            fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        file.write_all(self.header.as_bytes())?;
        let mut w = csv::Writer::from_writer(file);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
