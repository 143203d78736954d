//! Report directory with atomic writes and a manifest of what was written.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct OutDir {
    dir: PathBuf,
    meta: Value,
    written: Vec<(String, String)>,
}

impl OutDir {
    pub fn create(dir: &Path, command: &str, config_sha256: &str, seed: u64) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let meta = json!({
            "command": command,
            "config_sha256": config_sha256,
            "seed": seed,
            "version": env!("CARGO_PKG_VERSION"),
        });
        Ok(OutDir { dir: dir.to_path_buf(), meta, written: Vec::new() })
    }

    pub fn meta(&self) -> &Value {
        &self.meta
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.dir.join(name)).map_err(|e| e.error)?;
        self.written.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    /// JSON report with the run metadata under `"meta"`.
    pub fn write_json(&mut self, name: &str, body: Value) -> std::io::Result<()> {
        let mut doc = json!({ "meta": self.meta.clone() });
        if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
            d.extend(b);
        }
        let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
        self.write(name, &text)
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        let files: Vec<Value> = self.written.iter().map(|(n, h)| json!({ "name": n, "sha256": h })).collect();
        self.write_json("manifest.json", json!({ "files": files }))
    }
}
