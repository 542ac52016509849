use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::{CliError, CliResult};

/// Bumped whenever a CSV column or JSON field changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Writes files into the output directory, stamping each with the schema
/// version and the config it came from.
pub(crate) struct Writer {
    dir: PathBuf,
    config_text: String,
    config_json: Value,
    pub files: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, config_text: &str) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| {
            CliError::Usage(format!(
                "cannot create output directory {}: {e}",
                dir.display()
            ))
        })?;
        let table: toml::Table =
            toml::from_str(config_text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        let config_json =
            serde_json::to_value(&table).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_text: config_text.to_string(),
            config_json,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn header(&self) -> String {
        let mut out = format!("# schema_version: {SCHEMA_VERSION}\n");
        for line in self.config_text.lines() {
            out.push_str("# config: ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// `<stem>.csv` plus a `<stem>.json` sidecar documenting the columns.
    pub fn table(
        &mut self,
        stem: &str,
        body: &str,
        columns: &[(&str, &str)],
        summary: Value,
    ) -> CliResult<()> {
        let csv = format!("{}{body}", self.header());
        self.write(&format!("{stem}.csv"), &csv)?;
        let cols: Vec<Value> = columns
            .iter()
            .map(|(name, doc)| json!({ "name": name, "description": doc }))
            .collect();
        let sidecar = json!({
            "schema_version": SCHEMA_VERSION,
            "config": self.config_json,
            "table": format!("{stem}.csv"),
            "columns": cols,
            "summary": summary,
        });
        self.json(&format!("{stem}.json"), sidecar)
    }

    /// A stand-alone JSON summary.
    pub fn summary(&mut self, stem: &str, summary: Value) -> CliResult<()> {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": self.config_json,
            "summary": summary,
        });
        self.json(&format!("{stem}.json"), doc)
    }

    fn json(&mut self, name: &str, value: Value) -> CliResult<()> {
        let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        self.write(name, &(text + "\n"))
    }

    pub fn manifest(&mut self, kind: &str, timings: &[(String, f64)]) -> CliResult<PathBuf> {
        let files: Vec<String> = self
            .files
            .iter()
            .map(|p| {
                p.file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned()
            })
            .collect();
        let timing: serde_json::Map<String, Value> =
            timings.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": kind,
            "config": self.config_json,
            "files": files,
            "timings_seconds": timing,
        });
        self.json("run.json", doc)?;
        Ok(self.files.last().cloned().expect("just written"))
    }
}
