//! Output directories: staged artifacts, a manifest of everything written
//! and a timestamped `run.log` kept apart from the reproducible files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub const MANIFEST: &str = "manifest.toml";
pub const CONFIG_ECHO: &str = "config.toml";
pub const RUN_LOG: &str = "run.log";
pub const PARTIAL_SUFFIX: &str = ".partial";

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    config_hash: &'a str,
    status: &'a str,
    files: &'a [String],
}

pub struct OutputDir {
    root: PathBuf,
    subcommand: String,
    config_hash: String,
    files: Vec<String>,
    log: fs::File,
}

fn stamp() -> String {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", d.as_secs(), d.subsec_millis())
}

fn io_err(path: &Path, e: std::io::Error) -> String {
    format!("i/o error on {}: {e}", path.display())
}

impl OutputDir {
    pub fn create(root: &Path, subcommand: &str) -> Result<Self, String> {
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        let log_path = root.join(RUN_LOG);
        let log = fs::File::create(&log_path).map_err(|e| io_err(&log_path, e))?;
        let mut out = Self {
            root: root.to_path_buf(),
            subcommand: subcommand.to_string(),
            config_hash: String::new(),
            files: Vec::new(),
            log,
        };
        out.log(&format!("start {subcommand}"));
        Ok(out)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn log(&mut self, line: &str) {
        let _ = writeln!(self.log, "[{}] {line}", stamp());
    }

    /// Writes the resolved configuration, prefixed by its hash.
    pub fn echo_config(&mut self, resolved_toml: &str, hash: &str) -> Result<(), String> {
        self.config_hash = hash.to_string();
        self.log(&format!("config hash {hash}"));
        let text = format!("# config hash: {hash}\n{resolved_toml}");
        self.write(CONFIG_ECHO, text.as_bytes(), false)
    }

    /// Writes `name` (relative to the root), with the partial suffix when
    /// `partial`.
    pub fn write(&mut self, name: &str, bytes: &[u8], partial: bool) -> Result<(), String> {
        let name = if partial {
            format!("{name}{PARTIAL_SUFFIX}")
        } else {
            name.to_string()
        };
        let path = self.root.join(&name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.log(&format!("wrote {name}"));
        self.files.push(name);
        Ok(())
    }

    /// Registers files produced by a library writer under `dir`.
    pub fn adopt_tree(&mut self, dir: &str) -> Result<(), String> {
        let mut found = Vec::new();
        collect(&self.root, &self.root.join(dir), &mut found)?;
        found.sort();
        for f in &found {
            self.log(&format!("wrote {f}"));
        }
        self.files.extend(found);
        Ok(())
    }

    pub fn finish(mut self, complete: bool) -> Result<(), String> {
        let status = if complete { "complete" } else { "partial" };
        let text = toml::to_string(&Manifest {
            subcommand: &self.subcommand,
            config_hash: &self.config_hash,
            status,
            files: &self.files,
        })
        .map_err(|e| format!("manifest serialization: {e}"))?;
        let path = self.root.join(MANIFEST);
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        self.log(&format!("finished ({status})"));
        Ok(())
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), String> {
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_dir() {
            collect(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("under root");
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}
