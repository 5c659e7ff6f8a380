use crate::failure::Failure;
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const RUN_MANIFEST: &str = "run.json";
const LOCK_FILE: &str = ".lock";

/// Record of one CLI invocation, written last into its run directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub config_hash: String,
    pub tool_version: String,
    pub threads: usize,
    pub started: String,
    pub finished: String,
    /// Files written by the run, relative to the run directory.
    pub outputs: Vec<String>,
}

/// JSON text with object keys sorted at every level.
pub fn canonical_json(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let body: Vec<String> = keys
                .into_iter()
                .map(|k| format!("{}:{}", Value::String(k.clone()), canonical_json(&map[k])))
                .collect();
            format!("{{{}}}", body.join(","))
        }
        Value::Array(items) => format!("[{}]", items.iter().map(canonical_json).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(canonical_json(config).as_bytes()))
}

pub fn sha256_file(path: &Path) -> Result<String, Failure> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Exclusive handle on a run directory. The lock file is removed on drop.
pub struct RunDir {
    path: PathBuf,
    started: DateTime<Utc>,
    outputs: Vec<PathBuf>,
}

impl RunDir {
    pub fn acquire(path: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(path)?;
        let lock = path.join(LOCK_FILE);
        let mut file = match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                return Err(Failure::config(
                    "RunDirectoryLocked",
                    format!("{} is locked by another run", path.display()),
                ))
            }
            Err(e) => return Err(e.into()),
        };
        writeln!(file, "{}", std::process::id())?;
        Ok(RunDir {
            path: path.to_path_buf(),
            started: Utc::now(),
            outputs: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    /// Writes `contents` to `name` inside the run directory.
    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, Failure> {
        let path = self.file(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    /// Records a file written by other means.
    pub fn record(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    /// Writes the run manifest and returns it.
    pub fn finish(mut self, command: &str, config: Value) -> Result<RunManifest, Failure> {
        let mut outputs = Vec::with_capacity(self.outputs.len() + 1);
        for p in std::mem::take(&mut self.outputs) {
            let rel = p.strip_prefix(&self.path).unwrap_or(&p).to_string_lossy().into_owned();
            if !outputs.contains(&rel) {
                outputs.push(rel);
            }
        }
        outputs.push(RUN_MANIFEST.into());
        let manifest = RunManifest {
            command: command.into(),
            config_hash: config_hash(&config),
            config,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            threads: rayon::current_num_threads(),
            started: timestamp(self.started),
            finished: timestamp(Utc::now()),
            outputs,
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::config("Format", e.to_string()))?;
        fs::write(self.file(RUN_MANIFEST), json + "\n")?;
        Ok(manifest)
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(self.path.join(LOCK_FILE));
    }
}
