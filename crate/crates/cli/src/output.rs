//! Run directory layout:
//!
//! ```text
//! <out>/config.resolved.toml   config after defaults and --seed
//! <out>/VERSION                tool name and version
//! <out>/events.jsonl           one JSON object per event
//! <out>/metrics/<family>.csv   one CSV per metric family
//! <out>/checkpoints/*.json     model state
//! ```
//!
//! Nothing written here depends on wall-clock time or thread scheduling.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const VERSION: &str = concat!("qmlkit ", env!("CARGO_PKG_VERSION"));

pub struct RunDir {
    root: PathBuf,
    events: BufWriter<File>,
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

impl RunDir {
    pub fn create(root: &Path, resolved_config: &str) -> Result<Self, CliError> {
        for sub in ["metrics", "checkpoints"] {
            let p = root.join(sub);
            fs::create_dir_all(&p).map_err(write_err(&p))?;
        }
        let dir = RunDir {
            root: root.to_path_buf(),
            events: {
                let p = root.join("events.jsonl");
                BufWriter::new(File::create(&p).map_err(write_err(&p))?)
            },
        };
        dir.write_text("config.resolved.toml", resolved_config)?;
        dir.write_text("VERSION", &format!("{VERSION}\n"))?;
        Ok(dir)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let p = self.root.join(name);
        fs::write(&p, text).map_err(write_err(&p))?;
        Ok(p)
    }

    /// CSV writer for `metrics/<family>.csv` with `header` already written.
    pub fn csv(&self, family: &str, header: &[&str]) -> Result<csv::Writer<File>, CliError> {
        let p = self.root.join("metrics").join(format!("{family}.csv"));
        let mut w = csv::Writer::from_writer(File::create(&p).map_err(write_err(&p))?);
        w.write_record(header)?;
        Ok(w)
    }

    pub fn event(&mut self, event: Value) -> Result<(), CliError> {
        let p = self.root.join("events.jsonl");
        writeln!(self.events, "{event}").map_err(write_err(&p))
    }

    /// Pretty JSON under `checkpoints/`.
    pub fn checkpoint<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        self.write_text(&format!("checkpoints/{name}.json"), &(text + "\n"))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        let p = self.root.join("events.jsonl");
        self.events.flush().map_err(write_err(&p))
    }
}

/// A CSV field for a float: shortest representation that round-trips.
pub fn f(v: f64) -> String {
    v.to_string()
}
