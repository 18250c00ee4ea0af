pub mod fed;
pub mod models;
pub mod qas;
pub mod rl;
pub mod simulate;

use std::path::Path;

use qmlkit::data::{separable_2d, xor, Dataset};
use qmlkit::rng::SimRng;
use serde::Serialize;

use crate::config::DataSpec;
use crate::error::CliError;
use crate::output::VERSION;

/// Checkpoint envelope: what produced the state, then the state itself.
#[derive(Serialize)]
pub struct Checkpoint<'a, T: Serialize> {
    pub tool: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub state: &'a T,
}

impl<'a, T: Serialize> Checkpoint<'a, T> {
    pub fn new(command: &'static str, seed: u64, state: &'a T) -> Self {
        Checkpoint { tool: VERSION, command, seed, state }
    }
}

pub fn load_data(spec: &DataSpec, rng: &mut SimRng) -> Result<Dataset, CliError> {
    match spec {
        DataSpec::Xor => Ok(xor()),
        DataSpec::Separable { n, margin } => Ok(separable_2d(*n, *margin, rng)),
        DataSpec::Csv { path, n_targets } => read_csv(path, *n_targets),
    }
}

fn read_csv(path: &Path, n_targets: usize) -> Result<Dataset, CliError> {
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut ds = Dataset::default();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let values = row
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if values.len() <= n_targets {
            return Err(bad(format!("row {} has {} columns, need more than {n_targets}", i + 1, values.len())));
        }
        let split = values.len() - n_targets;
        ds.inputs.push(values[..split].to_vec());
        ds.targets.push(values[split..].to_vec());
    }
    if ds.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(ds)
}
