use qmlkit::rng::stream;
use qmlkit::Circuit;
use serde_json::json;

use crate::config::SimulateConfig;
use crate::error::CliError;
use crate::output::{f, RunDir};

/// Twelve significant decimals, trailing zeros dropped: `0.4999999999999999`
/// prints as `0.5`.
fn short(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn load_circuit(cfg: &SimulateConfig) -> Result<Circuit, CliError> {
    let text = std::fs::read_to_string(&cfg.circuit)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", cfg.circuit.display())))?;
    Circuit::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", cfg.circuit.display())))
}

pub fn simulate(cfg: &SimulateConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let circuit = load_circuit(cfg)?;
    let state = circuit.state(&cfg.inputs, &cfg.params)?;
    let n = circuit.n_qubits();
    let probs = state.probabilities();

    let mut csv = dir.csv("probabilities", &["basis", "probability"])?;
    for (i, p) in probs.iter().enumerate() {
        csv.write_record([format!("{i:0n$b}"), f(*p)])?;
    }
    csv.flush().map_err(csv::Error::from)?;

    let values = circuit.measure(&state);
    let mut csv = dir.csv("expectations", &["observable", "value"])?;
    for (k, v) in values.iter().enumerate() {
        csv.write_record([k.to_string(), f(*v)])?;
    }
    csv.flush().map_err(csv::Error::from)?;

    let shown: Vec<String> = probs.iter().map(|p| short(*p)).collect();
    println!("probabilities: [{}]", shown.join(", "));
    if !values.is_empty() {
        let shown: Vec<String> = values.iter().map(|v| short(*v)).collect();
        println!("expectations: [{}]", shown.join(", "));
    }

    if cfg.shots > 0 {
        let counts = state.sample_shots(cfg.shots, &mut stream(cfg.seed, &[0]))?;
        let mut csv = dir.csv("counts", &["basis", "count"])?;
        for (basis, c) in &counts {
            csv.write_record([basis.clone(), c.to_string()])?;
        }
        csv.flush().map_err(csv::Error::from)?;
        let shown: Vec<String> = counts.iter().map(|(b, c)| format!("{b}: {c}")).collect();
        println!("counts ({} shots): {{{}}}", cfg.shots, shown.join(", "));
    }
    dir.event(json!({"event": "done", "n_qubits": n, "probabilities": probs, "expectations": values}))?;
    Ok(())
}
