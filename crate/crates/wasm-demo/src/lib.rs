//! Three operations for the browser page in `www/`. Each returns a JSON
//! string so the page needs no generated type glue beyond `wasm-bindgen`'s.
//!
//! The plain functions are ordinary Rust and tested natively; the `js_*`
//! wrappers only convert errors.

use std::f64::consts::PI;

use qmlkit::autodiff::{param_shift_grad, Optimizer};
use qmlkit::data::xor;
use qmlkit::models::qt::{compressor_qubits, qt_loss_grad, qt_train, QtCompressor};
use qmlkit::nn::{Activation, Mlp};
use qmlkit::rng::{stream, uniform_vec};
use qmlkit::{build_layered, Circuit, Encoding, Entangler, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Default circuit for the page: RY(t0) on 0, CNOT, RY(t1) on 1, measure Z0 Z1.
pub const DEFAULT_CIRCUIT: &str = r#"{
  "version": 1,
  "n_qubits": 2,
  "input_dim": 0,
  "n_params": 2,
  "ops": [
    {"gate": "RY", "targets": [0], "angle": {"param": 0}},
    {"gate": "CNOT", "targets": [0, 1]},
    {"gate": "RY", "targets": [1], "angle": {"param": 1}}
  ],
  "observables": [
    [{"qubit": 0, "pauli": "Z"}],
    [{"qubit": 1, "pauli": "Z"}],
    [{"qubit": 0, "pauli": "Z"}, {"qubit": 1, "pauli": "Z"}]
  ]
}"#;

/// `{n_qubits, n_params, input_dim}` of a circuit document.
pub fn circuit_info(circuit_json: &str) -> Result<String> {
    let c = Circuit::from_json(circuit_json)?;
    Ok(json!({"n_qubits": c.n_qubits(), "n_params": c.n_params(), "input_dim": c.input_dim()}).to_string())
}

/// Basis probabilities (MSB-first labels) and observable values at `theta`,
/// with all inputs set to zero.
pub fn simulate(circuit_json: &str, theta: &[f64]) -> Result<String> {
    let c = Circuit::from_json(circuit_json)?;
    let state = c.state(&vec![0.0; c.input_dim()], theta)?;
    let n = c.n_qubits();
    let labels: Vec<String> = (0..1usize << n).map(|i| format!("{i:0n$b}")).collect();
    Ok(json!({
        "labels": labels,
        "probabilities": state.probabilities(),
        "expectations": c.measure(&state),
    })
    .to_string())
}

/// Sweeps parameter `slot` over `[-pi, pi]` in `points` steps, holding the
/// others at `theta`, and reports the first observable and its
/// parameter-shift derivative at each angle.
pub fn landscape(circuit_json: &str, theta: &[f64], slot: usize, points: usize) -> Result<String> {
    let c = Circuit::from_json(circuit_json)?;
    let obs = c
        .observables()
        .first()
        .cloned()
        .ok_or_else(|| qmlkit::Error::Config("circuit has no observables".into()))?;
    let x = vec![0.0; c.input_dim()];
    let points = points.max(2);
    let mut t = theta.to_vec();
    let (mut angles, mut values, mut grads) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..points {
        let a = -PI + 2.0 * PI * i as f64 / (points - 1) as f64;
        *t.get_mut(slot).ok_or_else(|| qmlkit::Error::Config(format!("no parameter slot {slot}")))? = a;
        angles.push(a);
        values.push(c.state(&x, &t)?.expectation(&obs)?);
        grads.push(param_shift_grad(&c, &x, &t, &obs, slot)?);
    }
    Ok(json!({"angles": angles, "values": values, "gradients": grads}).to_string())
}

/// Trains a Quantum-Train compressor for the XOR network with layer sizes
/// `sizes` and returns the loss curve, generated weights and predictions.
pub fn quantum_train_xor(sizes: &[usize], n_layers: usize, epochs: usize, seed: u64) -> Result<String> {
    let net = Mlp::new(sizes.to_vec(), Activation::Tanh, Activation::Identity)?;
    let m = net.n_weights();
    let n = compressor_qubits(m);
    let circuit = build_layered(n, 0, n_layers, Encoding::Angle, Entangler::Ring)?;
    let theta = uniform_vec(&mut stream(seed, &[1]), circuit.n_params(), PI);
    let mut comp = QtCompressor::new(circuit, theta, m)?;
    let data = xor();
    let mut opt = Optimizer::adam(0.05, comp.params().len());
    let mut losses = qt_train(&mut comp, &net, &data, epochs, &mut opt)?;
    losses.push(qt_loss_grad(&comp, &net, &data)?.0);
    let weights = comp.generate_weights()?;
    let predictions = data
        .inputs
        .iter()
        .map(|x| Ok(net.forward(&weights, x)?[0]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(json!({
        "n_weights": m,
        "n_qubits": n,
        "trainable": comp.params().len(),
        "losses": losses,
        "weights": weights,
        "inputs": data.inputs,
        "targets": data.targets,
        "predictions": predictions,
    })
    .to_string())
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = defaultCircuit)]
pub fn js_default_circuit() -> String {
    DEFAULT_CIRCUIT.to_string()
}

#[wasm_bindgen(js_name = circuitInfo)]
pub fn js_circuit_info(circuit_json: &str) -> std::result::Result<String, JsError> {
    js(circuit_info(circuit_json))
}

#[wasm_bindgen(js_name = simulate)]
pub fn js_simulate(circuit_json: &str, theta: &[f64]) -> std::result::Result<String, JsError> {
    js(simulate(circuit_json, theta))
}

#[wasm_bindgen(js_name = landscape)]
pub fn js_landscape(circuit_json: &str, theta: &[f64], slot: usize, points: usize) -> std::result::Result<String, JsError> {
    js(landscape(circuit_json, theta, slot, points))
}

#[wasm_bindgen(js_name = quantumTrainXor)]
pub fn js_quantum_train_xor(
    sizes: &[u32],
    n_layers: usize,
    epochs: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    let sizes: Vec<usize> = sizes.iter().map(|&s| s as usize).collect();
    js(quantum_train_xor(&sizes, n_layers, epochs, seed.into()))
}
