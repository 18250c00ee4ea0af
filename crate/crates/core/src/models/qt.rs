//! Quantum-Train: classical network weights generated from the basis-state
//! probabilities of an `N = ceil(log2 M)` qubit circuit.
//!
//! `w_i = s * (2^N p_i - 1) + b` for the first `M` basis indices, with
//! trainable `s` and `b`.

use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::circuit::Circuit;
use crate::data::Dataset;
use crate::error::{check_len, Error, Result};
use crate::nn::{mse, Mlp};

/// `ceil(log2 m)`; zero for `m <= 1`.
pub fn qubits_for_weights(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Width of the generating circuit. A single weight still needs one qubit
/// to simulate.
pub fn compressor_qubits(m: usize) -> usize {
    qubits_for_weights(m).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QtCompressor {
    pub circuit: Circuit,
    pub theta: Vec<f64>,
    pub scale: f64,
    pub shift: f64,
    n_weights: usize,
}

impl QtCompressor {
    /// `circuit` must take no inputs and act on `compressor_qubits(m)` qubits.
    pub fn new(circuit: Circuit, theta: Vec<f64>, n_weights: usize) -> Result<Self> {
        if n_weights == 0 {
            return Err(Error::Capacity("weight count must be at least 1".into()));
        }
        let n = circuit.n_qubits();
        if n_weights > 1usize << n {
            return Err(Error::Capacity(format!(
                "{n_weights} weights exceed 2^{n} basis states"
            )));
        }
        if n != compressor_qubits(n_weights) {
            return Err(Error::Capacity(format!(
                "{n_weights} weights need {} qubits, circuit has {n}",
                compressor_qubits(n_weights)
            )));
        }
        if circuit.input_dim() != 0 {
            return Err(Error::Binding(
                "weight-generating circuit takes no inputs".into(),
            ));
        }
        check_len("theta", theta.len(), circuit.n_params())?;
        Ok(QtCompressor {
            circuit,
            theta,
            scale: 1.0,
            shift: 0.0,
            n_weights,
        })
    }

    pub fn n_weights(&self) -> usize {
        self.n_weights
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    fn dim(&self) -> f64 {
        (1usize << self.n_qubits()) as f64
    }

    /// Basis probabilities of the circuit state, first `M` only.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let mut p = self.circuit.state(&[], &self.theta)?.probabilities();
        p.truncate(self.n_weights);
        Ok(p)
    }

    pub fn generate_weights(&self) -> Result<Vec<f64>> {
        let dim = self.dim();
        Ok(self
            .probabilities()?
            .iter()
            .map(|p| self.scale * (dim * p - 1.0) + self.shift)
            .collect())
    }

    /// Trainable parameters: `theta`, then `scale`, then `shift`.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.theta.clone();
        p.push(self.scale);
        p.push(self.shift);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        check_len("compressor parameters", p.len(), self.theta.len() + 2)?;
        let n = self.theta.len();
        self.theta.copy_from_slice(&p[..n]);
        self.scale = p[n];
        self.shift = p[n + 1];
        Ok(())
    }

    /// Pulls a gradient on the generated weights back to `params()`.
    pub fn pullback(&self, d_weights: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_len("weight gradient", d_weights.len(), self.n_weights)?;
        let m = self.n_weights;
        let jac = self.circuit.shift_jacobian(None, &[], &self.theta, |s| {
            let mut p = s.probabilities();
            p.truncate(m);
            p
        })?;
        let dim = self.dim();
        let d_prob: Vec<f64> = d_weights.iter().map(|d| d * self.scale * dim).collect();
        let mut grad = jac.vjp_params(&d_prob);
        grad.push(
            d_weights
                .iter()
                .zip(&jac.value)
                .map(|(d, p)| d * (dim * p - 1.0))
                .sum(),
        );
        grad.push(d_weights.iter().sum());
        let weights = jac
            .value
            .iter()
            .map(|p| self.scale * (dim * p - 1.0) + self.shift)
            .collect();
        Ok((weights, grad))
    }
}

/// Mean squared error of `net` with weights `w` over `data`, plus the
/// gradient with respect to `w`.
pub fn net_loss_grad(net: &Mlp, w: &[f64], data: &Dataset) -> Result<(f64, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::Empty("dataset".into()));
    }
    let mut grad = vec![0.0; w.len()];
    let mut loss = 0.0;
    for (x, y) in data.iter() {
        let out = net.forward(w, x)?;
        let (l, d) = mse(&out, y);
        loss += l;
        let (_, gw, _) = net.backward(w, x, &d)?;
        grad.iter_mut().zip(gw).for_each(|(a, b)| *a += b);
    }
    let n = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    Ok((loss / n, grad))
}

/// Loss of `net` under the compressor's generated weights, and the gradient
/// with respect to `compressor.params()`.
pub fn qt_loss_grad(
    compressor: &QtCompressor,
    net: &Mlp,
    data: &Dataset,
) -> Result<(f64, Vec<f64>)> {
    if net.n_weights() != compressor.n_weights() {
        return Err(Error::Shape(format!(
            "network has {} weights, compressor generates {}",
            net.n_weights(),
            compressor.n_weights()
        )));
    }
    let w = compressor.generate_weights()?;
    let (loss, dw) = net_loss_grad(net, &w, data)?;
    let (_, grad) = compressor.pullback(&dw)?;
    Ok((loss, grad))
}

/// Trains the compressor so that `net` with generated weights fits `data`.
/// Returns the loss before each epoch.
pub fn qt_train(
    compressor: &mut QtCompressor,
    net: &Mlp,
    data: &Dataset,
    epochs: usize,
    opt: &mut Optimizer,
) -> Result<Vec<f64>> {
    if net.n_weights() != compressor.n_weights() {
        return Err(Error::Shape(format!(
            "network has {} weights, compressor generates {}",
            net.n_weights(),
            compressor.n_weights()
        )));
    }
    let mut log = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let (loss, grad) = qt_loss_grad(compressor, net, data)?;
        let mut p = compressor.params();
        opt.step(&mut p, &grad)?;
        compressor.set_params(&p)?;
        log.push(loss);
    }
    Ok(log)
}
