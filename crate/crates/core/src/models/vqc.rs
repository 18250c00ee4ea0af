use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::circuit::{Circuit, Jacobian};
use crate::data::Dataset;
use crate::error::{check_len, Error, Result};
use crate::nn::mse;
use crate::rng::{uniform_vec, SimRng};

/// A variational circuit with a per-output affine head:
/// `y = scale * f(x; theta) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcModel {
    pub circuit: Circuit,
    pub theta: Vec<f64>,
    pub scale: Vec<f64>,
    pub bias: Vec<f64>,
}

impl VqcModel {
    pub fn new(circuit: Circuit, theta: Vec<f64>) -> Result<Self> {
        check_len("theta", theta.len(), circuit.n_params())?;
        let m = circuit.observables().len();
        Ok(VqcModel {
            circuit,
            theta,
            scale: vec![1.0; m],
            bias: vec![0.0; m],
        })
    }

    /// Parameters drawn uniformly from `[-half_width, half_width)`.
    pub fn random(circuit: Circuit, rng: &mut SimRng, half_width: f64) -> Self {
        let theta = uniform_vec(rng, circuit.n_params(), half_width);
        Self::new(circuit, theta).expect("length matches by construction")
    }

    pub fn output_dim(&self) -> usize {
        self.circuit.observables().len()
    }

    pub fn input_dim(&self) -> usize {
        self.circuit.input_dim()
    }

    fn check_head(&self) -> Result<()> {
        check_len("output scale", self.scale.len(), self.output_dim())?;
        check_len("output bias", self.bias.len(), self.output_dim())
    }

    fn affine(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(&self.scale)
            .zip(&self.bias)
            .map(|((f, s), b)| s * f + b)
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_head()?;
        Ok(self.affine(&self.circuit.run(x, &self.theta)?))
    }

    /// Raw (pre-affine) circuit Jacobian.
    pub fn raw_jacobian(&self, x: &[f64]) -> Result<Jacobian> {
        self.circuit.jacobian(x, &self.theta)
    }

    /// Jacobian of the affine-headed output.
    pub fn jacobian(&self, x: &[f64]) -> Result<Jacobian> {
        self.check_head()?;
        let mut j = self.raw_jacobian(x)?;
        j.value = self.affine(&j.value);
        for row in j.d_params.iter_mut().chain(j.d_inputs.iter_mut()) {
            for (v, s) in row.iter_mut().zip(&self.scale) {
                *v *= s;
            }
        }
        Ok(j)
    }
}

/// Per-sample gradient of the squared error w.r.t. `theta`, and the loss.
pub fn mse_grad(model: &VqcModel, x: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    let j = model.jacobian(x)?;
    check_len("target", target.len(), j.value.len())?;
    let (loss, d_out) = mse(&j.value, target);
    Ok((loss, j.vjp_params(&d_out)))
}

/// Mean squared error of `model` over `data`.
pub fn dataset_loss(model: &VqcModel, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("dataset".into()));
    }
    let mut total = 0.0;
    for (x, y) in data.iter() {
        total += mse(&model.forward(x)?, y).0;
    }
    Ok(total / data.len() as f64)
}

/// Fraction of samples whose first output has the sign of the target.
pub fn sign_accuracy(model: &VqcModel, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("dataset".into()));
    }
    let mut hits = 0;
    for (x, y) in data.iter() {
        if (model.forward(x)?[0] >= 0.0) == (y[0] >= 0.0) {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}

/// One full-batch gradient step on the mean squared error; returns the
/// pre-step loss.
pub fn train_epoch(model: &mut VqcModel, data: &Dataset, opt: &mut Optimizer) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("dataset".into()));
    }
    let mut grad = vec![0.0; model.theta.len()];
    let mut loss = 0.0;
    for (x, y) in data.iter() {
        let (l, g) = mse_grad(model, x, y)?;
        loss += l;
        for (a, b) in grad.iter_mut().zip(g) {
            *a += b;
        }
    }
    let n = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    opt.step(&mut model.theta, &grad)?;
    Ok(loss / n)
}

/// Runs `epochs` full-batch steps; returns the loss before each step.
pub fn train_vqc(
    model: &mut VqcModel,
    data: &Dataset,
    epochs: usize,
    opt: &mut Optimizer,
) -> Result<Vec<f64>> {
    (0..epochs).map(|_| train_epoch(model, data, opt)).collect()
}
