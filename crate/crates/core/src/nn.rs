//! Small classical pieces: activations, a dense feed-forward net over a flat
//! weight vector, and the squared-error loss.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
        }
    }

    /// Derivative expressed through the activation's output `y`.
    pub fn derivative_at_output(self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }
}

/// Dense feed-forward network whose weights live in an external flat vector.
///
/// Layout, layer by layer: the weight matrix row-major (`out x in`), then the
/// bias vector. A 2-4-1 net therefore has `2*4 + 4 + 4*1 + 1 = 17` weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    hidden: Activation,
    output: Activation,
}

impl Mlp {
    pub fn new(sizes: Vec<usize>, hidden: Activation, output: Activation) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Shape(format!("invalid layer sizes {sizes:?}")));
        }
        Ok(Mlp {
            sizes,
            hidden,
            output,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn n_weights(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn activation(&self, layer: usize) -> Activation {
        if layer + 2 == self.sizes.len() {
            self.output
        } else {
            self.hidden
        }
    }

    /// Activations of every layer, input included.
    fn trace(&self, weights: &[f64], x: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_len("mlp weights", weights.len(), self.n_weights())?;
        check_len("mlp input", x.len(), self.input_dim())?;
        let mut acts = vec![x.to_vec()];
        let mut off = 0;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let mat = &weights[off..off + n_in * n_out];
            let bias = &weights[off + n_in * n_out..off + n_in * n_out + n_out];
            off += n_in * n_out + n_out;
            let prev = acts.last().unwrap();
            let act = self.activation(l);
            let next = (0..n_out)
                .map(|o| {
                    let z: f64 = mat[o * n_in..(o + 1) * n_in]
                        .iter()
                        .zip(prev)
                        .map(|(a, b)| a * b)
                        .sum();
                    act.apply(z + bias[o])
                })
                .collect();
            acts.push(next);
        }
        Ok(acts)
    }

    pub fn forward(&self, weights: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.trace(weights, x)?.pop().unwrap())
    }

    /// Output plus vector-Jacobian products `(d weights, d input)` for the
    /// cotangent `d_out` on the output.
    pub fn backward(
        &self,
        weights: &[f64],
        x: &[f64],
        d_out: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let acts = self.trace(weights, x)?;
        check_len("mlp cotangent", d_out.len(), self.output_dim())?;
        let mut grad = vec![0.0; weights.len()];
        let mut offsets = Vec::new();
        let mut off = 0;
        for w in self.sizes.windows(2) {
            offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        let mut delta: Vec<f64> = d_out.to_vec();
        for l in (0..self.sizes.len() - 1).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let act = self.activation(l);
            let out = &acts[l + 1];
            let pre: Vec<f64> = delta
                .iter()
                .zip(out)
                .map(|(d, y)| d * act.derivative_at_output(*y))
                .collect();
            let base = offsets[l];
            let input = &acts[l];
            for o in 0..n_out {
                for i in 0..n_in {
                    grad[base + o * n_in + i] += pre[o] * input[i];
                }
                grad[base + n_in * n_out + o] += pre[o];
            }
            let mat = &weights[base..base + n_in * n_out];
            delta = (0..n_in)
                .map(|i| (0..n_out).map(|o| mat[o * n_in + i] * pre[o]).sum())
                .collect();
        }
        Ok((acts.last().unwrap().clone(), grad, delta))
    }
}

/// Mean squared error over the output components and its gradient.
pub fn mse(pred: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
    let n = pred.len().max(1) as f64;
    let loss = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t).powi(2))
        .sum::<f64>()
        / n;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(p, t)| 2.0 * (p - t) / n)
        .collect();
    (loss, grad)
}
