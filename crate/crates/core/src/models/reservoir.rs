//! Frozen QLSTM reservoir with a trainable affine readout.
//!
//! The recurrent cell is drawn once from a seed and never exposed mutably;
//! training touches only the readout.

use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::error::{check_len, Error, Result};
use crate::models::qlstm::{Qlstm, QlstmShape, QlstmState};
use crate::nn::{mse, sigmoid};
use crate::rng::{rng_from_seed, uniform_vec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReadoutLoss {
    /// Squared error on `W h + b`.
    Mse,
    /// Binary cross-entropy on `sigmoid(W h + b)` against 0/1 labels.
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QlstmReservoir {
    cell: Qlstm,
    seed: u64,
    /// Row-major `output_dim x hidden_dim` weights followed by biases.
    pub readout: Vec<f64>,
    pub output_dim: usize,
}

impl QlstmReservoir {
    pub fn from_seed(
        shape: QlstmShape,
        output_dim: usize,
        seed: u64,
        half_width: f64,
    ) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let cell = Qlstm::new(shape, &mut rng, half_width)?;
        let readout = uniform_vec(&mut rng, output_dim * shape.hidden_dim + output_dim, 0.1);
        Ok(QlstmReservoir {
            cell,
            seed,
            readout,
            output_dim,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn hidden_dim(&self) -> usize {
        self.cell.hidden_dim
    }

    pub fn cell(&self) -> &Qlstm {
        &self.cell
    }

    pub fn trajectory(&self, sequence: &[Vec<f64>]) -> Result<Vec<QlstmState>> {
        self.cell.trajectory(sequence)
    }

    /// Final hidden state after consuming `sequence`.
    pub fn forward(&self, sequence: &[Vec<f64>]) -> Result<Vec<f64>> {
        if sequence.is_empty() {
            return Err(Error::Empty("sequence".into()));
        }
        Ok(self.trajectory(sequence)?.pop().unwrap().h)
    }

    /// Readout pre-activation `W h + b`.
    pub fn readout_linear(&self, h: &[f64]) -> Result<Vec<f64>> {
        let hd = self.hidden_dim();
        check_len("reservoir features", h.len(), hd)?;
        let (w, b) = self.readout.split_at(self.output_dim * hd);
        Ok((0..self.output_dim)
            .map(|o| {
                w[o * hd..(o + 1) * hd]
                    .iter()
                    .zip(h)
                    .map(|(a, x)| a * x)
                    .sum::<f64>()
                    + b[o]
            })
            .collect())
    }

    /// Loss and readout gradient on precomputed features.
    pub fn readout_grad(
        &self,
        features: &[Vec<f64>],
        targets: &[Vec<f64>],
        loss: ReadoutLoss,
    ) -> Result<(f64, Vec<f64>)> {
        if features.is_empty() {
            return Err(Error::Empty("features".into()));
        }
        check_len("targets", targets.len(), features.len())?;
        let hd = self.hidden_dim();
        let mut grad = vec![0.0; self.readout.len()];
        let mut total = 0.0;
        for (h, y) in features.iter().zip(targets) {
            let z = self.readout_linear(h)?;
            check_len("target", y.len(), z.len())?;
            let dz: Vec<f64> = match loss {
                ReadoutLoss::Mse => {
                    let (l, d) = mse(&z, y);
                    total += l;
                    d
                }
                ReadoutLoss::Logistic => z
                    .iter()
                    .zip(y)
                    .map(|(z, y)| {
                        let p = sigmoid(*z).clamp(1e-12, 1.0 - 1e-12);
                        total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
                        p - y
                    })
                    .collect(),
            };
            for o in 0..self.output_dim {
                for k in 0..hd {
                    grad[o * hd + k] += dz[o] * h[k];
                }
                grad[self.output_dim * hd + o] += dz[o];
            }
        }
        let n = features.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        Ok((total / n, grad))
    }

    /// Final hidden states for a batch of sequences.
    pub fn features(&self, sequences: &[Vec<Vec<f64>>]) -> Result<Vec<Vec<f64>>> {
        sequences.iter().map(|s| self.forward(s)).collect()
    }

    /// Trains only the readout; returns the per-epoch loss.
    pub fn train_readout(
        &mut self,
        features: &[Vec<f64>],
        targets: &[Vec<f64>],
        loss: ReadoutLoss,
        epochs: usize,
        opt: &mut Optimizer,
    ) -> Result<Vec<f64>> {
        let mut log = Vec::with_capacity(epochs);
        for _ in 0..epochs {
            let (l, g) = self.readout_grad(features, targets, loss)?;
            opt.step(&mut self.readout, &g)?;
            log.push(l);
        }
        Ok(log)
    }
}
