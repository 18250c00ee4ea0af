//! Parameter-shift gradients, a finite-difference reference, and
//! first-order optimizers.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{check_len, Error, Result};
use crate::sim::Observable;

fn expectation_at(circuit: &Circuit, x: &[f64], theta: &[f64], obs: &Observable) -> Result<f64> {
    circuit.state(x, theta)?.expectation(obs)
}

fn check_slot(circuit: &Circuit, slot: usize) -> Result<()> {
    if slot >= circuit.n_params() {
        return Err(Error::UnsupportedGenerator(format!(
            "slot {slot} is not a rotation parameter (circuit has {} slots)",
            circuit.n_params()
        )));
    }
    Ok(())
}

/// `d<obs>/d theta[slot]` by the two-term shift rule, summed over every
/// rotation bound to `slot`.
pub fn param_shift_grad(
    circuit: &Circuit,
    x: &[f64],
    theta: &[f64],
    obs: &Observable,
    slot: usize,
) -> Result<f64> {
    check_slot(circuit, slot)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut grad = 0.0;
    for op_index in circuit.ops_bound_to_param(slot) {
        let op = &circuit.ops()[op_index];
        if !op.kind.is_rotation() {
            return Err(Error::UnsupportedGenerator(format!(
                "slot {slot} drives {} at op {op_index}",
                op.kind.name()
            )));
        }
        let plus = circuit
            .state_shifted(None, x, theta, op_index, half_pi)?
            .expectation(obs)?;
        let minus = circuit
            .state_shifted(None, x, theta, op_index, -half_pi)?
            .expectation(obs)?;
        grad += (plus - minus) / 2.0;
    }
    Ok(grad)
}

/// Central difference `(f(theta_k + h) - f(theta_k - h)) / 2h`.
pub fn finite_diff_grad(
    circuit: &Circuit,
    x: &[f64],
    theta: &[f64],
    obs: &Observable,
    slot: usize,
    h: f64,
) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::InvalidCount(format!(
            "step must be positive, got {h}"
        )));
    }
    check_slot(circuit, slot)?;
    let mut shifted = theta.to_vec();
    shifted[slot] = theta[slot] + h;
    let plus = expectation_at(circuit, x, &shifted, obs)?;
    shifted[slot] = theta[slot] - h;
    let minus = expectation_at(circuit, x, &shifted, obs)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Full parameter-shift gradient of `<obs>`.
pub fn param_shift_gradient(
    circuit: &Circuit,
    x: &[f64],
    theta: &[f64],
    obs: &Observable,
) -> Result<Vec<f64>> {
    let j = circuit.shift_jacobian(None, x, theta, |s| vec![s.expectation(obs).unwrap_or(0.0)])?;
    Ok(j.d_params.into_iter().map(|r| r[0]).collect())
}

/// `theta - lr * grad`.
pub fn sgd_step(theta: &[f64], grad: &[f64], lr: f64) -> Result<Vec<f64>> {
    check_len("gradient", grad.len(), theta.len())?;
    Ok(theta.iter().zip(grad).map(|(t, g)| t - lr * g).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update.
pub fn adam_step(
    state: &AdamState,
    theta: &[f64],
    grad: &[f64],
    lr: f64,
    hyper: AdamHyper,
) -> Result<(AdamState, Vec<f64>)> {
    check_len("gradient", grad.len(), theta.len())?;
    check_len("adam state", state.m.len(), theta.len())?;
    let t = state.t + 1;
    let AdamHyper { beta1, beta2, eps } = hyper;
    let bc1 = 1.0 - beta1.powi(t as i32);
    let bc2 = 1.0 - beta2.powi(t as i32);
    let mut next = AdamState {
        m: state.m.clone(),
        v: state.v.clone(),
        t,
    };
    let mut out = theta.to_vec();
    for i in 0..theta.len() {
        next.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        next.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        let m_hat = next.m[i] / bc1;
        let v_hat = next.v[i] / bc2;
        out[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok((next, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

/// Stateful optimizer owned by a training loop.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    lr: f64,
    hyper: AdamHyper,
    adam: AdamState,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, lr: f64, dim: usize) -> Self {
        Optimizer {
            kind,
            lr,
            hyper: AdamHyper::default(),
            adam: AdamState::new(dim),
        }
    }

    pub fn sgd(lr: f64, dim: usize) -> Self {
        Self::new(OptimizerKind::Sgd, lr, dim)
    }

    pub fn adam(lr: f64, dim: usize) -> Self {
        Self::new(OptimizerKind::Adam, lr, dim)
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        let next = match self.kind {
            OptimizerKind::Sgd => sgd_step(params, grad, self.lr)?,
            OptimizerKind::Adam => {
                let (state, next) = adam_step(&self.adam, params, grad, self.lr, self.hyper)?;
                self.adam = state;
                next
            }
        };
        params.copy_from_slice(&next);
        Ok(())
    }
}
