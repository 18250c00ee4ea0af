//! Quantum fast-weight programmer.
//!
//! A classical slow network maps each observation to an additive update of
//! the fast circuit's parameters; the fast circuit then produces the output
//! with its updated parameters. Only the slow network is trained.

use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::error::{check_len, Error, Result};
use crate::models::vqc::VqcModel;
use crate::nn::{mse, Activation, Mlp};
use crate::rng::{uniform_vec, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfwpModel {
    /// One tanh hidden layer, linear output of length `fast.theta.len()`.
    pub slow: Mlp,
    pub slow_weights: Vec<f64>,
    /// Fast network; `fast.theta` holds the episode's starting parameters.
    pub fast: VqcModel,
}

impl QfwpModel {
    pub fn new(
        fast: VqcModel,
        slow_hidden: usize,
        rng: &mut SimRng,
        slow_half_width: f64,
    ) -> Result<Self> {
        let slow = Mlp::new(
            vec![fast.input_dim(), slow_hidden, fast.theta.len()],
            Activation::Tanh,
            Activation::Identity,
        )?;
        let slow_weights = uniform_vec(rng, slow.n_weights(), slow_half_width);
        Ok(QfwpModel {
            slow,
            slow_weights,
            fast,
        })
    }

    /// `slow(observation)`, the additive update.
    pub fn delta(&self, observation: &[f64]) -> Result<Vec<f64>> {
        self.slow.forward(&self.slow_weights, observation)
    }

    /// Applies `theta_fast += slow(o)` and returns the fast output on `o`.
    pub fn step(&self, fast_theta: &mut [f64], observation: &[f64]) -> Result<Vec<f64>> {
        check_len("fast parameters", fast_theta.len(), self.fast.theta.len())?;
        let d = self.delta(observation)?;
        fast_theta.iter_mut().zip(&d).for_each(|(t, d)| *t += d);
        let mut fast = self.fast.clone();
        fast.theta.copy_from_slice(fast_theta);
        fast.forward(observation)
    }

    /// Outputs for a whole episode starting from the initial fast parameters,
    /// and the final fast parameters.
    pub fn run_episode(&self, observations: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let mut theta = self.fast.theta.clone();
        let outs = observations
            .iter()
            .map(|o| self.step(&mut theta, o))
            .collect::<Result<_>>()?;
        Ok((outs, theta))
    }

    pub fn episode_loss(&self, observations: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        check_len("targets", targets.len(), observations.len())?;
        let (outs, _) = self.run_episode(observations)?;
        Ok(outs.iter().zip(targets).map(|(y, t)| mse(y, t).0).sum())
    }

    /// Summed squared-error loss over the episode and its gradient with
    /// respect to the slow weights.
    ///
    /// With `theta_t = theta_0 + sum_{s<=t} delta_s`, the update emitted at
    /// step `s` receives the fast-parameter gradients of every step `t >= s`.
    pub fn episode_grad(
        &self,
        observations: &[Vec<f64>],
        targets: &[Vec<f64>],
    ) -> Result<(f64, Vec<f64>)> {
        if observations.is_empty() {
            return Err(Error::Empty("episode".into()));
        }
        check_len("targets", targets.len(), observations.len())?;
        let mut fast = self.fast.clone();
        let mut loss = 0.0;
        let mut step_grads = Vec::with_capacity(observations.len());
        for (o, t) in observations.iter().zip(targets) {
            let d = self.delta(o)?;
            fast.theta.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
            let j = fast.jacobian(o)?;
            check_len("target", t.len(), j.value.len())?;
            let (l, dy) = mse(&j.value, t);
            loss += l;
            step_grads.push(j.vjp_params(&dy));
        }
        let mut suffix = vec![0.0; self.fast.theta.len()];
        let mut grad = vec![0.0; self.slow_weights.len()];
        for (o, g) in observations.iter().zip(&step_grads).rev() {
            suffix.iter_mut().zip(g).for_each(|(a, b)| *a += b);
            let (_, gw, _) = self.slow.backward(&self.slow_weights, o, &suffix)?;
            grad.iter_mut().zip(gw).for_each(|(a, b)| *a += b);
        }
        Ok((loss, grad))
    }
}

/// Full-batch training of the slow network over a set of episodes
/// `(observations, targets)`; returns the mean episode loss before each step.
pub fn train_qfwp(
    model: &mut QfwpModel,
    episodes: &[(Vec<Vec<f64>>, Vec<Vec<f64>>)],
    steps: usize,
    opt: &mut Optimizer,
) -> Result<Vec<f64>> {
    if episodes.is_empty() {
        return Err(Error::Empty("no training episodes".into()));
    }
    let n = episodes.len() as f64;
    let mut log = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut grad = vec![0.0; model.slow_weights.len()];
        let mut loss = 0.0;
        for (obs, targets) in episodes {
            let (l, g) = model.episode_grad(obs, targets)?;
            loss += l / n;
            grad.iter_mut().zip(g).for_each(|(a, b)| *a += b / n);
        }
        opt.step(&mut model.slow_weights, &grad)?;
        log.push(loss);
    }
    Ok(log)
}
