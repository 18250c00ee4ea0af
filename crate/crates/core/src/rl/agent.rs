use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::Optimizer;
use crate::circuit::{build_layered, Circuit, Encoding, Entangler, GateKind, Op};
use crate::error::{Error, Result};
use crate::models::vqc::VqcModel;
use crate::rl::env::{Action, GridEnv};
use crate::rng::{stream, SimRng};
use crate::sim::Observable;

/// X gates on the qubits whose bit is set in `s` (qubit 0 = most
/// significant), preparing the basis state `|s>`.
pub fn encode_discrete_state(s: usize, n_qubits: usize) -> Result<Vec<Op>> {
    if n_qubits == 0 || n_qubits >= usize::BITS as usize || s >= 1 << n_qubits {
        return Err(Error::InvalidTarget(format!(
            "state {s} does not fit in {n_qubits} qubits"
        )));
    }
    Ok((0..n_qubits)
        .filter(|q| s >> (n_qubits - 1 - q) & 1 == 1)
        .map(|q| Op::fixed(GateKind::X, vec![q]))
        .collect())
}

/// With probability `1 - epsilon` the greedy action (ties to the lowest
/// index), otherwise a uniform random action.
pub fn epsilon_greedy(qvals: &[f64], epsilon: f64, rng: &mut SimRng) -> usize {
    let explore = epsilon > 0.0 && rng.gen::<f64>() < epsilon;
    if explore {
        rng.gen_range(0..qvals.len())
    } else {
        argmax(qvals)
    }
}

pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
    pub done: bool,
}

/// FIFO replay memory.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        ReplayBuffer {
            capacity: capacity.max(1),
            items: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `n` transitions drawn uniformly with replacement.
    pub fn sample(&self, n: usize, rng: &mut SimRng) -> Vec<Transition> {
        if self.items.is_empty() {
            return Vec::new();
        }
        (0..n)
            .map(|_| self.items[rng.gen_range(0..self.items.len())])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentConfig {
    pub n_layers: usize,
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Gradient steps between target-network refreshes.
    pub target_period: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of episodes over which epsilon anneals linearly.
    pub anneal_fraction: f64,
    pub init_half_width: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            n_layers: 3,
            gamma: 0.9,
            lr: 0.02,
            batch_size: 16,
            buffer_capacity: 10000,
            target_period: 20,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            anneal_fraction: 0.6,
            init_half_width: 0.1,
        }
    }
}

/// Deep-Q agent whose Q-function is a variational circuit on basis-encoded
/// states: `Q(s, a) = scale_a * <Z_a> + bias_a`.
#[derive(Debug, Clone)]
pub struct QAgent {
    pub model: VqcModel,
    pub config: AgentConfig,
    target: VqcModel,
    /// `model.circuit` with the encoding of each state prepended.
    encoded: Vec<Circuit>,
    buffer: ReplayBuffer,
    optimizer: Optimizer,
    updates: usize,
}

pub const N_ACTIONS: usize = 4;

impl QAgent {
    pub fn new(n_states: usize, config: AgentConfig, rng: &mut SimRng) -> Result<Self> {
        let n_qubits = crate::models::qt::qubits_for_weights(n_states).max(N_ACTIONS);
        let mut body = build_layered(
            n_qubits,
            0,
            config.n_layers,
            Encoding::Angle,
            Entangler::Ring,
        )?;
        body.set_observables(Observable::z_each(N_ACTIONS))?;
        let model = VqcModel::random(body, rng, config.init_half_width);
        Self::from_model(n_states, model, config)
    }

    pub fn from_model(n_states: usize, model: VqcModel, config: AgentConfig) -> Result<Self> {
        if model.output_dim() != N_ACTIONS {
            return Err(Error::Shape(format!(
                "Q-model must have {N_ACTIONS} outputs"
            )));
        }
        if !(0.0..=1.0).contains(&config.gamma) {
            return Err(Error::Config(format!(
                "gamma {} outside [0, 1]",
                config.gamma
            )));
        }
        let n_qubits = model.circuit.n_qubits();
        let encoded = (0..n_states)
            .map(|s| {
                model
                    .circuit
                    .prepended(&encode_discrete_state(s, n_qubits)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = model.theta.len() + 2 * N_ACTIONS;
        Ok(QAgent {
            target: model.clone(),
            optimizer: Optimizer::adam(config.lr, dim),
            buffer: ReplayBuffer::new(config.buffer_capacity),
            model,
            config,
            encoded,
            updates: 0,
        })
    }

    pub fn n_states(&self) -> usize {
        self.encoded.len()
    }

    fn circuit_for(&self, s: usize) -> Result<&Circuit> {
        self.encoded
            .get(s)
            .ok_or_else(|| Error::InvalidTarget(format!("state {s} out of range")))
    }

    fn eval(&self, model: &VqcModel, s: usize) -> Result<Vec<f64>> {
        let raw = self.circuit_for(s)?.run(&[], &model.theta)?;
        Ok(raw
            .iter()
            .zip(&model.scale)
            .zip(&model.bias)
            .map(|((f, a), b)| a * f + b)
            .collect())
    }

    pub fn q_values(&self, s: usize) -> Result<Vec<f64>> {
        self.eval(&self.model, s)
    }

    pub fn target_q_values(&self, s: usize) -> Result<Vec<f64>> {
        self.eval(&self.target, s)
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn remember(&mut self, t: Transition) {
        self.buffer.push(t);
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    /// `r` if done, else `r + gamma * max_a Q_target(s', a)`.
    pub fn td_target(&self, t: &Transition) -> Result<f64> {
        if t.done || self.config.gamma == 0.0 {
            return Ok(t.reward);
        }
        let next = self.target_q_values(t.next_state)?;
        Ok(t.reward + self.config.gamma * next.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }

    /// Flat trainable parameters: `theta`, then output scales, then biases.
    pub fn params(&self) -> Vec<f64> {
        let m = &self.model;
        m.theta
            .iter()
            .chain(&m.scale)
            .chain(&m.bias)
            .copied()
            .collect()
    }

    fn set_params(&mut self, p: &[f64]) {
        let n = self.model.theta.len();
        self.model.theta.copy_from_slice(&p[..n]);
        self.model.scale.copy_from_slice(&p[n..n + N_ACTIONS]);
        self.model.bias.copy_from_slice(&p[n + N_ACTIONS..]);
    }

    /// Mean squared TD error over `batch` and its gradient w.r.t. `params()`.
    pub fn loss_grad(&self, batch: &[Transition]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::Empty("batch".into()));
        }
        let n_theta = self.model.theta.len();
        // Jacobians per distinct state in the batch.
        let mut jacs = BTreeMap::new();
        for t in batch {
            if let std::collections::btree_map::Entry::Vacant(e) = jacs.entry(t.state) {
                e.insert(
                    self.circuit_for(t.state)?
                        .jacobian(&[], &self.model.theta)?,
                );
            }
        }
        let mut grad = vec![0.0; n_theta + 2 * N_ACTIONS];
        let mut loss = 0.0;
        let nb = batch.len() as f64;
        for t in batch {
            if t.action >= N_ACTIONS {
                return Err(Error::InvalidTarget(format!(
                    "action {} out of range",
                    t.action
                )));
            }
            let j = &jacs[&t.state];
            let a = t.action;
            let q = self.model.scale[a] * j.value[a] + self.model.bias[a];
            let err = q - self.td_target(t)?;
            loss += err * err / nb;
            let dq = 2.0 * err / nb;
            for (k, row) in j.d_params.iter().enumerate() {
                grad[k] += dq * self.model.scale[a] * row[a];
            }
            grad[n_theta + a] += dq * j.value[a];
            grad[n_theta + N_ACTIONS + a] += dq;
        }
        Ok((loss, grad))
    }

    /// One optimizer step on the TD loss; refreshes the target network every
    /// `target_period` updates. Returns the pre-step loss.
    pub fn dqn_update(&mut self, batch: &[Transition]) -> Result<f64> {
        let (loss, grad) = self.loss_grad(batch)?;
        let mut p = self.params();
        self.optimizer.step(&mut p, &grad)?;
        self.set_params(&p);
        self.updates += 1;
        if self.config.target_period > 0 && self.updates % self.config.target_period == 0 {
            self.sync_target();
        }
        Ok(loss)
    }

    pub fn sync_target(&mut self) {
        self.target = self.model.clone();
    }

    pub fn greedy_action(&self, s: usize) -> Result<usize> {
        Ok(argmax(&self.q_values(s)?))
    }

    /// Runs the greedy policy once from the start cell; true if it reaches
    /// the goal. Only meaningful for deterministic environments.
    pub fn greedy_solves(&self, env: &GridEnv) -> Result<bool> {
        let mut env = env.clone();
        let mut s = env.reset();
        let mut rng = stream(0, &[]);
        loop {
            let a = Action::from_index(self.greedy_action(s)?).expect("valid action");
            let out = env.step(a, &mut rng)?;
            if out.done {
                return Ok(out.reward > 0.0);
            }
            s = out.state;
        }
    }
}

impl QAgent {
    /// Mean return of the greedy policy over `episodes` rollouts.
    pub fn greedy_return(&self, env: &GridEnv, episodes: usize, rng: &mut SimRng) -> Result<f64> {
        if episodes == 0 {
            return Err(Error::InvalidCount(
                "need at least one evaluation episode".into(),
            ));
        }
        let mut env = env.clone();
        let mut total = 0.0;
        for _ in 0..episodes {
            let mut s = env.reset();
            loop {
                let a = Action::from_index(self.greedy_action(s)?).expect("valid action");
                let out = env.step(a, rng)?;
                total += out.reward;
                if out.done {
                    break;
                }
                s = out.state;
            }
        }
        Ok(total / episodes as f64)
    }
}

/// Linear anneal from `start` to `end` over the first `fraction` of
/// `episodes`, flat afterwards.
pub fn epsilon_at(episode: usize, episodes: usize, start: f64, end: f64, fraction: f64) -> f64 {
    let span = (episodes as f64 * fraction).max(1.0);
    let t = (episode as f64 / span).min(1.0);
    start + (end - start) * t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub ret: f64,
    pub length: usize,
    pub epsilon: f64,
}

/// Trains `agent` for `episodes` episodes. Randomness (exploration, replay
/// sampling, slippery moves) comes from streams of `seed`.
pub fn train_qrl(
    env: &mut GridEnv,
    agent: &mut QAgent,
    episodes: usize,
    seed: u64,
) -> Result<Vec<EpisodeLog>> {
    if env.n_states() > agent.n_states() {
        return Err(Error::Shape(
            "agent encodes fewer states than the environment has".into(),
        ));
    }
    let mut policy_rng = stream(seed, &[1]);
    let mut replay_rng = stream(seed, &[2]);
    let mut env_rng = stream(seed, &[3]);
    let cfg = agent.config;
    let mut log = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let epsilon = epsilon_at(
            episode,
            episodes,
            cfg.epsilon_start,
            cfg.epsilon_end,
            cfg.anneal_fraction,
        );
        let mut s = env.reset();
        let (mut ret, mut length) = (0.0, 0);
        loop {
            let q = agent.q_values(s)?;
            let a = epsilon_greedy(&q, epsilon, &mut policy_rng);
            let out = env.step(Action::from_index(a).expect("valid action"), &mut env_rng)?;
            agent.remember(Transition {
                state: s,
                action: a,
                reward: out.reward,
                next_state: out.state,
                done: out.done,
            });
            ret += out.reward;
            length += 1;
            if agent.buffer().len() >= cfg.batch_size {
                let batch = agent.buffer().sample(cfg.batch_size, &mut replay_rng);
                agent.dqn_update(&batch)?;
            }
            if out.done {
                break;
            }
            s = out.state;
        }
        log.push(EpisodeLog {
            episode,
            ret,
            length,
            epsilon,
        });
    }
    Ok(log)
}
