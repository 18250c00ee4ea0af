//! Reinforcement-learned circuit construction: an agent appends one gate
//! per step and is rewarded with the target fidelity when the gate budget
//! runs out.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Op};
use crate::error::{Error, Result};
use crate::rl::agent::{argmax, epsilon_at};
use crate::rng::stream;
use crate::sim::{Observable, Statevector};

#[derive(Debug, Clone, PartialEq)]
pub struct BuilderStep {
    /// `<Z_q>` for every qubit on the circuit built so far.
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    /// False when the action was rejected and nothing changed.
    pub accepted: bool,
}

/// The builder MDP: a partial circuit, the legal actions and a budget.
#[derive(Debug, Clone)]
pub struct BuilderEnv {
    n_qubits: usize,
    actions: Vec<Op>,
    budget: usize,
    target: Statevector,
    ops: Vec<Op>,
}

impl BuilderEnv {
    pub fn new(target: Statevector, actions: Vec<Op>, budget: usize) -> Result<Self> {
        let n_qubits = target.n_qubits();
        if actions.is_empty() {
            return Err(Error::Config("builder needs at least one action".into()));
        }
        let mut probe = Circuit::new(n_qubits, 0, 0)?;
        for a in &actions {
            if a.kind.is_rotation() || a.angle.is_some() {
                return Err(Error::Config(format!(
                    "builder actions must be fixed gates, got {}",
                    a.kind.name()
                )));
            }
            probe.push(a.clone())?;
        }
        Ok(BuilderEnv {
            n_qubits,
            actions,
            budget,
            target,
            ops: Vec::new(),
        })
    }

    pub fn actions(&self) -> &[Op] {
        &self.actions
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn is_done(&self) -> bool {
        self.ops.len() >= self.budget
    }

    pub fn circuit(&self) -> Circuit {
        Circuit::from_parts(
            self.n_qubits,
            0,
            0,
            self.ops.clone(),
            Observable::z_each(self.n_qubits),
        )
        .expect("actions were validated")
    }

    fn state(&self) -> Statevector {
        self.circuit().state(&[], &[]).expect("no bindings needed")
    }

    pub fn observation(&self) -> Vec<f64> {
        self.circuit().measure(&self.state())
    }

    /// Fidelity of the current circuit's output with the target.
    pub fn metric(&self) -> f64 {
        self.target
            .fidelity(&self.state())
            .expect("qubit counts match")
    }

    pub fn reset(&mut self) -> Vec<f64> {
        self.ops.clear();
        self.observation()
    }

    /// Appends `action` if it is legal and the episode is still running.
    pub fn step(&mut self, action: &Op) -> BuilderStep {
        if self.is_done() || !self.actions.contains(action) {
            return BuilderStep {
                observation: self.observation(),
                reward: 0.0,
                done: self.is_done(),
                accepted: false,
            };
        }
        self.ops.push(action.clone());
        let done = self.is_done();
        let reward = if done { self.metric() } else { 0.0 };
        BuilderStep {
            observation: self.observation(),
            reward,
            done,
            accepted: true,
        }
    }
}

/// Free-function form of [`BuilderEnv::step`].
pub fn qas_env_step(env: &mut BuilderEnv, kind: GateKind, targets: &[usize]) -> BuilderStep {
    env.step(&Op::fixed(kind, targets.to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuilderAgentConfig {
    pub episodes: usize,
    /// Learning rate of the tabular update.
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub anneal_fraction: f64,
    pub seed: u64,
}

impl Default for BuilderAgentConfig {
    fn default() -> Self {
        BuilderAgentConfig {
            episodes: 500,
            alpha: 0.5,
            gamma: 1.0,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            anneal_fraction: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuilderResult {
    pub best_ops: Vec<Op>,
    pub best_reward: f64,
    /// Terminal reward of every episode.
    pub rewards: Vec<f64>,
    pub best_circuit: Circuit,
}

/// Tabular Q-learning over the builder MDP. States are the action
/// sequences placed so far, which is exact for a deterministic builder;
/// the Pauli-Z observation is reported but not used as the table key.
pub fn qas_rl_train(env: &BuilderEnv, config: &BuilderAgentConfig) -> Result<BuilderResult> {
    if !(0.0..=1.0).contains(&config.alpha) || !(0.0..=1.0).contains(&config.gamma) {
        return Err(Error::Config("alpha and gamma must lie in [0, 1]".into()));
    }
    let mut env = env.clone();
    let n_actions = env.actions.len();
    let mut q: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
    let mut rng = stream(config.seed, &[1]);
    env.reset();
    let mut best_ops = Vec::new();
    let mut best_reward = env.metric();
    let mut rewards = Vec::with_capacity(config.episodes);

    for episode in 0..config.episodes {
        env.reset();
        let eps = epsilon_at(
            episode,
            config.episodes,
            config.epsilon_start,
            config.epsilon_end,
            config.anneal_fraction,
        );
        let mut key: Vec<usize> = Vec::new();
        let mut reward = if env.is_done() { env.metric() } else { 0.0 };
        while !env.is_done() {
            let row = q.entry(key.clone()).or_insert_with(|| vec![0.0; n_actions]);
            let a = if rng.gen::<f64>() < eps {
                rng.gen_range(0..n_actions)
            } else {
                argmax(row)
            };
            let action = env.actions[a].clone();
            let step = env.step(&action);
            let mut next = key.clone();
            next.push(a);
            let future = if step.done {
                0.0
            } else {
                q.get(&next)
                    .map_or(0.0, |r| r.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            };
            let row = q.get_mut(&key).expect("inserted above");
            row[a] += config.alpha * (step.reward + config.gamma * future - row[a]);
            key = next;
            reward = step.reward;
        }
        if reward > best_reward {
            best_reward = reward;
            best_ops = env.ops.clone();
        }
        rewards.push(reward);
    }
    let best_circuit = Circuit::from_parts(
        env.n_qubits,
        0,
        0,
        best_ops.clone(),
        Observable::z_each(env.n_qubits),
    )?;
    Ok(BuilderResult {
        best_ops,
        best_reward,
        rewards,
        best_circuit,
    })
}

/// The four-action gate set used for Bell-state construction.
pub fn bell_actions() -> Vec<Op> {
    vec![
        Op::fixed(GateKind::H, vec![0]),
        Op::fixed(GateKind::H, vec![1]),
        Op::cnot(0, 1),
        Op::cnot(1, 0),
    ]
}
