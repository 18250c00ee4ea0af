//! Search objectives and genome fitness.

use crate::autodiff::Optimizer;
use crate::circuit::Circuit;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::vqc::{sign_accuracy, train_vqc, VqcModel};
use crate::qas::library::{BlockLibrary, Genome};
use crate::rl::agent::{train_qrl, AgentConfig, QAgent, N_ACTIONS};
use crate::rl::env::GridEnv;
use crate::rng::{derive_seed, rng_from_seed, stream, uniform_vec};
use crate::sim::{Observable, Statevector};

/// What a candidate circuit is scored on.
#[derive(Debug, Clone)]
pub enum TaskKind {
    /// `|<target|psi>|^2` from `|0...0>`. Circuits with variational slots
    /// are first tuned for `steps` Adam steps.
    Fidelity {
        target: Statevector,
        steps: usize,
        lr: f64,
    },
    /// Sign accuracy after `epochs` full-batch Adam steps on the squared error.
    Supervised {
        data: Dataset,
        epochs: usize,
        lr: f64,
    },
    /// Mean greedy return after `episodes` of deep-Q training with the
    /// circuit as the Q-function body.
    Rl {
        env: GridEnv,
        agent: AgentConfig,
        episodes: usize,
        eval_episodes: usize,
    },
}

#[derive(Debug, Clone)]
pub struct QasTask {
    pub kind: TaskKind,
    /// Subtracted once per non-empty block.
    pub depth_penalty: f64,
    pub seed: u64,
    pub init_half_width: f64,
}

impl QasTask {
    pub fn fidelity(target: Statevector) -> Self {
        QasTask {
            kind: TaskKind::Fidelity {
                target,
                steps: 0,
                lr: 0.1,
            },
            depth_penalty: 0.0,
            seed: 0,
            init_half_width: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth_penalty >= 0.0) {
            return Err(Error::Config(format!(
                "depth penalty {} must be >= 0",
                self.depth_penalty
            )));
        }
        match &self.kind {
            TaskKind::Fidelity { target, .. } if (target.norm_sqr() - 1.0).abs() > 1e-10 => {
                Err(Error::Config("fidelity target is not normalized".into()))
            }
            TaskKind::Supervised { data, .. } if data.is_empty() => {
                Err(Error::Empty("supervised task dataset".into()))
            }
            TaskKind::Rl {
                eval_episodes: 0, ..
            } => Err(Error::InvalidCount("eval_episodes must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// Task metric of a decoded circuit, before the depth penalty. `seed`
    /// drives parameter initialization and any training randomness.
    pub fn metric(&self, circuit: &Circuit, seed: u64) -> Result<f64> {
        let mut rng = rng_from_seed(seed);
        let theta = uniform_vec(&mut rng, circuit.n_params(), self.init_half_width);
        match &self.kind {
            TaskKind::Fidelity { target, steps, lr } => {
                if target.n_qubits() != circuit.n_qubits() {
                    return Err(Error::Shape(format!(
                        "target has {} qubits, circuit {}",
                        target.n_qubits(),
                        circuit.n_qubits()
                    )));
                }
                let fid = |s: &Statevector| vec![target.fidelity(s).unwrap_or(0.0)];
                let mut theta = theta;
                if circuit.n_params() > 0 {
                    let mut opt = Optimizer::adam(*lr, theta.len());
                    for _ in 0..*steps {
                        let j = circuit.shift_jacobian(None, &[], &theta, fid)?;
                        let grad: Vec<f64> = j.d_params.iter().map(|r| -r[0]).collect();
                        opt.step(&mut theta, &grad)?;
                    }
                }
                target.fidelity(&circuit.state(&[], &theta)?)
            }
            TaskKind::Supervised { data, epochs, lr } => {
                let mut model = VqcModel::new(circuit.clone(), theta)?;
                let mut opt = Optimizer::adam(*lr, model.theta.len());
                train_vqc(&mut model, data, *epochs, &mut opt)?;
                sign_accuracy(&model, data)
            }
            TaskKind::Rl {
                env,
                agent,
                episodes,
                eval_episodes,
            } => {
                let mut body = circuit.clone();
                if body.observables().len() != N_ACTIONS && body.n_qubits() >= N_ACTIONS {
                    body.set_observables(Observable::z_each(N_ACTIONS))?;
                }
                let model = VqcModel::new(body, theta)?;
                let mut agent = QAgent::from_model(env.n_states(), model, *agent)?;
                let mut env = env.clone();
                train_qrl(&mut env, &mut agent, *episodes, seed)?;
                agent.greedy_return(&env, *eval_episodes, &mut stream(seed, &[4]))
            }
        }
    }
}

/// Seed used to evaluate `genome`: a pure function of the task seed and
/// the genome, so cached, serial and parallel evaluations agree.
pub fn genome_seed(task_seed: u64, genome: &Genome) -> u64 {
    let path: Vec<u64> = genome.0.iter().map(|&g| g as u64).collect();
    derive_seed(task_seed, &path)
}

/// Task metric minus `depth_penalty` per non-empty block. Higher is better.
pub fn fitness(genome: &Genome, library: &BlockLibrary, task: &QasTask) -> Result<f64> {
    let circuit = library.decode(genome)?;
    let depth = library.depth(genome)?;
    let metric = task.metric(&circuit, genome_seed(task.seed, genome))?;
    Ok(metric - task.depth_penalty * depth as f64)
}

/// Bell state `(|00> + |11>)/sqrt 2`.
pub fn bell_target() -> Statevector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = num_complex::Complex64::new(0.0, 0.0);
    let a = num_complex::Complex64::new(h, 0.0);
    Statevector::from_amplitudes(vec![a, z, z, a]).expect("valid 2-qubit state")
}
