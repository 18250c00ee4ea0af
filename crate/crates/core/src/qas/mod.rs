//! Quantum architecture search: evolutionary search over block genomes,
//! tabular-Q circuit construction, and a differentiable softmax ensemble.

pub mod builder;
pub mod diff;
pub mod evolve;
pub mod library;
pub mod task;

pub use builder::{
    bell_actions, qas_env_step, qas_rl_train, BuilderAgentConfig, BuilderEnv, BuilderResult,
    BuilderStep,
};
pub use diff::{
    diffqas_forward, diffqas_train, diffqas_train_from, ensemble_loss_grad, softmax, DiffQasConfig,
    DiffQasResult,
};
pub use evolve::{brute_force, evolve, point_mutation, EvoConfig, EvoResult, GenerationLog};
pub use library::{bell_library, Block, BlockLibrary, BlockRole, Genome};
pub use task::{bell_target, fitness, QasTask, TaskKind};
