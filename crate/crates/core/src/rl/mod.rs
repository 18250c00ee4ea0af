//! Deep-Q learning with a variational Q-function on a Frozen-Lake grid.

pub mod agent;
pub mod env;

pub use agent::{
    encode_discrete_state, epsilon_greedy, train_qrl, AgentConfig, EpisodeLog, QAgent,
    ReplayBuffer, Transition,
};
pub use env::{Action, GridEnv, StepOutcome};
