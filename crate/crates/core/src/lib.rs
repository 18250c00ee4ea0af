//! Hybrid quantum-classical machine learning on an exact statevector
//! simulator: variational circuits with parameter-shift gradients, recurrent
//! and weight-generating quantum models, deep-Q agents, federated averaging
//! and three architecture-search engines.

pub mod autodiff;
pub mod circuit;
pub mod data;
pub mod error;
pub mod federated;
pub mod models;
pub mod nn;
pub mod par;
pub mod qas;
pub mod rl;
pub mod rng;
pub mod sim;

pub use circuit::{build_layered, Angle, Circuit, Encoding, Entangler, GateKind, Jacobian, Op};
pub use error::{Error, Result};
pub use sim::{Gate, Observable, Pauli, PauliFactor, Statevector};
