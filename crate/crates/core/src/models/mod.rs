//! Variational model family built on [`crate::circuit`].

pub mod qfwp;
pub mod qlstm;
pub mod qt;
pub mod reservoir;
pub mod vqc;

pub use qfwp::QfwpModel;
pub use qlstm::{Qlstm, QlstmRegressor, QlstmShape, QlstmState};
pub use qt::QtCompressor;
pub use reservoir::QlstmReservoir;
pub use vqc::VqcModel;
