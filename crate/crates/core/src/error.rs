use thiserror::Error;

/// Errors raised by the simulator, circuit IR, models and search engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid qubit count {n} (allowed 1..={max})")]
    InvalidSize { n: usize, max: usize },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("encoding capacity exceeded: {input_dim} inputs on {n_qubits} qubits")]
    EncodingCapacity { input_dim: usize, n_qubits: usize },

    #[error("binding error: {0}")]
    Binding(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{what}: expected length {want}, got {got}"
        )))
    }
}
