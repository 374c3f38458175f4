use std::fmt;

use thiserror::Error;

use crate::basis::BasisKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node solver did not converge for {kind} basis with M={m} (last Newton step {last_step:e})")]
    NodeSolver {
        kind: BasisKind,
        m: usize,
        last_step: f64,
    },

    #[error("index {index} out of range for basis of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: String, got: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("zero initial energy, relative drift undefined")]
    ZeroInitialEnergy,

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Instability(#[from] InstabilityReport),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Structured report emitted when the coefficient matrix leaves the
/// finite range or exceeds the blow-up threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityReport {
    pub step: usize,
    pub t: f64,
    pub max_abs_coeff: f64,
    pub basis: BasisKind,
}

impl fmt::Display for InstabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instability at step {} (t={}): max |c| = {:e}, basis = {}",
            self.step, self.t, self.max_abs_coeff, self.basis
        )
    }
}

impl std::error::Error for InstabilityReport {}
