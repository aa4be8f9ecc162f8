use std::io;

use thiserror::Error;

/// Errors raised across the synthesis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary: ||U^dagger U - I||_F = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("2x2 payload is not special unitary (det = {det_re:.6}{det_im:+.6}i)")]
    NotSpecialUnitary { det_re: f64, det_im: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} = {value} is out of range (allowed {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("{n} qubits exceeds the dense-matrix capacity of {max} qubits")]
    Capacity { n: usize, max: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("circuit document: {0}")]
    Schema(String),

    #[error("gate {index} cannot be exported: {reason}")]
    UnsupportedGate { index: usize, reason: String },

    #[error("residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
