use thiserror::Error;

use crate::machines::ConsistencyReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("subsystem `{label}` has dimension {dim}; at least 2 required")]
    InvalidDimension { label: String, dim: usize },

    #[error("empty label selection")]
    EmptySelection,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("signature mismatch: {left} vs {right}")]
    SignatureMismatch { left: String, right: String },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("angle `{name}` = {value} outside [{lo}, {hi}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("overlap modulus {modulus} exceeds 1")]
    OverlapOutOfRange { modulus: f64 },

    #[error("state family is empty")]
    EmptyFamily,

    #[error("family is not orthonormal (Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("Gram matrices differ (max deviation {:e})", .0.max_deviation)]
    InconsistentGram(Box<ConsistencyReport<f64>>),

    #[error("declared input {index} is linearly dependent on earlier inputs but its output deviates by {deviation:e}")]
    DependentInputsConflict { index: usize, deviation: f64 },

    #[error("expansion element {index} is not among the declared machine inputs")]
    ExpansionNotCovered { index: usize },

    #[error("Gram matrices of the two families differ (max deviation {max_deviation:e})")]
    GramMismatch { max_deviation: f64 },

    #[error("output dimension {output} is smaller than input dimension {input}")]
    DimensionIncompatible { input: usize, output: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("machine declares no pairs")]
    EmptyMachine,
}
