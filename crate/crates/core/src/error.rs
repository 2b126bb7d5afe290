use thiserror::Error;

use crate::holonomy::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ||H - H^dagger||_F = {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary: ||U^dagger U - I||_F = {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("matrix is rank deficient: smallest singular value {smallest:.3e}")]
    RankDeficient { smallest: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("Gell-Mann index {0} is not available (only 1, 2, 4, 6, 7)")]
    UnsupportedGellMann(u8),

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("site {0} is auxiliary (even) and cannot be driven")]
    AuxiliarySite(usize),

    #[error("qubit {qubit} out of range 1..={n_logical}")]
    QubitOutOfRange { qubit: usize, n_logical: usize },

    #[error("qubit pair {pair} out of range 1..={max}")]
    PairOutOfRange { pair: usize, max: usize },

    #[error("chain needs at least one logical qubit")]
    EmptyChain,

    #[error("operator of dimension {0} does not act on a whole number of qutrits")]
    NotQutritOperator(usize),

    #[error("expected {expected} logical bits, got {actual}")]
    BitCount { expected: usize, actual: usize },

    #[error("logical bit must be 0 or 1, got {0}")]
    InvalidBit(u8),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("frame is not orthonormal: ||Z^dagger Z - I||_F = {defect:.3e}")]
    FrameNotOrthonormal { defect: f64 },

    #[error("subspace path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("path is not cyclic: ||P(tau) - P(0)||_F = {residual:.3e}")]
    NotCyclic { residual: f64 },

    #[error("vector is not unit length: norm {norm}")]
    NotUnitVector { norm: f64 },

    #[error("rotation axis is zero")]
    ZeroAxis,

    #[error("gate {index}: {reason}")]
    InvalidGate { index: usize, reason: String },

    #[error("holonomy certification failed: {}", list(violations))]
    NotHolonomic { violations: Vec<Violation> },
}

fn list(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
