//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state-vector operations, the protocol layer, and the
/// estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::statevec::MAX_QUBITS)]
    UnsupportedQubitCount(usize),
    #[error("qubit index {index} out of range for a {qubit_count}-qubit state (indices are 1-based)")]
    QubitIndexOutOfRange { index: usize, qubit_count: usize },
    #[error("two-qubit operation needs distinct qubits, got {0} twice")]
    DuplicateQubit(usize),
    #[error("bit string {bits:?} is not a {qubit_count}-character string of 0s and 1s")]
    InvalidBitString { bits: String, qubit_count: usize },
    #[error("amplitude vector has length {got}, expected {expected}")]
    InvalidAmplitudeCount { got: usize, expected: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("amplitudes must be finite")]
    NonFiniteAmplitude,
    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("qubit counts differ: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("{angles} angles but {signs} outcome signs")]
    AngleSignMismatch { angles: usize, signs: usize },
    #[error("angle count {angles} does not match intermediate-party count {n}")]
    AngleCountMismatch { angles: usize, n: usize },
    #[error("angles must be finite")]
    NonFiniteAngle,
    #[error("tan(theta_{0}) is undefined or the tangent product overflows")]
    TanPole(usize),
    #[error("unitary parameter u={0} outside [0, 1]; reduce u > 1 by swapping computational labels first")]
    UnitaryParameterOutOfRange(f64),
    #[error("branch coefficients are not normalized (alpha^2 + beta^2 = {0})")]
    BranchNotNormalized(f64),
    #[error("sign history has probability zero; conditioning on it is undefined")]
    ZeroProbabilityBranch,
    #[error("exact branch enumeration supports at most N = {max}, got N = {n}")]
    EnumerationTooLarge { n: usize, max: usize },
    #[error("state has {0} qubits, expected exactly 2")]
    NotTwoQubits(usize),
    #[error("invalid conditional distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("no trial accepted under all-plus conditioning after {attempts} attempts per trial")]
    NoAcceptedTrials { attempts: usize },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
