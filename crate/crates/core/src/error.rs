use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("Bloch vector length {0} exceeds 1/2")]
    BlochOutOfBall(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("state is not pure (|w| = {0})")]
    NotPure(f64),

    #[error("swap angle {0} is outside the canonical range [0, pi/2] modulo pi")]
    AngleOutOfRange(f64),

    #[error("delta {0} must lie in (0, 2)")]
    DeltaOutOfRange(f64),

    #[error("reservoir index {index} out of range 1..={n}")]
    ReservoirIndex { index: usize, n: usize },

    #[error("reservoir qubit {0} has already interacted with the system")]
    AlreadyCollided(usize),

    #[error("{0} qubits exceed the simulator cap of {1}")]
    TooManyQubits(usize, usize),

    #[error("state has weight outside the single-excitation sector ({0:e})")]
    OutsideExcitationSector(f64),

    #[error("order is not a permutation of the remaining qubits: {0}")]
    NotPermutation(String),

    #[error("closed forms require system |1> and reservoir |0>")]
    OutsideClosedFormRegime,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
