use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit index {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length {0} is not a positive power of two")]
    NotPowerOfTwo(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("impossible branch: outcome probability {probability:e} is below threshold")]
    ImpossibleBranch { probability: f64 },

    #[error("qubit {qubit} is entangled with the rest of the register (residual {residual:e})")]
    NotProductState { qubit: usize, residual: f64 },

    #[error("identical states (theta = 0): formula degenerates")]
    IdenticalStates,

    #[error("invalid cloning problem: {0}")]
    InvalidProblem(String),

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("not a separation: output overlap {overlap_out} exceeds input overlap {overlap_in}")]
    NotASeparation { overlap_in: f64, overlap_out: f64 },

    #[error("degenerate subspace: sin(2 theta_N) = {0:e}")]
    DegenerateSubspace(f64),

    #[error("non-unitary request: input overlap {input} vs output overlap {output}")]
    NonUnitaryRequest { input: f64, output: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("hybrid cloning requires equal priors, got eta_plus = {0}")]
    UnequalPriors(f64),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
}

pub type Result<T> = std::result::Result<T, Error>;
