use thiserror::Error;

/// Everything that can go wrong across the toolkit.
///
/// Text-format problems carry a position; numerical failures carry the
/// offending magnitude so callers can report how far off the input was.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {index} appears twice in one gate")]
    DuplicateQubit { index: usize },

    #[error("{what} on {needed} qubits exceeds the dense limit of {limit}")]
    DenseLimit {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("qubit counts differ: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {msg}")]
    Dimension { msg: String },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("iterative norm estimate did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("thresholds must satisfy 0 <= mu < delta <= 2 (got delta = {delta}, mu = {mu})")]
    BadThresholds { delta: f64, mu: f64 },

    #[error(
        "membership circuit is not a clean subspace test: \
         membership operator has eigenvalue {value} strictly between 0 and 1"
    )]
    DirtyMembership { value: f64 },

    #[error("subspace is not invariant under the compared operator (leakage norm {leakage:.3e})")]
    SubspaceNotInvariant { leakage: f64 },

    #[error("subspace is trivial: no basis vector passes the membership test")]
    TrivialSubspace,

    #[error("all eigenphases coincide; no separating witness pair exists")]
    DegenerateSpectrum,

    #[error("invalid parameter: {msg}")]
    InvalidParameter { msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter { msg: msg.into() }
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension { msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
