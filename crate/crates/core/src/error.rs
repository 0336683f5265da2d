use thiserror::Error;

/// Errors raised by the model. Every message starts with the module and
/// operation that produced it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("params::{op}: invalid parameters: {reason}")]
    InvalidParameters { op: &'static str, reason: String },

    #[error("params::reduce_couplings: {quantity} is undefined (zero denominator)")]
    UndefinedParameter { quantity: &'static str },

    #[error("params::fano_zero_preserved: condition undefined because {0} vanishes")]
    UndefinedCondition(&'static str),

    #[error(
        "dynamics::spectral_decompose: defective or near-degenerate spectrum of M, \
         closest eigenvalues {first:?} and {second:?}"
    )]
    DegenerateSpectrum { first: (f64, f64), second: (f64, f64) },

    #[error("dynamics::spectral_decompose: eigenvalue {0:?} of M has positive imaginary part")]
    GrowingMode((f64, f64)),

    #[error("dynamics::sylvester_kernel: resonance singularity at E_d = {e_d}")]
    ResonanceSingularity { e_d: f64 },

    #[error("dynamics::ionization_moment_matrix: non-decaying channel (vanishing denominator)")]
    NonDecayingChannel,

    #[error("field::subspace_weights: photon number {needed} exceeds truncation cap {cap}")]
    TruncationOverflow { needed: usize, cap: usize },

    #[error("field::{op}: invalid pump state: {reason}")]
    InvalidPump { op: &'static str, reason: String },

    #[error("observables::EnergyGrid: invalid grid: {0}")]
    InvalidGrid(String),

    #[error("entanglement::two_qubit_state: undefined state, normalization {0:e} too small")]
    UndefinedState(f64),

    #[error("{module}::{op}: {reason}")]
    InvalidInput { module: &'static str, op: &'static str, reason: String },

    #[error("oracle::{op}: {reason}")]
    Oracle { op: &'static str, reason: String },

    #[error("subspace n = {n}: {source}")]
    InSubspace {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_subspace(self, n: usize) -> Self {
        match self {
            e @ Error::InSubspace { .. } => e,
            e => Error::InSubspace { n, source: Box::new(e) },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
