use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("layout has no atoms")]
    EmptyLayout,

    #[error("atom {0} has no connection points")]
    AtomWithoutPoints(usize),

    #[error("duplicate atom id {0}")]
    DuplicateAtomId(usize),

    #[error("connection point tagged with atom {found} listed under atom {owner}")]
    AtomIdMismatch { owner: usize, found: usize },

    #[error("connection point phase {0} is negative or not finite")]
    InvalidPhase(f64),

    #[error("connection point decay rate {0} is negative or not finite")]
    InvalidDecayRate(f64),

    #[error("connection points coincide at phase {0}")]
    CoincidentPoints(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{atoms} atoms exceed the limit of {max} for this path")]
    TooManyAtoms { atoms: usize, max: usize },

    #[error("operator dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("decay matrix is not positive semidefinite (min eigenvalue {0:e})")]
    UnphysicalDecay(f64),

    #[error("Hamiltonian residue {0:e} exceeds tolerance")]
    NonHermitian(f64),

    #[error("expected a two-qubit state, got dimension {0}")]
    NotTwoQubit(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures raised by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure(_) | Error::NonHermitian(_) | Error::UnphysicalDecay(_)
        )
    }
}
