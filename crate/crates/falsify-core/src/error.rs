use thiserror::Error;

/// Errors shared across the measure computations.
///
/// Everything here is a caller-facing condition: bad instance data, a
/// breached exact-computation ceiling, or a quantity the definitions leave
/// undefined (zero-mass conditioning, log of a non-positive value).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Exact enumeration would blow past a hard ceiling. The ceilings exist
    /// so a mistyped parameter fails fast instead of running for hours.
    #[error("{what}: requested {requested} exceeds exact-computation ceiling {limit}")]
    Capacity {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("logarithm undefined for non-positive argument")]
    LogDomain,

    #[error("kl divergence infinite: p has mass on an atom where q has none")]
    DivergenceInfinite,

    #[error("posterior undefined: conditioning output has zero induced probability")]
    UndefinedPosterior,

    #[error("information gain undefined: output outside the induced support")]
    UndefinedGain,

    #[error("zero prior mass: {0}")]
    ZeroPrior(String),
}

pub type Result<T> = std::result::Result<T, Error>;
