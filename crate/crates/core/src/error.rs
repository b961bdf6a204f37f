use thiserror::Error;

/// Errors produced while building operators, solving for states, or running sweeps.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid atomic level label `{0}` (expected `g` or `e`)")]
    InvalidLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the Bogoliubov frame requires zero detunings and zero squeezing phase ({0})")]
    UnsupportedFrame(String),

    #[error("steady state is not unique or the linear solve failed: {0}")]
    NonUniqueSteadyState(String),

    #[error(
        "Fock cutoff {cutoff} too small: tail mass {tail_mass:.3e} exceeds {epsilon:.1e}; \
         try a cutoff of at least {suggested}"
    )]
    CutoffTooSmall {
        cutoff: usize,
        tail_mass: f64,
        epsilon: f64,
        suggested: usize,
    },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("integration diverged at t = {0}")]
    Divergence(f64),

    #[error("corrupted state: {0}")]
    CorruptedState(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("at r = {r}: {source}")]
    AtPoint {
        r: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// The innermost error, looking through sweep-point wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code: 2 configuration, 3 solver, 4 truncation.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::Io(_) | Error::InvalidParameter(_) | Error::UnsupportedFrame(_) => 2,
            Error::CutoffTooSmall { .. } => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
