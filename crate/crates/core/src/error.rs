use thiserror::Error;

/// Errors raised by lattice, potential, charge and energy routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("potential is not summable over the lattice: {0}")]
    NotSummable(String),

    #[error("charge configuration is not neutral (net charge {0:e})")]
    NotNeutral(f64),

    #[error("period N = {period} cannot represent the theta minimizer (needs a multiple of {required})")]
    IncompatiblePeriod { period: usize, required: usize },

    #[error("theta minimizer is not representable with denominators up to {0}")]
    Unrepresentable(usize),

    #[error("lattice enumeration needs about {needed} points, above the cap of {cap}")]
    TooManyPoints { needed: f64, cap: usize },

    #[error("shift lies {0:e} from a dual lattice point")]
    NearDualPoint(f64),

    #[error("theta minimizers differ across alpha: {0}")]
    InconsistentMinimizers(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the inputs rather than by a numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::TooManyPoints { .. }
                | Error::Numerical(_)
                | Error::InconsistentMinimizers(_)
        )
    }
}

pub type Result<R, E = Error> = std::result::Result<R, E>;
