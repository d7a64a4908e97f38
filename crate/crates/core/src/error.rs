use thiserror::Error;

/// Errors surfaced by the solvers. Each variant maps to a stable class name
/// used in machine-readable error records.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step size underflow at t = {t:.6e} (h = {h:.6e}); parameters likely stiff or invalid")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("no sign change of the solution found before r_max = {r_max}")]
    NoFirstZero { r_max: f64 },

    /// The oscillation count at the bottom of the admissible search window is
    /// nonzero, i.e. an eigenvalue lies below the window. For Lane-Emden
    /// potentials this flags a violated lower bound rather than a search
    /// failure.
    #[error("eigenvalue detected below the search floor {floor} ({count_at_floor} zeros at the floor)")]
    BelowSearchFloor { floor: f64, count_at_floor: usize },

    #[error("spectrum cutoff {cutoff} is below the required level {required}; enumeration would undercount")]
    CutoffTooLow { cutoff: f64, required: f64 },

    #[error("invalid spectrum document: {0}")]
    SpectrumFormat(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no sign change of lambda_1 + first singular eigenvalue in the sampled exponent range ({n_samples} samples)")]
    ThresholdBracketNotFound {
        n_samples: usize,
        samples: Vec<(f64, f64)>,
    },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// Stable class name for machine-readable error records.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::StepSizeUnderflow { .. } => "step-size-underflow",
            Error::NoFirstZero { .. } => "no-first-zero",
            Error::BelowSearchFloor { .. } => "below-search-floor",
            Error::CutoffTooLow { .. } => "cutoff-too-low",
            Error::SpectrumFormat(_) => "spectrum-format",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::ThresholdBracketNotFound { .. } => "threshold-bracket-not-found",
            Error::Serialization(_) => "serialization",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
