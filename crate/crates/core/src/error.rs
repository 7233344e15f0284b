use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
///
/// Variants are grouped by how a caller should react: configuration and
/// data problems are user-fixable, numeric failures carry the solver state
/// that was reached.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is missing or out of range.
    Config(String),
    /// Input data violates a structural precondition.
    Data(String),
    /// Not enough samples or beats for an estimator.
    InsufficientData { what: &'static str, needed: usize, got: usize },
    /// The ECG does not contain enough detectable QRS complexes.
    SignalQuality(String),
    /// A statistic is undefined because the signal is constant or empty.
    DegenerateSignal(&'static str),
    /// The requested analysis window is longer than the available segment.
    Window { needed: f64, available: f64 },
    /// An iterative solver did not reach its tolerance.
    Numeric { what: &'static str, residual: f64 },
    /// The fixed-effect design is rank deficient.
    Rank(String),
    /// A caller broke a documented contract (e.g. asymmetric correlation).
    Contract(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Data(m) => write!(f, "data error: {m}"),
            Error::InsufficientData { what, needed, got } => {
                write!(f, "insufficient data for {what}: need {needed}, got {got}")
            }
            Error::SignalQuality(m) => write!(f, "signal quality error: {m}"),
            Error::DegenerateSignal(m) => write!(f, "degenerate signal: {m}"),
            Error::Window { needed, available } => {
                write!(f, "window error: requested {needed:.3} s but only {available:.3} s available")
            }
            Error::Numeric { what, residual } => {
                write!(f, "numeric error in {what}: final residual {residual:.3e}")
            }
            Error::Rank(m) => write!(f, "rank error: {m}"),
            Error::Contract(m) => write!(f, "contract violation: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Non-fatal condition recorded while computing a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub source: String,
    pub message: String,
}

impl Warning {
    pub fn new(source: impl Into<String>, message: impl Into<String>) -> Self {
        Warning { source: source.into(), message: message.into() }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.source, self.message)
    }
}
