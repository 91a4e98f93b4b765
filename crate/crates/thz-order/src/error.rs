//! Error type shared by every module in the crate.
//!
//! Variants are grouped by failure class rather than by module: configuration
//! problems (bad orders, durations, geometries), data problems (absorption CSV
//! parsing), range problems (frequency outside the tabulated band) and
//! numerical degeneracies (all-zero PSD, non-Hermitian covariance input).
//! The CLI maps each class to a stable single-line prefix, so the categories
//! here are part of the tool's machine-readable surface.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter combination that can never produce a meaningful run:
    /// zero orders, non-positive frequency, too-short snapshot, element
    /// spacing that aliases, and so on.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A frequency fell outside the sampled absorption table. The table is
    /// never extrapolated; callers must supply coverage for the whole band
    /// they integrate over (including half a bin beyond each edge when noise
    /// variances are requested).
    #[error(
        "frequency {frequency_hz:.6e} Hz outside absorption table range \
         [{min_hz:.6e}, {max_hz:.6e}] Hz"
    )]
    AbsorptionRange {
        frequency_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },

    /// Malformed absorption CSV input; `line` is 1-based and counts every
    /// line of the file including comments and the optional header.
    #[error("absorption CSV, line {line}: {message}")]
    CsvParse { line: usize, message: String },

    /// Numerically degenerate input where an estimator has no answer,
    /// e.g. an all-zero PSD handed to the RMS-spread estimator.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A covariance matrix that is not Hermitian within tolerance was passed
    /// to the subspace decomposition.
    #[error("covariance matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable category tag, used by the CLI error prefix.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::AbsorptionRange { .. } => "range",
            Error::CsvParse { .. } => "parse",
            Error::Degenerate(_) => "degenerate",
            Error::NotHermitian { .. } => "numeric",
            Error::Io(_) => "io",
        }
    }
}
