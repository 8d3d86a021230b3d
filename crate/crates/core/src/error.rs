//! Crate-wide error type.
//!
//! Variants are grouped by what the caller can do about them: bad
//! configuration or parameters, bad input data, numerical/domain failures,
//! and I/O or format problems. [`Error::code`] exposes a stable
//! machine-readable tag for manifests and CLI exit-code mapping.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter value violates its documented domain (e.g. `scale <= 0`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data is malformed or insufficient for the requested operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The data admits no meaningful fit (e.g. all exceedances identical).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// The automatic threshold policy rejected every candidate.
    #[error("no threshold satisfies the selection policy: {0}")]
    ThresholdSelection(String),

    /// The requested tail quantile cannot be produced by the parameters.
    #[error("quantile unreachable: {0}")]
    QuantileUnreachable(String),

    /// The rate formula's log argument is non-positive.
    #[error("rate undefined: {0}")]
    RateUndefined(String),

    /// A synthetic channel specification is internally inconsistent.
    #[error("channel spec error: {0}")]
    ChannelSpec(String),

    /// A text input failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A persisted file declares a format version this build cannot read.
    #[error("unsupported format version {found} (supported: {supported})")]
    Version { found: u32, supported: u32 },

    /// An experiment configuration is invalid or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Wraps an error with the pipeline stage that raised it.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable machine-readable tag for this error category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::InvalidInput(_) => "invalid_input",
            Error::Degenerate(_) => "degenerate",
            Error::ThresholdSelection(_) => "threshold_selection",
            Error::QuantileUnreachable(_) => "quantile_unreachable",
            Error::RateUndefined(_) => "rate_undefined",
            Error::ChannelSpec(_) => "channel_spec",
            Error::Parse { .. } => "parse",
            Error::Version { .. } => "version",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Stage { source, .. } => source.code(),
        }
    }

    /// Tags an error with the experiment stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
