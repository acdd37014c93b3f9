//! Error types shared by all modules of the crate.

use std::fmt;

/// Errors produced by evaluation, expansion and parsing routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (log of zero,
    /// Taylor series at |z| >= 1, and so on).
    Domain(String),
    /// Invalid parameter list (arity mismatch, lower parameter at a pole, ...).
    Parameter(String),
    /// The point lies in the unit-circle annulus where neither expansion
    /// converges fast enough to be trusted.
    Annulus(String),
    /// Gamma evaluated at a nonpositive integer `-n`.
    GammaPole { n: i64 },
    /// The coefficient recurrence hit a zero denominator at `z^{-index}`;
    /// the parameters carry an integer cross-group difference and must be
    /// normalized before expansion.
    Resonance { index: i64 },
    /// Generic connection coefficients requested for degenerate parameters.
    Degenerate(String),
    /// A degenerate configuration outside what contiguity normalization covers.
    UnsupportedDegeneracy(String),
    /// An internal consistency check failed (pole cancellation, precision
    /// shortfall); indicates a bug or insufficient working precision.
    Inconsistency(String),
    /// Input shape not supported by the requested algorithm.
    UnsupportedInput(String),
    /// Malformed textual input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Parameter(m) => write!(f, "parameter error: {m}"),
            Error::Annulus(m) => write!(f, "annulus error: {m}"),
            Error::GammaPole { n } => write!(f, "gamma pole at -{n}"),
            Error::Resonance { index } => {
                write!(f, "resonant recurrence at order {index}: integer cross-group difference")
            }
            Error::Degenerate(m) => write!(f, "degenerate parameters: {m}"),
            Error::UnsupportedDegeneracy(m) => write!(f, "unsupported degeneracy: {m}"),
            Error::Inconsistency(m) => write!(f, "internal consistency error: {m}"),
            Error::UnsupportedInput(m) => write!(f, "unsupported input: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
