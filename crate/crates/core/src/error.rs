//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors produced by the simulator and the PUF pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An address component is outside the bank geometry.
    OutOfBounds {
        field: &'static str,
        value: usize,
        limit: usize,
    },
    /// Invalid configuration (geometry, profile, budget, parameters).
    Config(String),
    /// An operation precondition was violated by the caller.
    Precondition(String),
    /// A campaign grid is missing (pattern, repeat) frames.
    IncompleteCampaign { missing: Vec<(u8, usize)> },
    /// The campaign patterns never write both a 0 and a 1 to some bit position.
    ClassificationCoverage { bit_position: usize },
    /// The requested row is not part of the qualified set.
    NotQualified { row: usize },
    /// A row holds fewer golden cells than the requested key length.
    ShortRow {
        row: usize,
        available: usize,
        requested: usize,
    },
    /// Two artifacts that must describe the same bank disagree.
    Consistency(String),
    /// Not enough data to compute the requested statistic.
    InsufficientData(String),
    /// A calibration target cannot be reached under the model.
    Calibration(String),
    /// Two bit strings that must have equal length do not.
    LengthMismatch { left: usize, right: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfBounds { field, value, limit } => {
                write!(f, "{field} index {value} out of bounds (limit {limit})")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::IncompleteCampaign { missing } => {
                write!(f, "incomplete campaign, missing (pattern, repeat) frames:")?;
                for (pattern, repeat) in missing {
                    write!(f, " (0x{pattern:02X}, {repeat})")?;
                }
                Ok(())
            }
            Error::ClassificationCoverage { bit_position } => write!(
                f,
                "campaign patterns never write both 0 and 1 at bit position {bit_position}"
            ),
            Error::NotQualified { row } => write!(f, "row {row} is not a qualified row"),
            Error::ShortRow {
                row,
                available,
                requested,
            } => write!(
                f,
                "row {row} holds {available} golden cells, {requested} requested"
            ),
            Error::Consistency(msg) => write!(f, "consistency error: {msg}"),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::Calibration(msg) => write!(f, "calibration error: {msg}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "bit string length mismatch: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for Error {}
