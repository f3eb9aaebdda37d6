//! FDM G-code parsing, toolpath replay and metadata forensics.

mod forensics;
mod parse;
mod toolpath;

use thiserror::Error;

pub use forensics::{
    all_claims, audit, metadata_claims, FilamentClaim, ForensicsReport, Verdict, CLAIM_AGREEMENT,
    DEFAULT_MISMATCH_THRESHOLD,
};
pub use parse::{parse_gcode, Code, GcodeCommand, GcodeProgram};
pub use toolpath::{
    filament_length, replay, travel_length, z_profile, Move, PositionMode, ToolpathState, Units,
    ZProfile, Z_QUANTUM_MM,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcodeError {
    #[error("malformed number on line {0}")]
    MalformedNumber(usize),
    #[error("argument {letter} repeated on line {line}")]
    DuplicateArgument { line: usize, letter: char },
    #[error("conflicting filament claims: {first} mm vs {second} mm")]
    AmbiguousClaims { first: f64, second: f64 },
}

impl GcodeError {
    pub fn kind(&self) -> &'static str {
        match self {
            GcodeError::MalformedNumber(_) => "MalformedNumber",
            GcodeError::DuplicateArgument { .. } => "DuplicateArgument",
            GcodeError::AmbiguousClaims { .. } => "AmbiguousClaims",
        }
    }
}
