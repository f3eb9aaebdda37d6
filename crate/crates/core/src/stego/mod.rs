//! Payload framing plus the two non-geometric channels: the binary STL
//! header and Morse-coded sketch segments.

pub mod frame;
pub mod header;
pub mod morse;

use thiserror::Error;

pub use frame::{
    frame_bytes, frame_payload, unframe_bytes, unframe_payload, FRAME_OVERHEAD, MAX_PAYLOAD,
};
pub use header::{embed_stl_header, extract_stl_header, MAX_HEADER_MESSAGE};
pub use morse::{
    segments_from_json, segments_to_json, segments_to_text, text_to_segments, MorseParams,
    SketchSegment,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StegoError {
    #[error("payload of {len} bytes exceeds the {max}-byte frame limit")]
    PayloadTooLarge { len: usize, max: usize },
    #[error("no payload frame found")]
    NoFrameFound,
    #[error("payload frame failed its CRC check")]
    CrcMismatch,
    #[error("unsupported frame version {0}")]
    UnsupportedVersion(u8),
    #[error("frame needs {needed} bytes but only {available} are present")]
    TruncatedFrame { needed: usize, available: usize },
    #[error("message of {len} bytes does not fit the STL header (max {max})")]
    MessageTooLong { len: usize, max: usize },
    #[error("character {0:?} has no Morse code")]
    UnsupportedCharacter(char),
    #[error("unknown Morse sequence {sequence:?} at segment {position}")]
    UnknownMorseSequence { position: usize, sequence: String },
    #[error("sketch segments are not sorted by x (segment {0})")]
    UnsortedSegments(usize),
    #[error("invalid sketch segment {index}: {reason}")]
    InvalidSegment { index: usize, reason: &'static str },
    #[error("invalid Morse unit {0}")]
    InvalidUnit(f64),
    #[error("malformed segment JSON: {0}")]
    Json(String),
}

impl StegoError {
    pub fn kind(&self) -> &'static str {
        match self {
            StegoError::PayloadTooLarge { .. } => "PayloadTooLarge",
            StegoError::NoFrameFound => "NoFrameFound",
            StegoError::CrcMismatch => "CrcMismatch",
            StegoError::UnsupportedVersion(_) => "UnsupportedVersion",
            StegoError::TruncatedFrame { .. } => "TruncatedFrame",
            StegoError::MessageTooLong { .. } => "MessageTooLong",
            StegoError::UnsupportedCharacter(_) => "UnsupportedCharacter",
            StegoError::UnknownMorseSequence { .. } => "UnknownMorseSequence",
            StegoError::UnsortedSegments(_) => "UnsortedSegments",
            StegoError::InvalidSegment { .. } => "InvalidSegment",
            StegoError::InvalidUnit(_) => "InvalidUnit",
            StegoError::Json(_) => "Json",
        }
    }
}
