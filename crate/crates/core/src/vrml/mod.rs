//! VRML97 tokenizer that keeps byte spans, plus the green-intensity digit
//! channel: frame bits are written as literal `0`/`1` fractional digits of
//! the green component of `Color` node entries.

mod channel;
mod token;

use thiserror::Error;

use crate::stego::StegoError;

pub use channel::{capacity_bytes, embed_green_digits, extract_green_digits, ChannelParams};
pub use token::{parse_vrml, Token, TokenKind, VrmlTokenStream, VrmlWarning};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VrmlError {
    #[error("missing '#VRML V2.0' header")]
    MissingHeader,
    #[error("unbalanced bracket at byte {0}")]
    UnbalancedBrackets(usize),
    #[error("unterminated string starting at byte {0}")]
    UnterminatedString(usize),
    #[error("malformed Color node near byte {offset}: {reason}")]
    MalformedColor { offset: usize, reason: &'static str },
    #[error("payload needs {needed} green slots but only {available} are available")]
    InsufficientSlots { needed: usize, available: usize },
    #[error("digits_per_value must be between 1 and 9, got {0}")]
    InvalidDigitsPerValue(usize),
    #[error(transparent)]
    Frame(#[from] StegoError),
}

impl VrmlError {
    pub fn kind(&self) -> &'static str {
        match self {
            VrmlError::MissingHeader => "MissingHeader",
            VrmlError::UnbalancedBrackets(_) => "UnbalancedBrackets",
            VrmlError::UnterminatedString(_) => "UnterminatedString",
            VrmlError::MalformedColor { .. } => "MalformedColor",
            VrmlError::InsufficientSlots { .. } => "InsufficientSlots",
            VrmlError::InvalidDigitsPerValue(_) => "InvalidDigitsPerValue",
            VrmlError::Frame(e) => e.kind(),
        }
    }
}
