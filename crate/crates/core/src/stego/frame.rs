//! Self-delimiting payload frame shared by every covert channel.
//!
//! Layout (big-endian):
//!
//! | field   | size | value                                   |
//! |---------|------|-----------------------------------------|
//! | magic   | 4    | `48 33 44 31` (`"H3D1"`)                |
//! | version | 1    | `1`                                     |
//! | length  | 2    | payload byte count                      |
//! | payload | n    |                                         |
//! | crc     | 4    | CRC-32 (IEEE) of version, length, payload |

use super::StegoError;

pub const MAGIC: [u8; 4] = [0x48, 0x33, 0x44, 0x31];
pub const VERSION: u8 = 1;
/// Bytes a frame adds around its payload.
pub const FRAME_OVERHEAD: usize = 11;
pub const MAX_PAYLOAD: usize = u16::MAX as usize;

pub fn frame_bytes(payload: &[u8]) -> Result<Vec<u8>, StegoError> {
    if payload.len() > MAX_PAYLOAD {
        return Err(StegoError::PayloadTooLarge {
            len: payload.len(),
            max: MAX_PAYLOAD,
        });
    }
    let mut out = Vec::with_capacity(FRAME_OVERHEAD + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(payload.len() as u16).to_be_bytes());
    out.extend_from_slice(payload);
    let crc = crc32fast::hash(&out[4..]);
    out.extend_from_slice(&crc.to_be_bytes());
    Ok(out)
}

/// Frames `payload` and expands it MSB-first into bits.
pub fn frame_payload(payload: &[u8]) -> Result<Vec<bool>, StegoError> {
    Ok(bytes_to_bits(&frame_bytes(payload)?))
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |k| (b >> k) & 1 == 1))
        .collect()
}

/// Packs bits MSB-first; a trailing partial byte is dropped.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks_exact(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect()
}

/// Locates and validates a frame anywhere in `bits`.
///
/// Every bit offset is tried in increasing order. The first candidate whose
/// magic matches and whose version, length and CRC all check out wins. When
/// magic is found but no candidate validates, the failure of the first
/// candidate is reported.
pub fn unframe_payload(bits: &[bool]) -> Result<Vec<u8>, StegoError> {
    let mut first_failure = None;
    let magic_bits = bytes_to_bits(&MAGIC);
    let header_bits = 8 * 7;
    for start in 0..bits.len().saturating_sub(header_bits - 1) {
        if bits[start..start + 32] != magic_bits[..] {
            continue;
        }
        match decode_at(&bits[start..]) {
            Ok(payload) => return Ok(payload),
            Err(e) => {
                first_failure.get_or_insert(e);
            }
        }
    }
    Err(first_failure.unwrap_or(StegoError::NoFrameFound))
}

/// Byte-oriented convenience over [`unframe_payload`].
pub fn unframe_bytes(bytes: &[u8]) -> Result<Vec<u8>, StegoError> {
    unframe_payload(&bytes_to_bits(bytes))
}

fn decode_at(bits: &[bool]) -> Result<Vec<u8>, StegoError> {
    let head = bits_to_bytes(&bits[..56]);
    if head[4] != VERSION {
        return Err(StegoError::UnsupportedVersion(head[4]));
    }
    let len = u16::from_be_bytes([head[5], head[6]]) as usize;
    let total = 8 * (FRAME_OVERHEAD + len);
    if bits.len() < total {
        return Err(StegoError::TruncatedFrame {
            needed: FRAME_OVERHEAD + len,
            available: bits.len() / 8,
        });
    }
    let frame = bits_to_bytes(&bits[..total]);
    let body = &frame[4..7 + len];
    let stored = u32::from_be_bytes(frame[7 + len..].try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(StegoError::CrcMismatch);
    }
    Ok(frame[7..7 + len].to_vec())
}
