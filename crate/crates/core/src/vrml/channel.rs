use crate::stego::{frame_payload, unframe_payload, StegoError, FRAME_OVERHEAD, MAX_PAYLOAD};

use super::token::{parse_vrml, VrmlTokenStream};
use super::VrmlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelParams {
    pub start_slot: usize,
    pub digits_per_value: usize,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            start_slot: 0,
            digits_per_value: 6,
        }
    }
}

impl ChannelParams {
    pub fn new(start_slot: usize, digits_per_value: usize) -> Result<Self, VrmlError> {
        let p = ChannelParams {
            start_slot,
            digits_per_value,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), VrmlError> {
        if (1..=9).contains(&self.digits_per_value) {
            Ok(())
        } else {
            Err(VrmlError::InvalidDigitsPerValue(self.digits_per_value))
        }
    }
}

fn available_slots(stream: &VrmlTokenStream, params: ChannelParams) -> usize {
    stream
        .color_green_slots
        .len()
        .saturating_sub(params.start_slot)
}

/// Largest payload, in bytes, that fits in the stream's green slots.
pub fn capacity_bytes(stream: &VrmlTokenStream, params: ChannelParams) -> Result<usize, VrmlError> {
    params.validate()?;
    let bits = available_slots(stream, params) * params.digits_per_value;
    Ok((bits.saturating_sub(FRAME_OVERHEAD * 8) / 8).min(MAX_PAYLOAD))
}

/// Writes the framed payload into consecutive green tokens as `0.<digits>`.
/// Bytes outside the rewritten tokens are copied unchanged.
pub fn embed_green_digits(
    stream: &VrmlTokenStream,
    payload: &[u8],
    params: ChannelParams,
) -> Result<String, VrmlError> {
    params.validate()?;
    let bits = frame_payload(payload)?;
    let needed = bits.len().div_ceil(params.digits_per_value);
    let available = available_slots(stream, params);
    if needed > available {
        return Err(VrmlError::InsufficientSlots { needed, available });
    }
    let replacements: Vec<(usize, String)> = bits
        .chunks(params.digits_per_value)
        .zip(&stream.color_green_slots[params.start_slot..])
        .map(|(group, &token)| {
            let mut text = String::with_capacity(2 + params.digits_per_value);
            text.push_str("0.");
            text.extend(group.iter().map(|&b| if b { '1' } else { '0' }));
            while text.len() < 2 + params.digits_per_value {
                text.push('0');
            }
            (token, text)
        })
        .collect();
    Ok(stream.emit_with(&replacements))
}

/// Digits of a channel token: an optional `0` integer part followed by
/// exactly `n` fractional digits, all `0` or `1`.
fn channel_digits(token: &str, n: usize) -> Option<&str> {
    let frac = token
        .strip_prefix("0.")
        .or_else(|| token.strip_prefix('.'))?;
    (frac.len() == n && frac.bytes().all(|b| b == b'0' || b == b'1')).then_some(frac)
}

/// Reads green digits from `start_slot` until the first token that is not a
/// channel token, then unframes the collected bits.
pub fn extract_green_digits(text: &str, params: ChannelParams) -> Result<Vec<u8>, VrmlError> {
    params.validate()?;
    let stream = parse_vrml(text)?;
    let mut bits = Vec::new();
    for &slot in stream.color_green_slots.iter().skip(params.start_slot) {
        let Some(digits) = channel_digits(stream.token_text(slot), params.digits_per_value) else {
            break;
        };
        bits.extend(digits.bytes().map(|b| b == b'1'));
    }
    if bits.is_empty() {
        return Err(StegoError::NoFrameFound.into());
    }
    Ok(unframe_payload(&bits)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene(triples: usize) -> String {
        let mut s = String::from("#VRML V2.0 utf8\n# part\nShape {\n  geometry IndexedFaceSet {\n    colorPerVertex FALSE\n    color Color {\n      color [\n");
        for i in 0..triples {
            let g = (i % 7) as f64 / 7.0;
            s.push_str(&format!("        0.8 {g:.4} 0.25,\n"));
        }
        s.push_str("      ]\n    }\n  }\n}\n");
        s
    }

    #[test]
    fn first_group_maps_directly() {
        // the frame starts with 'H' = 0b01001000
        let stream = parse_vrml(&scene(40)).unwrap();
        let p = ChannelParams::new(0, 3).unwrap();
        let out = embed_green_digits(&stream, b"", p).unwrap();
        let s2 = parse_vrml(&out).unwrap();
        assert_eq!(s2.token_text(s2.color_green_slots[0]), "0.010");
        assert_eq!(s2.token_text(s2.color_green_slots[1]), "0.010");
    }

    #[test]
    fn round_trip() {
        let stream = parse_vrml(&scene(40)).unwrap();
        let p = ChannelParams::default();
        let out = embed_green_digits(&stream, b"128.2 MPa", p).unwrap();
        assert_eq!(extract_green_digits(&out, p).unwrap(), b"128.2 MPa");
    }

    #[test]
    fn pristine_file_has_no_frame() {
        let err = extract_green_digits(&scene(40), ChannelParams::default()).unwrap_err();
        assert_eq!(err.kind(), "NoFrameFound");
    }

    #[test]
    fn flipped_digit_fails_crc() {
        let stream = parse_vrml(&scene(40)).unwrap();
        let p = ChannelParams::default();
        let out = embed_green_digits(&stream, b"128.2 MPa", p).unwrap();
        let s2 = parse_vrml(&out).unwrap();
        // slot 12 carries bits 72..78, inside the payload
        let span = s2.tokens[s2.color_green_slots[12]].span.clone();
        let mut bytes = out.into_bytes();
        let i = span.start + 2;
        bytes[i] = if bytes[i] == b'0' { b'1' } else { b'0' };
        let err = extract_green_digits(&String::from_utf8(bytes).unwrap(), p).unwrap_err();
        assert_eq!(err, VrmlError::Frame(StegoError::CrcMismatch));
    }

    #[test]
    fn capacity_is_exact() {
        let stream = parse_vrml(&scene(50)).unwrap();
        let p = ChannelParams::new(3, 5).unwrap();
        let cap = capacity_bytes(&stream, p).unwrap();
        assert_eq!(cap, (47 * 5 - 88) / 8);
        let payload = vec![0xA5u8; cap];
        let out = embed_green_digits(&stream, &payload, p).unwrap();
        assert_eq!(extract_green_digits(&out, p).unwrap(), payload);
        let err = embed_green_digits(&stream, &vec![0u8; cap + 1], p).unwrap_err();
        assert!(matches!(err, VrmlError::InsufficientSlots { .. }));
    }

    #[test]
    fn start_slot_leaves_earlier_slots_alone() {
        let text = scene(40);
        let stream = parse_vrml(&text).unwrap();
        let p = ChannelParams::new(5, 4).unwrap();
        let out = embed_green_digits(&stream, b"x", p).unwrap();
        let s2 = parse_vrml(&out).unwrap();
        for k in 0..5 {
            assert_eq!(
                s2.token_text(s2.color_green_slots[k]),
                stream.token_text(stream.color_green_slots[k])
            );
        }
        assert_eq!(extract_green_digits(&out, p).unwrap(), b"x");
    }

    #[test]
    fn invalid_digits_per_value() {
        assert_eq!(
            ChannelParams::new(0, 0),
            Err(VrmlError::InvalidDigitsPerValue(0))
        );
        assert_eq!(
            ChannelParams::new(0, 10),
            Err(VrmlError::InvalidDigitsPerValue(10))
        );
    }

    #[test]
    fn no_color_node_has_no_capacity() {
        let stream = parse_vrml("#VRML V2.0 utf8\nShape { }\n").unwrap();
        assert_eq!(
            capacity_bytes(&stream, ChannelParams::default()).unwrap(),
            0
        );
        let err = embed_green_digits(&stream, b"", ChannelParams::default()).unwrap_err();
        assert_eq!(
            err,
            VrmlError::InsufficientSlots {
                needed: 15,
                available: 0
            }
        );
    }
}
