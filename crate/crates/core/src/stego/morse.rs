//! Morse code drawn as vertical strokes along a baseline: short strokes are
//! dots, long strokes dashes, and the spacing between strokes separates
//! elements, letters and words using standard Morse timing.

use serde::{Deserialize, Serialize};

use super::StegoError;

const TABLE: [(char, &str); 36] = [
    ('A', ".-"),
    ('B', "-..."),
    ('C', "-.-."),
    ('D', "-.."),
    ('E', "."),
    ('F', "..-."),
    ('G', "--."),
    ('H', "...."),
    ('I', ".."),
    ('J', ".---"),
    ('K', "-.-"),
    ('L', ".-.."),
    ('M', "--"),
    ('N', "-."),
    ('O', "---"),
    ('P', ".--."),
    ('Q', "--.-"),
    ('R', ".-."),
    ('S', "..."),
    ('T', "-"),
    ('U', "..-"),
    ('V', "...-"),
    ('W', ".--"),
    ('X', "-..-"),
    ('Y', "-.--"),
    ('Z', "--.."),
    ('0', "-----"),
    ('1', ".----"),
    ('2', "..---"),
    ('3', "...--"),
    ('4', "....-"),
    ('5', "....."),
    ('6', "-...."),
    ('7', "--..."),
    ('8', "---.."),
    ('9', "----."),
];

fn encode_char(c: char) -> Option<&'static str> {
    TABLE.iter().find(|(k, _)| *k == c).map(|(_, code)| *code)
}

fn decode_seq(seq: &str) -> Option<char> {
    TABLE.iter().find(|(_, code)| *code == seq).map(|(k, _)| *k)
}

/// One stroke of the sketch: a vertical line at `x` from `y0` to `y1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchSegment {
    pub x: f64,
    pub y0: f64,
    pub y1: f64,
}

impl SketchSegment {
    pub fn length(&self) -> f64 {
        (self.y1 - self.y0).abs()
    }
}

/// Timing unit `d`. A dot is `d` long and a dash `3d`; gaps are `d` inside a
/// letter, `3d` between letters and `7d` between words. Decoding splits
/// lengths at `2d` and gaps at `2d` / `5d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorseParams {
    pub unit: f64,
}

impl Default for MorseParams {
    fn default() -> Self {
        MorseParams { unit: 1.0 }
    }
}

impl MorseParams {
    pub fn new(unit: f64) -> Result<Self, StegoError> {
        if unit > 0.0 && unit.is_finite() {
            Ok(MorseParams { unit })
        } else {
            Err(StegoError::InvalidUnit(unit))
        }
    }

    pub fn dash(&self) -> f64 {
        3.0 * self.unit
    }

    /// Estimates the unit from a drawn sketch, so decoding does not depend
    /// on the scale it was drawn at.
    ///
    /// The shortest stroke or gap is taken as one unit (averaged with any
    /// value within 1.5x of it). This is exact whenever the text contains a
    /// dot or a multi-element letter; a sketch made only of `T`s is
    /// indistinguishable from one made only of `E`s.
    pub fn fitted(segments: &[SketchSegment]) -> Result<Self, StegoError> {
        let mut values: Vec<f64> = segments.iter().map(SketchSegment::length).collect();
        values.extend(
            segments
                .windows(2)
                .map(|w| w[1].x - (w[0].x + w[0].length()))
                .filter(|&g| g > 0.0),
        );
        let min = values
            .iter()
            .copied()
            .filter(|v| *v > 0.0 && v.is_finite())
            .fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(StegoError::InvalidUnit(min));
        }
        let near: Vec<f64> = values
            .into_iter()
            .filter(|&v| v >= min && v <= 1.5 * min)
            .collect();
        MorseParams::new(near.iter().sum::<f64>() / near.len() as f64)
    }
}

/// Lays out `text` (A-Z, 0-9 and spaces) as strokes. Runs of spaces count as
/// a single word break; leading and trailing spaces are ignored.
pub fn text_to_segments(text: &str, params: MorseParams) -> Result<Vec<SketchSegment>, StegoError> {
    let d = params.unit;
    if let Some(bad) = text.chars().find(|&c| c != ' ' && encode_char(c).is_none()) {
        return Err(StegoError::UnsupportedCharacter(bad));
    }
    let mut out = Vec::new();
    let mut x = 0.0;
    for (wi, word) in text.split(' ').filter(|w| !w.is_empty()).enumerate() {
        if wi > 0 {
            x += 7.0 * d;
        }
        for (ci, c) in word.chars().enumerate() {
            if ci > 0 {
                x += 3.0 * d;
            }
            let code = encode_char(c).expect("validated above");
            for (ei, e) in code.chars().enumerate() {
                if ei > 0 {
                    x += d;
                }
                let len = if e == '.' { d } else { 3.0 * d };
                out.push(SketchSegment {
                    x,
                    y0: 0.0,
                    y1: len,
                });
                x += len;
            }
        }
    }
    Ok(out)
}

/// Reads strokes back into text. Segments must be sorted by strictly
/// increasing `x`.
pub fn segments_to_text(
    segments: &[SketchSegment],
    params: MorseParams,
) -> Result<String, StegoError> {
    let d = params.unit;
    for (i, s) in segments.iter().enumerate() {
        if !(s.x.is_finite() && s.y0.is_finite() && s.y1.is_finite()) {
            return Err(StegoError::InvalidSegment {
                index: i,
                reason: "non-finite coordinate",
            });
        }
        if s.length() <= 0.0 {
            return Err(StegoError::InvalidSegment {
                index: i,
                reason: "zero length",
            });
        }
        if i > 0 && s.x <= segments[i - 1].x {
            return Err(StegoError::UnsortedSegments(i));
        }
    }

    let mut text = String::new();
    let mut seq = String::new();
    let mut seq_start = 0;
    let flush = |seq: &mut String, start: usize, text: &mut String| -> Result<(), StegoError> {
        let c = decode_seq(seq).ok_or_else(|| StegoError::UnknownMorseSequence {
            position: start,
            sequence: seq.clone(),
        })?;
        text.push(c);
        seq.clear();
        Ok(())
    };
    for (i, s) in segments.iter().enumerate() {
        if i > 0 {
            let prev = &segments[i - 1];
            let gap = s.x - (prev.x + prev.length());
            if gap >= 2.0 * d {
                flush(&mut seq, seq_start, &mut text)?;
                if gap >= 5.0 * d {
                    text.push(' ');
                }
                seq_start = i;
            }
        }
        seq.push(if s.length() < 2.0 * d { '.' } else { '-' });
    }
    if !seq.is_empty() {
        flush(&mut seq, seq_start, &mut text)?;
    }
    Ok(text)
}

pub fn segments_to_json(segments: &[SketchSegment]) -> String {
    serde_json::to_string_pretty(segments).expect("segments serialize")
}

pub fn segments_from_json(text: &str) -> Result<Vec<SketchSegment>, StegoError> {
    serde_json::from_str(text).map_err(|e| StegoError::Json(e.to_string()))
}
