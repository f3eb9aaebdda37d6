use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::GcodeError;

/// Command word such as `G1` or `M82`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Code {
    pub letter: char,
    pub number: f64,
}

impl Code {
    pub fn is(&self, letter: char, number: f64) -> bool {
        self.letter == letter && self.number == number
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter, self.number)
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcodeCommand {
    /// 1-based line in the source text.
    pub line_number: usize,
    /// `None` for comment-only lines and bare modal moves.
    pub code: Option<Code>,
    pub arguments: BTreeMap<char, f64>,
    /// Text after the first `;`, verbatim.
    pub raw_comment: Option<String>,
    /// The full source line.
    pub raw: String,
}

impl GcodeCommand {
    pub fn arg(&self, letter: char) -> Option<f64> {
        self.arguments.get(&letter).copied()
    }

    pub fn is_comment_only(&self) -> bool {
        self.code.is_none() && self.arguments.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GcodeProgram {
    pub commands: Vec<GcodeCommand>,
}

/// Codes whose arguments drive the toolpath model; their arguments must all
/// be well-formed numbers.
fn is_strict(code: Option<Code>) -> bool {
    match code {
        None => true,
        Some(c) if c.letter == 'G' => {
            [0., 1., 2., 3., 20., 21., 28., 90., 91., 92.].contains(&c.number)
        }
        Some(c) if c.letter == 'M' => c.number == 82.0 || c.number == 83.0,
        Some(_) => false,
    }
}

/// Splits a code-bearing line into (letter, number text) words. `N` line
/// numbers and `*` checksums are dropped; quoted strings end word scanning.
fn words(body: &str) -> Vec<(char, &str)> {
    let body = body.split('*').next().unwrap_or("");
    let mut out = Vec::new();
    let mut chars = body.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c == '"' {
            break;
        }
        let start = i + c.len_utf8();
        let mut end = start;
        while let Some(&(j, d)) = chars.peek() {
            if d.is_alphabetic() || d.is_whitespace() || d == '"' {
                break;
            }
            end = j + d.len_utf8();
            chars.next();
        }
        out.push((c.to_ascii_uppercase(), &body[start..end]));
    }
    out
}

/// Parses G-code text into one command per nonempty line.
///
/// Comment-only lines are kept with an empty code. Unknown codes are kept
/// with whatever arguments parse; codes that affect the toolpath model are
/// parsed strictly.
pub fn parse_gcode(text: &str) -> Result<GcodeProgram, GcodeError> {
    let mut commands = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_number = idx + 1;
        if raw.trim().is_empty() || raw.trim() == "%" {
            continue;
        }
        let (body, raw_comment) = match raw.find(';') {
            Some(p) => (&raw[..p], Some(raw[p + 1..].to_string())),
            None => (raw, None),
        };
        let mut ws = words(body);
        if ws.first().is_some_and(|w| w.0 == 'N') {
            ws.remove(0);
        }
        let code = match ws.first() {
            Some(&(l, num)) if matches!(l, 'G' | 'M' | 'T') => match num.parse::<f64>() {
                Ok(n) => {
                    ws.remove(0);
                    Some(Code {
                        letter: l,
                        number: n,
                    })
                }
                Err(_) => return Err(GcodeError::MalformedNumber(line_number)),
            },
            _ => None,
        };
        let strict = is_strict(code);
        let mut arguments = BTreeMap::new();
        for (letter, num) in ws {
            match num.parse::<f64>() {
                Ok(v) if v.is_finite() => {
                    if arguments.insert(letter, v).is_some() && strict {
                        return Err(GcodeError::DuplicateArgument {
                            line: line_number,
                            letter,
                        });
                    }
                }
                _ if strict => return Err(GcodeError::MalformedNumber(line_number)),
                _ => {}
            }
        }
        commands.push(GcodeCommand {
            line_number,
            code,
            arguments,
            raw_comment,
            raw: raw.to_string(),
        });
    }
    Ok(GcodeProgram { commands })
}
