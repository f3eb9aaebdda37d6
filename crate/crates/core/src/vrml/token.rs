use std::ops::Range;

use serde::Serialize;

use super::VrmlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Keyword,
    Number,
    Punct,
    String,
    Comment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Range<usize>,
    /// Parsed value for numbers.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VrmlWarning {
    /// The file parsed but has no `Color` node, so the channel has no slots.
    NoColorNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VrmlTokenStream {
    pub text: String,
    pub tokens: Vec<Token>,
    /// Token indices of the green component of every RGB triple inside
    /// `Color { color [...] }` nodes, in file order.
    pub color_green_slots: Vec<usize>,
    pub warnings: Vec<VrmlWarning>,
}

impl VrmlTokenStream {
    pub fn token_text(&self, index: usize) -> &str {
        &self.text[self.tokens[index].span.clone()]
    }

    /// Re-emits the text with some tokens replaced. Replacements must be
    /// sorted by token index. Every byte outside a replaced span is copied
    /// from the original.
    pub fn emit_with(&self, replacements: &[(usize, String)]) -> String {
        let mut out = String::with_capacity(self.text.len());
        let mut cursor = 0;
        for (idx, new_text) in replacements {
            let span = &self.tokens[*idx].span;
            out.push_str(&self.text[cursor..span.start]);
            out.push_str(new_text);
            cursor = span.end;
        }
        out.push_str(&self.text[cursor..]);
        out
    }

    /// Rebuilds the document from its tokens and the gaps between them.
    pub fn emit(&self) -> String {
        self.emit_with(&[])
    }
}

const HEADER: &str = "#VRML V2.0";

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, ',' | '"' | '#' | '{' | '}' | '[' | ']')
}

fn parse_number(word: &str) -> Option<f64> {
    let first = word.chars().next()?;
    if !(first.is_ascii_digit() || matches!(first, '+' | '-' | '.')) {
        return None;
    }
    let (sign, body) = match word.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, word.strip_prefix('+').unwrap_or(word)),
    };
    if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        return u64::from_str_radix(hex, 16).ok().map(|v| sign * v as f64);
    }
    // reject forms Rust accepts but VRML does not ("inf", "nan")
    if !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    word.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn tokenize(text: &str) -> Result<Vec<Token>, VrmlError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let single = |kind| Token {
            kind,
            span: start..start + c.len_utf8(),
            value: None,
        };
        match c {
            c if c.is_whitespace() => {}
            ',' | '{' | '}' | '[' | ']' => tokens.push(single(TokenKind::Punct)),
            '#' => {
                let mut end = start + 1;
                while let Some(&(j, d)) = chars.peek() {
                    if d == '\n' || d == '\r' {
                        break;
                    }
                    end = j + d.len_utf8();
                    chars.next();
                }
                tokens.push(Token {
                    kind: TokenKind::Comment,
                    span: start..end,
                    value: None,
                });
            }
            '"' => {
                let mut end = None;
                let mut escaped = false;
                for (j, d) in chars.by_ref() {
                    if escaped {
                        escaped = false;
                    } else if d == '\\' {
                        escaped = true;
                    } else if d == '"' {
                        end = Some(j + 1);
                        break;
                    }
                }
                let end = end.ok_or(VrmlError::UnterminatedString(start))?;
                tokens.push(Token {
                    kind: TokenKind::String,
                    span: start..end,
                    value: None,
                });
            }
            _ => {
                let mut end = start + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if is_delim(d) {
                        break;
                    }
                    end = j + d.len_utf8();
                    chars.next();
                }
                let value = parse_number(&text[start..end]);
                tokens.push(Token {
                    kind: if value.is_some() {
                        TokenKind::Number
                    } else {
                        TokenKind::Keyword
                    },
                    span: start..end,
                    value,
                });
            }
        }
    }
    Ok(tokens)
}

fn check_brackets(text: &str, tokens: &[Token]) -> Result<(), VrmlError> {
    let mut stack: Vec<(u8, usize)> = Vec::new();
    for t in tokens.iter().filter(|t| t.kind == TokenKind::Punct) {
        let b = text.as_bytes()[t.span.start];
        match b {
            b'{' | b'[' => stack.push((b, t.span.start)),
            b'}' | b']' => {
                let open = if b == b'}' { b'{' } else { b'[' };
                match stack.pop() {
                    Some((o, _)) if o == open => {}
                    _ => return Err(VrmlError::UnbalancedBrackets(t.span.start)),
                }
            }
            _ => {}
        }
    }
    match stack.last() {
        Some(&(_, offset)) => Err(VrmlError::UnbalancedBrackets(offset)),
        None => Ok(()),
    }
}

/// Finds the green slots. `sig` holds indices of non-comment, non-comma
/// tokens so that node structure can be walked directly.
fn green_slots(text: &str, tokens: &[Token]) -> Result<Vec<usize>, VrmlError> {
    let sig: Vec<usize> = (0..tokens.len())
        .filter(|&i| {
            let t = &tokens[i];
            t.kind != TokenKind::Comment
                && !(t.kind == TokenKind::Punct && &text[t.span.clone()] == ",")
        })
        .collect();
    let tok = |k: usize| &text[tokens[sig[k]].span.clone()];
    let kind = |k: usize| tokens[sig[k]].kind;

    let mut slots = Vec::new();
    let mut k = 0;
    while k + 1 < sig.len() {
        if !(kind(k) == TokenKind::Keyword && tok(k) == "Color" && tok(k + 1) == "{") {
            k += 1;
            continue;
        }
        // walk the node body
        let mut depth = 0usize;
        let mut j = k + 1;
        while j < sig.len() {
            match tok(j) {
                "{" | "[" => depth += 1,
                "}" | "]" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                "color" if depth == 1 && kind(j) == TokenKind::Keyword => {
                    let (values, next) = color_values(&sig, j + 1, &tok, &kind);
                    let offset = tokens[sig[j]].span.start;
                    if values.len() % 3 != 0 {
                        return Err(VrmlError::MalformedColor {
                            offset,
                            reason: "component count is not a multiple of 3",
                        });
                    }
                    for &v in &values {
                        let x = tokens[v].value.expect("number token");
                        if !(0.0..=1.0).contains(&x) {
                            return Err(VrmlError::MalformedColor {
                                offset: tokens[v].span.start,
                                reason: "component outside [0, 1]",
                            });
                        }
                    }
                    slots.extend(values.chunks(3).map(|rgb| rgb[1]));
                    j = next;
                    continue;
                }
                _ => {}
            }
            j += 1;
        }
        k = j + 1;
    }
    Ok(slots)
}

/// Collects the number tokens of an MFColor value starting at significant
/// position `k`: either a bracketed list or a single bare triple. Returns
/// token indices and the significant position after the value.
fn color_values<'a>(
    sig: &[usize],
    k: usize,
    tok: &impl Fn(usize) -> &'a str,
    kind: &impl Fn(usize) -> TokenKind,
) -> (Vec<usize>, usize) {
    let mut values = Vec::new();
    if k < sig.len() && tok(k) == "[" {
        let mut j = k + 1;
        while j < sig.len() && kind(j) == TokenKind::Number {
            values.push(sig[j]);
            j += 1;
        }
        // step over the closing bracket
        if j < sig.len() && tok(j) == "]" {
            j += 1;
        }
        (values, j)
    } else {
        let mut j = k;
        while j < sig.len() && kind(j) == TokenKind::Number && values.len() < 3 {
            values.push(sig[j]);
            j += 1;
        }
        (values, j)
    }
}

/// Tokenizes a VRML97 document and locates the green color slots.
pub fn parse_vrml(text: &str) -> Result<VrmlTokenStream, VrmlError> {
    if !text.starts_with(HEADER) {
        return Err(VrmlError::MissingHeader);
    }
    let tokens = tokenize(text)?;
    check_brackets(text, &tokens)?;
    let color_green_slots = green_slots(text, &tokens)?;
    let has_color = tokens
        .iter()
        .any(|t| t.kind == TokenKind::Keyword && &text[t.span.clone()] == "Color");
    let warnings = if has_color {
        Vec::new()
    } else {
        vec![VrmlWarning::NoColorNode]
    };
    Ok(VrmlTokenStream {
        text: text.to_string(),
        tokens,
        color_green_slots,
        warnings,
    })
}
