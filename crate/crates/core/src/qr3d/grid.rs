use std::fmt::Write;

use serde::Serialize;

use super::Qr3dError;

/// Square bit matrix, row-major, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitGrid {
    n: usize,
    bits: Vec<bool>,
}

impl BitGrid {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self, Qr3dError> {
        if n < 2 {
            return Err(Qr3dError::InvalidGrid(format!(
                "side length {n} is below 2"
            )));
        }
        if bits.len() != n * n {
            return Err(Qr3dError::InvalidGrid(format!(
                "{} bits for a {n}x{n} grid",
                bits.len()
            )));
        }
        if !bits.contains(&true) {
            return Err(Qr3dError::InvalidGrid("no true bits".to_string()));
        }
        Ok(BitGrid { n, bits })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self, Qr3dError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Qr3dError::InvalidGrid(
                "rows must form a square".to_string(),
            ));
        }
        BitGrid::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Plain PBM; `1` is a black (true) module.
    pub fn to_pbm(&self) -> String {
        let mut s = format!("P1\n{} {}\n", self.n, self.n);
        for row in self.bits.chunks(self.n) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Reads a plain (P1) PBM. Pixels may be packed without separators;
    /// `#` starts a comment anywhere. Width and height must match.
    pub fn from_pbm(text: &str) -> Result<Self, Qr3dError> {
        let mut header = Vec::new();
        let mut bits = Vec::new();
        let mut last_line = 1;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            last_line = k + 1;
            for word in line.split_whitespace() {
                if header.len() < 3 {
                    header.push((k + 1, word));
                    continue;
                }
                for c in word.chars() {
                    match c {
                        '0' => bits.push(false),
                        '1' => bits.push(true),
                        _ => {
                            return Err(Qr3dError::Pbm {
                                line: k + 1,
                                reason: format!("unexpected character {c:?}"),
                            })
                        }
                    }
                }
            }
        }
        let err = |line, reason: &str| Qr3dError::Pbm {
            line,
            reason: reason.to_string(),
        };
        match header.first() {
            Some(&(_, "P1")) => {}
            Some(&(line, _)) => return Err(err(line, "magic must be P1")),
            None => return Err(err(1, "empty file")),
        }
        let dim = |k: usize| -> Result<usize, Qr3dError> {
            let &(line, word) = header
                .get(k)
                .ok_or_else(|| err(last_line, "missing dimensions"))?;
            word.parse().map_err(|_| err(line, "bad dimension"))
        };
        let (w, h) = (dim(1)?, dim(2)?);
        if w != h {
            return Err(err(header[1].0, "grid must be square"));
        }
        if bits.len() != w * h {
            return Err(err(
                last_line,
                &format!("expected {} pixels, found {}", w * h, bits.len()),
            ));
        }
        BitGrid::new(w, bits)
    }
}
