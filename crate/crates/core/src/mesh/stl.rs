use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{MeshError, TriMesh, Vec3};

pub const STL_HEADER_LEN: usize = 80;
const RECORD_LEN: u64 = 50;

/// Parses binary or ASCII STL.
///
/// The input is treated as binary when it is at least 84 bytes long and the
/// declared triangle count matches the length exactly; otherwise an ASCII
/// parse is attempted when the text starts with `solid` and mentions
/// `facet`. Anything else is reported as a truncated binary file.
///
/// Vertices are merged only when their coordinates are bit-identical.
/// Facets that collapse onto a repeated vertex are dropped.
pub fn parse_stl(bytes: &[u8]) -> Result<TriMesh, MeshError> {
    match stl_format(bytes) {
        Some(StlFormat::Binary) => parse_binary(bytes, declared_count(bytes).expect("checked")),
        Some(StlFormat::Ascii) => parse_ascii(bytes),
        None => Err(MeshError::TruncatedFile {
            expected: declared_count(bytes).map_or(84, binary_len),
            found: bytes.len() as u64,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StlFormat {
    Binary,
    Ascii,
}

/// The encoding [`parse_stl`] will use for these bytes, if any.
pub fn stl_format(bytes: &[u8]) -> Option<StlFormat> {
    match declared_count(bytes) {
        Some(count) if bytes.len() as u64 == binary_len(count) => Some(StlFormat::Binary),
        _ if looks_ascii(bytes) => Some(StlFormat::Ascii),
        _ => None,
    }
}

fn declared_count(bytes: &[u8]) -> Option<u32> {
    let raw = bytes.get(STL_HEADER_LEN..STL_HEADER_LEN + 4)?;
    Some(u32::from_le_bytes(raw.try_into().unwrap()))
}

fn binary_len(count: u32) -> u64 {
    84 + RECORD_LEN * count as u64
}

fn looks_ascii(bytes: &[u8]) -> bool {
    let start = bytes
        .iter()
        .position(|b| !b.is_ascii_whitespace())
        .unwrap_or(bytes.len());
    let rest = &bytes[start..];
    rest.len() >= 5
        && rest[..5].eq_ignore_ascii_case(b"solid")
        && rest.windows(5).any(|w| w.eq_ignore_ascii_case(b"facet"))
}

#[derive(Default)]
struct Builder {
    index: HashMap<[u64; 3], u32>,
    mesh: TriMesh,
}

impl Builder {
    fn vertex(&mut self, v: Vec3) -> u32 {
        let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
        let next = self.mesh.vertices.len() as u32;
        *self.index.entry(key).or_insert_with(|| {
            self.mesh.vertices.push(v);
            next
        })
    }

    fn facet(&mut self, facet: usize, corners: [Vec3; 3]) -> Result<(), MeshError> {
        if corners.iter().any(|c| !c.is_finite()) {
            return Err(MeshError::NonFiniteCoordinate { facet });
        }
        let tri = corners.map(|c| self.vertex(c));
        if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
            self.mesh.triangles.push(tri);
        }
        Ok(())
    }
}

fn parse_binary(bytes: &[u8], count: u32) -> Result<TriMesh, MeshError> {
    let mut b = Builder::default();
    b.mesh.header.copy_from_slice(&bytes[..STL_HEADER_LEN]);
    b.mesh.triangles.reserve(count as usize);
    let f =
        |rec: &[u8], k: usize| f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().unwrap()) as f64;
    for (facet, rec) in bytes[84..].chunks_exact(RECORD_LEN as usize).enumerate() {
        // floats 0..3 are the stored normal, which is recomputed on write
        let corner = |i: usize| Vec3::new(f(rec, 3 + 3 * i), f(rec, 4 + 3 * i), f(rec, 5 + 3 * i));
        b.facet(facet, [corner(0), corner(1), corner(2)])?;
    }
    Ok(b.mesh)
}

struct Tokens<'a> {
    words: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let words = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |w| (i + 1, w)))
            .collect();
        Tokens { words, pos: 0 }
    }

    fn line(&self) -> usize {
        self.words
            .get(self.pos)
            .or(self.words.last())
            .map_or(1, |w| w.0)
    }

    fn err(&self, message: impl Into<String>) -> MeshError {
        MeshError::MalformedAscii {
            line: self.line(),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.words.get(self.pos).map(|w| w.1)
    }

    fn expect(&mut self, kw: &str) -> Result<(), MeshError> {
        match self.peek() {
            Some(w) if w.eq_ignore_ascii_case(kw) => {
                self.pos += 1;
                Ok(())
            }
            Some(w) => Err(self.err(format!("expected '{kw}', found '{w}'"))),
            None => Err(self.err(format!("expected '{kw}', found end of file"))),
        }
    }

    fn number(&mut self) -> Result<f64, MeshError> {
        match self.peek() {
            Some(w) => match w.parse::<f64>() {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => Err(self.err(format!("expected a number, found '{w}'"))),
            },
            None => Err(self.err("expected a number, found end of file")),
        }
    }

    fn vec3(&mut self) -> Result<Vec3, MeshError> {
        Ok(Vec3::new(self.number()?, self.number()?, self.number()?))
    }

    /// Skips the optional solid name up to the next keyword.
    fn skip_name(&mut self, until: &[&str]) {
        let line = self.words[self.pos - 1].0;
        while let Some(w) = self.peek() {
            if self.words[self.pos].0 != line || until.iter().any(|k| w.eq_ignore_ascii_case(k)) {
                break;
            }
            self.pos += 1;
        }
    }

    fn at(&self, kw: &str) -> bool {
        self.peek().is_some_and(|w| w.eq_ignore_ascii_case(kw))
    }
}

fn parse_ascii(bytes: &[u8]) -> Result<TriMesh, MeshError> {
    let text = std::str::from_utf8(bytes).map_err(|e| MeshError::MalformedAscii {
        line: bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1,
        message: "invalid UTF-8".into(),
    })?;
    let mut t = Tokens::new(text);
    let mut b = Builder::default();
    let mut facet = 0;
    while t.peek().is_some() {
        t.expect("solid")?;
        t.skip_name(&["facet", "endsolid"]);
        while t.at("facet") {
            t.pos += 1;
            t.expect("normal")?;
            t.vec3()?;
            t.expect("outer")?;
            t.expect("loop")?;
            let corners = [vertex(&mut t)?, vertex(&mut t)?, vertex(&mut t)?];
            t.expect("endloop")?;
            t.expect("endfacet")?;
            b.facet(facet, corners)?;
            facet += 1;
        }
        t.expect("endsolid")?;
        t.skip_name(&["solid"]);
    }
    Ok(b.mesh)
}

fn vertex(t: &mut Tokens) -> Result<Vec3, MeshError> {
    t.expect("vertex")?;
    t.vec3()
}

fn facet_normal([a, b, c]: [Vec3; 3]) -> Vec3 {
    let n = (b - a).cross(c - a);
    let len = n.norm();
    if len > 0.0 && len.is_finite() {
        n / len
    } else {
        Vec3::ZERO
    }
}

/// Serializes to binary STL: header, little-endian count, 50-byte records
/// with right-hand-rule normals and zero attribute bytes.
pub fn write_stl_binary(mesh: &TriMesh) -> Vec<u8> {
    let count = u32::try_from(mesh.triangles.len()).expect("triangle count exceeds u32");
    let mut out = Vec::with_capacity(binary_len(count) as usize);
    out.extend_from_slice(&mesh.header);
    out.extend_from_slice(&count.to_le_bytes());
    for tri in mesh.triangle_iter() {
        let n = facet_normal(tri);
        for v in std::iter::once(n).chain(tri) {
            for c in v.to_array() {
                out.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&[0, 0]);
    }
    out
}

pub fn write_stl_ascii(mesh: &TriMesh, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "solid {name}");
    for tri in mesh.triangle_iter() {
        let n = facet_normal(tri);
        let _ = writeln!(s, "  facet normal {:e} {:e} {:e}", n.x, n.y, n.z);
        s.push_str("    outer loop\n");
        for v in tri {
            let _ = writeln!(s, "      vertex {:e} {:e} {:e}", v.x, v.y, v.z);
        }
        s.push_str("    endloop\n  endfacet\n");
    }
    let _ = writeln!(s, "endsolid {name}");
    s
}
