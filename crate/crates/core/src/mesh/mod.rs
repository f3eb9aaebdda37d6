//! Geometry primitives shared by every channel and attack in the crate.
//!
//! Coordinates are millimetres throughout. [`TriMesh`] is an indexed triangle
//! list that also carries the 80-byte binary STL header, since that header is
//! itself a payload carrier.

mod primitives;
mod slice;
mod stl;
mod xyz;

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use primitives::{cuboid, icosphere};
pub use slice::{default_weld_tol, slice_mesh, SliceLoops};
pub use stl::{
    parse_stl, stl_format, write_stl_ascii, write_stl_binary, StlFormat, STL_HEADER_LEN,
};
pub use xyz::{parse_xyz, write_xyz};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("truncated binary STL: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: u64, found: u64 },
    #[error("malformed ASCII STL at line {line}: {message}")]
    MalformedAscii { line: usize, message: String },
    #[error("non-finite coordinate in facet {facet}")]
    NonFiniteCoordinate { facet: usize },
    #[error("bad XYZ data on line {0}")]
    BadLine(usize),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("triangle {triangle} is invalid: {reason}")]
    InvalidTriangle {
        triangle: usize,
        reason: &'static str,
    },
}

impl MeshError {
    pub fn kind(&self) -> &'static str {
        match self {
            MeshError::TruncatedFile { .. } => "TruncatedFile",
            MeshError::MalformedAscii { .. } => "MalformedAscii",
            MeshError::NonFiniteCoordinate { .. } => "NonFiniteCoordinate",
            MeshError::BadLine(_) => "BadLine",
            MeshError::EmptyCloud => "EmptyCloud",
            MeshError::InvalidTriangle { .. } => "InvalidTriangle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector in the same direction; the zero vector maps to itself.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Angle to `o` in degrees.
    pub fn angle_deg(self, o: Vec3) -> f64 {
        // atan2 form stays accurate for nearly parallel vectors.
        self.cross(o).norm().atan2(self.dot(o)).to_degrees()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

/// Signed shoelace area; positive for counter-clockwise rings.
pub fn shoelace_area(ring: &[Vec2]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc * 0.5
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub header: [u8; STL_HEADER_LEN],
}

impl Default for TriMesh {
    fn default() -> Self {
        TriMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            header: [0; STL_HEADER_LEN],
        }
    }
}

impl TriMesh {
    /// Builds a mesh with a zero header, checking index bounds, repeated
    /// indices and coordinate finiteness.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        let mesh = TriMesh {
            vertices,
            triangles,
            header: [0; STL_HEADER_LEN],
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i as usize >= n) {
                return Err(MeshError::InvalidTriangle {
                    triangle: t,
                    reason: "vertex index out of range",
                });
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::InvalidTriangle {
                    triangle: t,
                    reason: "repeated vertex index",
                });
            }
        }
        if let Some(facet) = self.vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFiniteCoordinate { facet });
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn triangle_iter(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        (0..self.triangles.len()).map(move |t| self.triangle(t))
    }

    /// Axis-aligned bounds of the referenced vertices, `None` when empty.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let mut it = self.vertices.iter();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))))
    }

    /// Appends `other`, keeping this mesh's header.
    pub fn merge(&mut self, other: &TriMesh) {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]),
        );
    }

    pub fn translated(&self, by: Vec3) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|&v| v + by).collect(),
            triangles: self.triangles.clone(),
            header: self.header,
        }
    }
}

/// Euler angles in degrees. Applied about the fixed origin axes, x first,
/// then y, then z (`v' = Rz * Ry * Rx * v`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        rx: 0.0,
        ry: 0.0,
        rz: 0.0,
    };

    /// Angles are wrapped into `[0, 360)`.
    pub fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Rotation {
            rx: wrap_degrees(rx),
            ry: wrap_degrees(ry),
            rz: wrap_degrees(rz),
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let (sx, cx) = sin_cos_deg(self.rx);
        let (sy, cy) = sin_cos_deg(self.ry);
        let (sz, cz) = sin_cos_deg(self.rz);
        // Rz * Ry * Rx
        [
            [cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx],
            [sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx],
            [-sy, cy * sx, cy * cx],
        ]
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        apply_matrix(&self.matrix(), v)
    }
}

pub(crate) fn apply_matrix(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    Vec3::new(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

/// Exact for quarter turns, so axis-aligned rotations permute coordinates
/// without rounding residue.
fn sin_cos_deg(a: f64) -> (f64, f64) {
    let a = wrap_degrees(a);
    match a {
        0.0 => (0.0, 1.0),
        90.0 => (1.0, 0.0),
        180.0 => (0.0, -1.0),
        270.0 => (-1.0, 0.0),
        _ => a.to_radians().sin_cos(),
    }
}

fn wrap_degrees(a: f64) -> f64 {
    let w = a.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

pub fn rotate_mesh(mesh: &TriMesh, r: Rotation) -> TriMesh {
    let m = r.matrix();
    TriMesh {
        vertices: mesh.vertices.iter().map(|&v| apply_matrix(&m, v)).collect(),
        triangles: mesh.triangles.clone(),
        header: mesh.header,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Volume {
    /// Absolute enclosed volume, mm³.
    pub magnitude: f64,
    /// Set when the signed sum came out negative (inward-facing winding).
    pub negative: bool,
}

impl Volume {
    pub fn signed(&self) -> f64 {
        if self.negative {
            -self.magnitude
        } else {
            self.magnitude
        }
    }
}

/// Divergence-theorem volume: sum of signed tetrahedra against the origin.
pub fn mesh_volume(mesh: &TriMesh) -> Volume {
    let sum: f64 = mesh
        .triangle_iter()
        .map(|[a, b, c]| a.dot(b.cross(c)))
        .sum::<f64>()
        / 6.0;
    Volume {
        magnitude: sum.abs(),
        negative: sum < 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self, MeshError> {
        if points.is_empty() {
            return Err(MeshError::EmptyCloud);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(MeshError::NonFiniteCoordinate { facet: 0 });
        }
        Ok(PointCloud { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
