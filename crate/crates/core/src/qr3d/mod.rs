//! Bit matrices hidden in depth-jittered sphere clouds. The matrix is only
//! legible under orthographic projection along the embedding direction.

mod grid;
mod search;

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::mesh::{icosphere, parse_xyz, write_xyz, MeshError, TriMesh, Vec2, Vec3};

pub use grid::BitGrid;
pub use search::{
    canonical_direction, lattice_score, search_direction, DirectionSearchResult, LatticeScore,
    SearchParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Qr3dError {
    #[error("invalid bit grid: {0}")]
    InvalidGrid(String),
    #[error("malformed PBM on line {line}: {reason}")]
    Pbm { line: usize, reason: String },
    #[error("invalid embedding parameters: {0}")]
    InvalidParams(String),
    #[error("{centers} centers land in only {cells} grid cells")]
    DegenerateProjection { centers: usize, cells: usize },
    #[error("projected grid would be {0} modules wide")]
    GridTooLarge(usize),
    #[error("direction search needs at least 4 spheres, got {0}")]
    TooFewSpheres(usize),
    #[error("sphere cloud file has no '#radius=' comment")]
    MissingRadius,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl Qr3dError {
    pub fn kind(&self) -> &'static str {
        match self {
            Qr3dError::InvalidGrid(_) => "InvalidGrid",
            Qr3dError::Pbm { .. } => "Pbm",
            Qr3dError::InvalidParams(_) => "InvalidParams",
            Qr3dError::DegenerateProjection { .. } => "DegenerateProjection",
            Qr3dError::GridTooLarge(_) => "GridTooLarge",
            Qr3dError::TooFewSpheres(_) => "TooFewSpheres",
            Qr3dError::MissingRadius => "MissingRadius",
            Qr3dError::Mesh(e) => e.kind(),
        }
    }
}

/// Largest side length `project_to_grid` will build.
pub const MAX_GRID: usize = 4096;

pub const DEFAULT_SEED: u64 = 0x3D5E_ED00_C0DE_0001;

/// SplitMix64. Small, seedable and identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbedParams {
    pub pitch: f64,
    pub radius: f64,
    pub depth_jitter: f64,
    pub seed: u64,
    pub direction: Vec3,
}

impl EmbedParams {
    /// Radius 0.35 pitch, jitter 5 pitch, default seed.
    pub fn new(pitch: f64, direction: Vec3) -> Self {
        EmbedParams {
            pitch,
            radius: 0.35 * pitch,
            depth_jitter: 5.0 * pitch,
            seed: DEFAULT_SEED,
            direction,
        }
    }

    pub fn validate(&self) -> Result<(), Qr3dError> {
        let bad = |m: &str| Err(Qr3dError::InvalidParams(m.to_string()));
        if !(self.pitch.is_finite() && self.pitch > 0.0) {
            return bad("pitch must be positive");
        }
        if !(self.radius > 0.0 && self.radius < self.pitch / 2.0) {
            return bad("radius must be in (0, pitch/2)");
        }
        if !(self.depth_jitter.is_finite() && self.depth_jitter >= 0.0) {
            return bad("depth jitter must be nonnegative");
        }
        if !self.direction.is_finite() || (self.direction.norm() - 1.0).abs() > 1e-9 {
            return bad("direction must be a unit vector");
        }
        Ok(())
    }
}

/// Alignment gap below which two axes count as tied in [`basis_for`].
pub const BASIS_TIE_TOL: f64 = 1e-2;

/// In-plane axes for viewing direction `v`.
///
/// `a` is the first of z, y, x whose `|a·v|` is within [`BASIS_TIE_TOL`] of
/// the smallest, `u = normalize(a × v)` and `w = v × u`. `(u, w, v)` is
/// right-handed and `v = +z` gives `u = +x`, `w = +y`. The tolerance keeps
/// the basis stable for directions recovered with small angular error.
pub fn basis_for(v: Vec3) -> (Vec3, Vec3) {
    let axes = [Vec3::Z, Vec3::Y, Vec3::X];
    let least = axes
        .iter()
        .map(|a| a.dot(v).abs())
        .fold(f64::INFINITY, f64::min);
    let a = *axes
        .iter()
        .find(|a| a.dot(v).abs() <= least + BASIS_TIE_TOL)
        .expect("some axis attains the minimum");
    let u = a.cross(v).normalized();
    let w = v.cross(u);
    (u, w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereCloud {
    pub centers: Vec<Vec3>,
    pub radius: f64,
}

impl SphereCloud {
    pub fn to_xyz(&self) -> String {
        write_xyz(&self.centers, &[format!("radius={}", self.radius)])
    }

    pub fn from_xyz(text: &str) -> Result<Self, Qr3dError> {
        let radius = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix("#radius="))
            .find_map(|r| r.trim().parse::<f64>().ok())
            .filter(|r| r.is_finite() && *r > 0.0)
            .ok_or(Qr3dError::MissingRadius)?;
        let cloud = parse_xyz(text)?;
        Ok(SphereCloud {
            centers: cloud.points,
            radius,
        })
    }
}

/// One sphere per true bit. Depth offsets along `v` are drawn in row-major
/// order of the true bits.
pub fn grid_to_spheres(grid: &BitGrid, params: &EmbedParams) -> Result<SphereCloud, Qr3dError> {
    params.validate()?;
    let (u, w) = basis_for(params.direction);
    let v = params.direction;
    let c = (grid.n() as f64 - 1.0) / 2.0;
    let p = params.pitch;
    let mut rng = SplitMix64::new(params.seed);
    let mut centers = Vec::with_capacity(grid.count_ones());
    for i in 0..grid.n() {
        for j in 0..grid.n() {
            if grid.get(i, j) {
                let t = params.depth_jitter * (2.0 * rng.next_f64() - 1.0);
                centers.push(u * ((j as f64 - c) * p) + w * ((c - i as f64) * p) + v * t);
            }
        }
    }
    Ok(SphereCloud {
        centers,
        radius: params.radius,
    })
}

pub fn spheres_to_mesh(cloud: &SphereCloud, subdivisions: u32) -> Result<TriMesh, Qr3dError> {
    if subdivisions > 4 {
        return Err(Qr3dError::InvalidParams(
            "subdivisions must be at most 4".to_string(),
        ));
    }
    let mut mesh = TriMesh::default();
    for &c in &cloud.centers {
        mesh.merge(&icosphere(c, cloud.radius, subdivisions));
    }
    Ok(mesh)
}

pub(crate) fn project_points(centers: &[Vec3], v: Vec3) -> Vec<Vec2> {
    let (u, w) = basis_for(v);
    centers
        .iter()
        .map(|&c| Vec2::new(c.dot(u), c.dot(w)))
        .collect()
}

/// Rasterizes projected points, first rotating them by `-theta` so that a
/// lattice at angle `theta` lines up with the grid axes.
pub(crate) fn rasterize(points: &[Vec2], pitch: f64, theta: f64) -> Result<BitGrid, Qr3dError> {
    if !(pitch.is_finite() && pitch > 0.0) {
        return Err(Qr3dError::InvalidParams(
            "pitch must be positive".to_string(),
        ));
    }
    if points.is_empty() {
        return Err(MeshError::EmptyCloud.into());
    }
    let (s, c) = theta.sin_cos();
    let rotated: Vec<Vec2> = points
        .iter()
        .map(|q| Vec2::new(c * q.x + s * q.y, -s * q.x + c * q.y))
        .collect();
    let a_min = rotated.iter().map(|q| q.x).fold(f64::INFINITY, f64::min);
    let b_max = rotated
        .iter()
        .map(|q| q.y)
        .fold(f64::NEG_INFINITY, f64::max);
    let cells: Vec<(f64, f64)> = rotated
        .iter()
        .map(|q| {
            (
                ((b_max - q.y) / pitch).round(),
                ((q.x - a_min) / pitch).round(),
            )
        })
        .collect();
    let extent = cells.iter().map(|&(i, j)| i.max(j)).fold(0.0, f64::max);
    if !(extent < MAX_GRID as f64) {
        return Err(Qr3dError::GridTooLarge(extent as usize + 1));
    }
    let cells: Vec<(usize, usize)> = cells
        .iter()
        .map(|&(i, j)| (i as usize, j as usize))
        .collect();
    let distinct: HashSet<(usize, usize)> = cells.iter().copied().collect();
    if distinct.len() < cells.len() {
        return Err(Qr3dError::DegenerateProjection {
            centers: cells.len(),
            cells: distinct.len(),
        });
    }
    let n = (extent as usize + 1).max(2);
    let mut bits = vec![false; n * n];
    for (i, j) in cells {
        bits[i * n + j] = true;
    }
    BitGrid::new(n, bits)
}

/// Orthographic projection along `v` onto the `basis_for(v)` plane.
///
/// Module `(0, 0)` is at the smallest `u` and largest `w` coordinate. The
/// grid is as large as the occupied extent, padded to a square, so a grid
/// round-trips exactly when its true bits touch all four borders.
pub fn project_to_grid(cloud: &SphereCloud, v: Vec3, pitch: f64) -> Result<BitGrid, Qr3dError> {
    if !v.is_finite() || (v.norm() - 1.0).abs() > 1e-9 {
        return Err(Qr3dError::InvalidParams(
            "direction must be a unit vector".to_string(),
        ));
    }
    rasterize(&project_points(&cloud.centers, v), pitch, 0.0)
}
