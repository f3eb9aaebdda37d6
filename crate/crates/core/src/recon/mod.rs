//! Point-cloud reconstruction by stacking per-layer outlines, and the
//! slicing-based orientation scan.

mod layers;
mod loft;
mod orient;
mod outline;

use thiserror::Error;

pub use layers::{default_z_tol, group_layers, Layer, LayerStack, SpacingStats};
pub use loft::{loft_layers, DEFAULT_RESAMPLE};
pub use orient::{orientation_scan, OrientationCandidate, OrientationReport, OPEN_CHAIN_PENALTY};
pub use outline::{convex_hull, layer_outline, OutlineMethod, OutlinePolygon};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("z tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("outline needs at least 3 distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("layer at z = {0} has no usable outline")]
    DegenerateLayer(f64),
    #[error("lofting needs at least 2 layers, got {0}")]
    TooFewLayers(usize),
    #[error("resample count must be at least 3, got {0}")]
    InvalidResample(usize),
    #[error("angle step {0} does not divide 360")]
    InvalidAngleStep(f64),
    #[error("layer height must be positive, got {0}")]
    InvalidLayerHeight(f64),
    #[error("mesh has no triangles")]
    EmptyMesh,
}

impl ReconError {
    pub fn kind(&self) -> &'static str {
        match self {
            ReconError::EmptyCloud => "EmptyCloud",
            ReconError::InvalidTolerance(_) => "InvalidTolerance",
            ReconError::TooFewPoints(_) => "TooFewPoints",
            ReconError::DegenerateLayer(_) => "DegenerateLayer",
            ReconError::TooFewLayers(_) => "TooFewLayers",
            ReconError::InvalidResample(_) => "InvalidResample",
            ReconError::InvalidAngleStep(_) => "InvalidAngleStep",
            ReconError::InvalidLayerHeight(_) => "InvalidLayerHeight",
            ReconError::EmptyMesh => "EmptyMesh",
        }
    }
}
