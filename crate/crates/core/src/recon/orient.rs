use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use super::ReconError;
use crate::mesh::{default_weld_tol, rotate_mesh, shoelace_area, slice_mesh, Rotation, TriMesh};

/// Score added per unit fraction of layers that contain open chains.
pub const OPEN_CHAIN_PENALTY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrientationCandidate {
    pub rotation: Rotation,
    pub layers: usize,
    pub mean_loops_per_layer: f64,
    pub max_open_chains: usize,
    pub open_chain_rate: f64,
    pub bottom_layer_area: f64,
    pub fragmentation_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationReport {
    pub angle_step_deg: f64,
    pub layer_height: f64,
    pub candidates_evaluated: usize,
    /// Best first.
    pub candidates: Vec<OrientationCandidate>,
}

fn evaluate(mesh: &TriMesh, rotation: Rotation, layer_height: f64) -> OrientationCandidate {
    let rotated = rotate_mesh(mesh, rotation);
    let (lo, hi) = rotated.bounds().expect("nonempty mesh");
    let tol = default_weld_tol(&rotated);
    let mut layers = 0;
    let mut loops = 0;
    let mut open_layers = 0;
    let mut max_open = 0;
    let mut bottom = 0.0;
    loop {
        let z = lo.z + layer_height * (layers as f64 + 0.5);
        if z >= hi.z {
            break;
        }
        let s = slice_mesh(&rotated, z, tol);
        if layers == 0 {
            bottom = s.loops.iter().map(|l| shoelace_area(l)).sum::<f64>().abs();
        }
        loops += s.loops.len();
        max_open = max_open.max(s.open_chains.len());
        if !s.open_chains.is_empty() {
            open_layers += 1;
        }
        layers += 1;
    }
    let (mean, rate) = if layers == 0 {
        (0.0, 0.0)
    } else {
        (
            loops as f64 / layers as f64,
            open_layers as f64 / layers as f64,
        )
    };
    OrientationCandidate {
        rotation,
        layers,
        mean_loops_per_layer: mean,
        max_open_chains: max_open,
        open_chain_rate: rate,
        bottom_layer_area: bottom,
        fragmentation_score: mean + OPEN_CHAIN_PENALTY * rate,
    }
}

// Floating sums over differently rotated copies of the same layer differ in
// the last bits; compare on a fixed grid so symmetric orientations tie.
fn quantize(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

fn rank(a: &OrientationCandidate, b: &OrientationCandidate) -> Ordering {
    quantize(a.fragmentation_score)
        .cmp(&quantize(b.fragmentation_score))
        .then(quantize(b.bottom_layer_area).cmp(&quantize(a.bottom_layer_area)))
        .then(a.rotation.rx.total_cmp(&b.rotation.rx))
        .then(a.rotation.ry.total_cmp(&b.rotation.ry))
        .then(a.rotation.rz.total_cmp(&b.rotation.rz))
}

/// Slices the mesh in every orientation of an `angle_step_deg` grid over
/// (rx, ry, rz) and ranks them: fewest loops per layer first, open chains
/// penalised, larger first-layer area breaking ties.
///
/// Layers sit at `zmin + layer_height * (k + 1/2)`. At 15 degrees the grid
/// has 24^3 = 13824 orientations.
pub fn orientation_scan(
    mesh: &TriMesh,
    angle_step_deg: f64,
    layer_height: f64,
) -> Result<OrientationReport, ReconError> {
    if mesh.triangles.is_empty() {
        return Err(ReconError::EmptyMesh);
    }
    let steps = 360.0 / angle_step_deg;
    if !(angle_step_deg > 0.0 && steps.fract() == 0.0) {
        return Err(ReconError::InvalidAngleStep(angle_step_deg));
    }
    if !(layer_height.is_finite() && layer_height > 0.0) {
        return Err(ReconError::InvalidLayerHeight(layer_height));
    }
    let n = steps as usize;
    let rotations: Vec<Rotation> = (0..n * n * n)
        .map(|k| {
            let a = |i: usize| i as f64 * angle_step_deg;
            Rotation::new(a(k / (n * n)), a((k / n) % n), a(k % n))
        })
        .collect();
    let mut candidates: Vec<OrientationCandidate> = rotations
        .par_iter()
        .map(|&r| evaluate(mesh, r, layer_height))
        .collect();
    candidates.sort_by(rank);
    Ok(OrientationReport {
        angle_step_deg,
        layer_height,
        candidates_evaluated: candidates.len(),
        candidates,
    })
}
