use serde::Serialize;

use super::ReconError;
use crate::mesh::{PointCloud, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layer {
    /// Mean z of the member points.
    pub z: f64,
    pub points: Vec<Vec2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub z_tol: f64,
    /// Gaps between consecutive layer heights; `None` for a single layer.
    pub spacing: Option<SpacingStats>,
}

impl LayerStack {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn point_count(&self) -> usize {
        self.layers.iter().map(|l| l.points.len()).sum()
    }
}

fn sorted_z(cloud: &PointCloud) -> Vec<f64> {
    let mut zs: Vec<f64> = cloud.points.iter().map(|p| p.z).collect();
    zs.sort_by(f64::total_cmp);
    zs
}

/// Half the median of the nonzero gaps between sorted z values. Zero gaps
/// (points sharing a layer) are skipped, otherwise a layered cloud would
/// always get a zero tolerance. A cloud with a single z gets a tolerance
/// scaled to its magnitude.
pub fn default_z_tol(cloud: &PointCloud) -> f64 {
    let zs = sorted_z(cloud);
    let mut gaps: Vec<f64> = zs
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .collect();
    if gaps.is_empty() {
        return 1e-9 * zs.first().map_or(1.0, |z| z.abs().max(1.0));
    }
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    let median = if n % 2 == 1 {
        gaps[n / 2]
    } else {
        0.5 * (gaps[n / 2 - 1] + gaps[n / 2])
    };
    0.5 * median
}

/// Splits a cloud into horizontal layers. Points are taken in z order; a
/// new layer starts when the gap to the previous point exceeds `z_tol`, or
/// when the layer's z spread would exceed it.
pub fn group_layers(cloud: &PointCloud, z_tol: Option<f64>) -> Result<LayerStack, ReconError> {
    if cloud.is_empty() {
        return Err(ReconError::EmptyCloud);
    }
    let z_tol = z_tol.unwrap_or_else(|| default_z_tol(cloud));
    if !(z_tol.is_finite() && z_tol > 0.0) {
        return Err(ReconError::InvalidTolerance(z_tol));
    }
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| cloud.points[a].z.total_cmp(&cloud.points[b].z));

    let mut layers = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>, layers: &mut Vec<Layer>| {
        let n = members.len() as f64;
        let z = members.iter().map(|&k| cloud.points[k].z).sum::<f64>() / n;
        let points = members
            .drain(..)
            .map(|k| Vec2::new(cloud.points[k].x, cloud.points[k].y))
            .collect();
        layers.push(Layer { z, points });
    };
    for &k in &order {
        let z = cloud.points[k].z;
        if let (Some(&first), Some(&last)) = (members.first(), members.last()) {
            let gap = z - cloud.points[last].z;
            let spread = z - cloud.points[first].z;
            if gap > z_tol || spread > z_tol {
                flush(&mut members, &mut layers);
            }
        }
        members.push(k);
    }
    flush(&mut members, &mut layers);

    let gaps: Vec<f64> = layers.windows(2).map(|w| w[1].z - w[0].z).collect();
    let spacing = (!gaps.is_empty()).then(|| SpacingStats {
        min: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        max: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: gaps.iter().sum::<f64>() / gaps.len() as f64,
    });
    Ok(LayerStack {
        layers,
        z_tol,
        spacing,
    })
}
