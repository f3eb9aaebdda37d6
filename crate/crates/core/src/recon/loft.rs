use std::f64::consts::TAU;

use super::layers::LayerStack;
use super::outline::layer_outline;
use super::ReconError;
use crate::mesh::{shoelace_area, TriMesh, Vec2, Vec3};

pub const DEFAULT_RESAMPLE: usize = 128;

fn area_centroid(ring: &[Vec2]) -> Vec2 {
    let a = shoelace_area(ring);
    let n = ring.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (p, q) = (ring[i], ring[(i + 1) % n]);
        let c = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Vec2::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// `m` points spaced evenly by arc length around a closed CCW ring,
/// starting at the vertex whose angle about the centroid, in [0, 2pi), is
/// smallest.
fn resample(ring: &[Vec2], m: usize) -> Vec<Vec2> {
    let c = area_centroid(ring);
    let angle = |p: &Vec2| (p.y - c.y).atan2(p.x - c.x).rem_euclid(TAU);
    let start = (0..ring.len())
        .min_by(|&a, &b| angle(&ring[a]).total_cmp(&angle(&ring[b])))
        .expect("nonempty ring");
    let n = ring.len();
    let pts: Vec<Vec2> = (0..=n).map(|k| ring[(start + k) % n]).collect();
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        cum.push(cum.last().unwrap() + w[0].dist(w[1]));
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(m);
    let mut seg = 0;
    for k in 0..m {
        let s = total * k as f64 / m as f64;
        while seg + 1 < n && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
        let (a, b) = (pts[seg], pts[seg + 1]);
        out.push(Vec2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    out
}

/// Joins per-layer outlines into a closed mesh.
///
/// Each outline is resampled to `m` points; neighbouring rings are joined
/// by quads split along their shorter diagonal, and the ends are capped
/// with fans around the ring centroid. One outline per layer is assumed.
pub fn loft_layers(stack: &LayerStack, m: usize) -> Result<TriMesh, ReconError> {
    if m < 3 {
        return Err(ReconError::InvalidResample(m));
    }
    if stack.layers.len() < 2 {
        return Err(ReconError::TooFewLayers(stack.layers.len()));
    }
    let mut rings = Vec::with_capacity(stack.layers.len());
    for layer in &stack.layers {
        let outline = match layer_outline(&layer.points, layer.z) {
            Ok(o) if !o.degenerate => o,
            _ => return Err(ReconError::DegenerateLayer(layer.z)),
        };
        rings.push((layer.z, resample(&outline.ring, m)));
    }

    let mut vertices = Vec::with_capacity(rings.len() * m + 2);
    for (z, ring) in &rings {
        vertices.extend(ring.iter().map(|p| Vec3::new(p.x, p.y, *z)));
    }
    let idx = |layer: usize, i: usize| (layer * m + i % m) as u32;
    let mut triangles = Vec::with_capacity(2 * m * rings.len());
    for k in 0..rings.len() - 1 {
        for i in 0..m {
            let (a, b, c, d) = (idx(k, i), idx(k, i + 1), idx(k + 1, i + 1), idx(k + 1, i));
            let dist = |p: u32, q: u32| (vertices[p as usize] - vertices[q as usize]).norm();
            if dist(a, c) <= dist(b, d) {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let last = rings.len() - 1;
    for (layer, outward_up) in [(0, false), (last, true)] {
        let (z, ring) = &rings[layer];
        let c = area_centroid(ring);
        let center = vertices.len() as u32;
        vertices.push(Vec3::new(c.x, c.y, *z));
        for i in 0..m {
            let (p, q) = (idx(layer, i), idx(layer, i + 1));
            triangles.push(if outward_up {
                [center, p, q]
            } else {
                [center, q, p]
            });
        }
    }
    Ok(TriMesh::new(vertices, triangles).expect("loft indices are in range"))
}
