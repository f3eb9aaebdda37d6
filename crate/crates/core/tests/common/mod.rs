#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::path::PathBuf;

use nalgebra::{DMatrix, Vector3};
use stegkit_core::mesh::{PointCloud, TriMesh, Vec3};
use stegkit_core::qr3d::{BitGrid, SplitMix64};

pub fn fixture_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(kind)
}

/// Fixture files of one kind, sorted by name.
pub fn fixtures(kind: &str, ext: &str) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(fixture_dir(kind))
        .expect("fixture dir exists")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

/// 21x21-style symbol: three 7x7 finder patterns, timing rows, random data.
pub fn qr_like_grid(n: usize, rng: &mut SplitMix64) -> BitGrid {
    assert!(n >= 15);
    let mut bits = vec![false; n * n];
    let mut reserved = vec![false; n * n];
    for (oi, oj) in [(0, 0), (0, n - 7), (n - 7, 0)] {
        for di in 0..7 {
            for dj in 0..7 {
                let ring = di.min(dj).min(6 - di).min(6 - dj);
                bits[(oi + di) * n + oj + dj] = ring != 1;
                reserved[(oi + di) * n + oj + dj] = true;
            }
        }
    }
    for k in 8..n - 8 {
        bits[6 * n + k] = k % 2 == 0;
        bits[k * n + 6] = k % 2 == 0;
        reserved[6 * n + k] = true;
        reserved[k * n + 6] = true;
    }
    for idx in 0..n * n {
        if !reserved[idx] {
            bits[idx] = rng.next_u64() >> 63 == 1;
        }
    }
    BitGrid::new(n, bits).unwrap()
}

/// Uniform on the upper hemisphere, kept away from the horizon.
pub fn random_direction(rng: &mut SplitMix64) -> Vec3 {
    let z = 0.05 + 0.95 * rng.next_f64();
    let phi = TAU * rng.next_f64();
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Angle between two directions ignoring sign, degrees.
pub fn axis_angle_deg(a: Vec3, b: Vec3) -> f64 {
    let d = a.angle_deg(b);
    d.min(180.0 - d)
}

/// Layered samples of a circle of radius `r`.
pub fn cylinder_cloud(r: f64, h: f64, dz: f64, per_layer: usize) -> PointCloud {
    let layers = (h / dz).round() as usize;
    let mut pts = Vec::new();
    for k in 0..=layers {
        let z = k as f64 * dz;
        for i in 0..per_layer {
            let a = TAU * i as f64 / per_layer as f64;
            pts.push(Vec3::new(r * a.cos(), r * a.sin(), z));
        }
    }
    PointCloud::new(pts).unwrap()
}

/// `count` layers of an elliptical outline whose size drifts with height.
pub fn tapered_cloud(count: usize, dz: f64, per_layer: usize) -> PointCloud {
    let mut pts = Vec::new();
    for k in 0..count {
        let z = k as f64 * dz;
        let s = 1.0 + 0.3 * (k as f64 / count as f64);
        for i in 0..per_layer {
            let a = TAU * i as f64 / per_layer as f64;
            pts.push(Vec3::new(6.0 * s * a.cos(), 4.0 * s * a.sin(), z));
        }
    }
    PointCloud::new(pts).unwrap()
}

/// Normal of the least-squares plane through `points` (smallest singular
/// vector of the centred coordinates).
pub fn plane_normal(points: &[Vec3]) -> Vec3 {
    let n = points.len() as f64;
    let c = points.iter().fold(Vector3::zeros(), |acc, p| {
        acc + Vector3::new(p.x, p.y, p.z) / n
    });
    let m = DMatrix::from_fn(points.len(), 3, |i, j| {
        let p = points[i];
        [p.x, p.y, p.z][j] - c[j]
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.unwrap();
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    Vec3::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)]).normalized()
}

/// Counts connected cross-section components of a welded mesh at height
/// `z` by joining the mesh edges each crossing triangle cuts.
///
/// Vertices exactly on the plane count as above it.
pub fn section_components(mesh: &TriMesh, z: f64) -> usize {
    let mut parent: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    fn find(p: &mut HashMap<(u32, u32), (u32, u32)>, k: (u32, u32)) -> (u32, u32) {
        let mut root = k;
        while p[&root] != root {
            root = p[&root];
        }
        let mut cur = k;
        while p[&cur] != root {
            let next = p[&cur];
            p.insert(cur, root);
            cur = next;
        }
        root
    }
    let above = |i: u32| mesh.vertices[i as usize].z >= z;
    for t in &mesh.triangles {
        let cut: Vec<(u32, u32)> = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
            .into_iter()
            .filter(|&(a, b)| above(a) != above(b))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        if cut.len() != 2 {
            continue;
        }
        for &e in &cut {
            parent.entry(e).or_insert(e);
        }
        let (ra, rb) = (find(&mut parent, cut[0]), find(&mut parent, cut[1]));
        if ra != rb {
            parent.insert(ra, rb);
        }
    }
    let keys: Vec<(u32, u32)> = parent.keys().copied().collect();
    let mut roots: Vec<(u32, u32)> = keys.into_iter().map(|k| find(&mut parent, k)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Mean components per layer with layers at `zmin + h (k + 1/2)`.
pub fn mean_components(mesh: &TriMesh, layer_height: f64) -> f64 {
    let (lo, hi) = mesh.bounds().unwrap();
    let (mut layers, mut total) = (0usize, 0usize);
    loop {
        let z = lo.z + layer_height * (layers as f64 + 0.5);
        if z >= hi.z {
            break;
        }
        total += section_components(mesh, z);
        layers += 1;
    }
    total as f64 / layers as f64
}

pub struct Timer(std::time::Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(std::time::Instant::now())
    }

    pub fn secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
