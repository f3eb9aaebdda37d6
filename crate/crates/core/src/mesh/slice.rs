use std::collections::HashMap;

use serde::Serialize;

use super::{TriMesh, Vec2};

/// Cross-section of a mesh at one height.
///
/// Closed loops are stored without repeating their first point; the last
/// point connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceLoops {
    pub z: f64,
    pub loops: Vec<Vec<Vec2>>,
    pub open_chains: Vec<Vec<Vec2>>,
}

/// `1e-6` of the bounding-box diagonal, or `1e-9` for an empty/degenerate box.
pub fn default_weld_tol(mesh: &TriMesh) -> f64 {
    match mesh.bounds() {
        Some((lo, hi)) if (hi - lo).norm() > 0.0 => 1e-6 * (hi - lo).norm(),
        _ => 1e-9,
    }
}

/// Intersects the mesh with the plane `Z = z` and chains the resulting
/// segments into loops.
///
/// Vertices lying exactly on the plane are treated as above it, so every
/// crossing triangle contributes exactly one segment and faces coplanar with
/// the plane contribute none. Segment ends are joined through the mesh edge
/// they lie on, and ends within `weld_tol` of each other are merged.
pub fn slice_mesh(mesh: &TriMesh, z: f64, weld_tol: f64) -> SliceLoops {
    assert!(weld_tol > 0.0, "weld_tol must be positive");
    let segments = plane_segments(mesh, z);
    let (loops, open_chains) = chain_segments(&segments, weld_tol);
    SliceLoops {
        z,
        loops,
        open_chains,
    }
}

/// Where a segment endpoint lies: on a mesh edge `(lo, hi)`, or on vertex
/// `v` written as `(v, v)`.
type Site = (u32, u32);

fn plane_segments(mesh: &TriMesh, z: f64) -> Vec<[(Site, Vec2); 2]> {
    let mut out = Vec::new();
    for t in &mesh.triangles {
        let d = t.map(|i| mesh.vertices[i as usize].z - z);
        let below = d.map(|x| x < 0.0);
        let n_below = below.iter().filter(|&&b| b).count();
        if n_below == 0 || n_below == 3 {
            continue;
        }
        // the lone vertex is the one on the minority side
        let lone = (0..3)
            .find(|&i| below[i] == (n_below == 1))
            .expect("one vertex differs");
        let (a, b) = ((lone + 1) % 3, (lone + 2) % 3);
        out.push([
            crossing(mesh, t[lone], t[a], z),
            crossing(mesh, t[lone], t[b], z),
        ]);
    }
    out
}

/// Crossing of edge `(i, j)` with the plane, evaluated in a fixed vertex
/// order so every triangle sharing the edge gets the identical point.
fn crossing(mesh: &TriMesh, i: u32, j: u32, z: f64) -> (Site, Vec2) {
    let (i, j) = (i.min(j), i.max(j));
    let (p, q) = (mesh.vertices[i as usize], mesh.vertices[j as usize]);
    let (dp, dq) = (p.z - z, q.z - z);
    if dp == 0.0 {
        return ((i, i), Vec2::new(p.x, p.y));
    }
    if dq == 0.0 {
        return ((j, j), Vec2::new(q.x, q.y));
    }
    let t = dp / (dp - dq);
    (
        (i, j),
        Vec2::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t),
    )
}

fn find(parent: &mut [usize], mut k: usize) -> usize {
    while parent[k] != k {
        parent[k] = parent[parent[k]];
        k = parent[k];
    }
    k
}

/// Node id per site. Sites closer than `tol` are merged transitively, which
/// also joins seams of meshes whose duplicate vertices were never welded.
fn weld(sites: &[(Site, Vec2)], tol: f64) -> (HashMap<Site, usize>, Vec<Vec2>) {
    let mut index: HashMap<Site, usize> = HashMap::new();
    let mut points: Vec<Vec2> = Vec::new();
    for &(site, p) in sites {
        index.entry(site).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        });
    }
    let key = |p: Vec2| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, &p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(k);
    }
    let mut parent: Vec<usize> = (0..points.len()).collect();
    for (k, &p) in points.iter().enumerate() {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for &other in grid.get(&(kx + dx, ky + dy)).into_iter().flatten() {
                    if other > k && points[other].dist(p) <= tol {
                        let (ra, rb) = (find(&mut parent, k), find(&mut parent, other));
                        // keep the smaller id as root so results do not depend on hashing
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
    }
    let mut node_of = vec![usize::MAX; points.len()];
    let mut nodes = Vec::new();
    for k in 0..points.len() {
        let root = find(&mut parent, k);
        if node_of[root] == usize::MAX {
            node_of[root] = nodes.len();
            nodes.push(points[root]);
        }
        node_of[k] = node_of[root];
    }
    let ids = index.into_iter().map(|(s, k)| (s, node_of[k])).collect();
    (ids, nodes)
}

type Chains = (Vec<Vec<Vec2>>, Vec<Vec<Vec2>>);

fn chain_segments(segments: &[[(Site, Vec2); 2]], weld_tol: f64) -> Chains {
    let flat: Vec<(Site, Vec2)> = segments.iter().flatten().copied().collect();
    let (ids, nodes) = weld(&flat, weld_tol);
    let edges: Vec<(usize, usize)> = segments
        .iter()
        .map(|[(p, _), (q, _)]| (ids[p], ids[q]))
        .filter(|(a, b)| a != b)
        .collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
    for (e, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((e, b));
        adj[b].push((e, a));
    }

    let mut used = vec![false; edges.len()];
    let take = |node: usize, used: &mut Vec<bool>| -> Option<usize> {
        let &(e, other) = adj[node].iter().find(|(e, _)| !used[*e])?;
        used[e] = true;
        Some(other)
    };

    let mut loops = Vec::new();
    let mut open = Vec::new();
    for e in 0..edges.len() {
        if used[e] {
            continue;
        }
        used[e] = true;
        let (a, b) = edges[e];
        let mut chain = vec![a, b];
        let mut closed = false;
        while let Some(next) = take(*chain.last().unwrap(), &mut used) {
            if next == chain[0] {
                closed = true;
                break;
            }
            chain.push(next);
        }
        if !closed {
            let mut back = Vec::new();
            while let Some(prev) = take(*back.last().unwrap_or(&a), &mut used) {
                back.push(prev);
            }
            back.reverse();
            back.extend(chain);
            chain = back;
        }
        let pts: Vec<Vec2> = chain.iter().map(|&n| nodes[n]).collect();
        if closed && pts.len() >= 3 {
            loops.push(pts);
        } else {
            if closed {
                // a two-node cycle: report it with both ends explicit
                let mut pts = pts;
                pts.push(pts[0]);
                open.push(pts);
                continue;
            }
            open.push(pts);
        }
    }
    (loops, open)
}
