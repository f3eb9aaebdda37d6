use serde::Serialize;

use super::ReconError;
use crate::mesh::{shoelace_area, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlineMethod {
    Chained,
    ConvexHull,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlinePolygon {
    pub z: f64,
    /// Counter-clockwise, first point not repeated.
    pub ring: Vec<Vec2>,
    pub method: OutlineMethod,
    /// All points collinear: the ring encloses no area.
    pub degenerate: bool,
    pub area: f64,
}

fn lex(a: &Vec2, b: &Vec2) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts = points.to_vec();
    pts.sort_by(lex);
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        // last point of each chain starts the other one
        hull.pop();
    }
    hull
}

fn median_nn(points: &[Vec2]) -> f64 {
    let mut d: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| p.dist(*q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

/// Greedy nearest-neighbour walk from the lowest (then leftmost) point.
/// The walk stops at a jump longer than `max_step`.
fn chain(points: &[Vec2], max_step: f64) -> Vec<usize> {
    let start = (0..points.len())
        .min_by(|&a, &b| {
            points[a]
                .y
                .total_cmp(&points[b].y)
                .then(points[a].x.total_cmp(&points[b].x))
        })
        .expect("nonempty");
    let mut visited = vec![false; points.len()];
    visited[start] = true;
    let mut path = vec![start];
    let mut cur = start;
    loop {
        let next = (0..points.len()).filter(|&j| !visited[j]).min_by(|&a, &b| {
            points[cur]
                .dist(points[a])
                .total_cmp(&points[cur].dist(points[b]))
        });
        match next {
            Some(j) if points[cur].dist(points[j]) <= max_step => {
                visited[j] = true;
                path.push(j);
                cur = j;
            }
            _ => break,
        }
    }
    path
}

/// Outline of one layer's samples.
///
/// Tries nearest-neighbour chaining first; the chain is accepted when it
/// visits at least 90% of the points and closes within twice the median
/// nearest-neighbour distance. Otherwise the convex hull is used. The
/// ring is returned counter-clockwise.
pub fn layer_outline(points: &[Vec2], z: f64) -> Result<OutlinePolygon, ReconError> {
    let mut seen = std::collections::HashSet::new();
    let pts: Vec<Vec2> = points
        .iter()
        .filter(|p| seen.insert((p.x.to_bits(), p.y.to_bits())))
        .copied()
        .collect();
    if pts.len() < 3 {
        return Err(ReconError::TooFewPoints(pts.len()));
    }

    // slack so equal spacings computed with rounding still pass
    let step = 2.0 * median_nn(&pts) * (1.0 + 1e-9);
    let path = chain(&pts, step);
    let closes = pts[*path.last().expect("nonempty")].dist(pts[path[0]]) <= step;
    let enough = path.len() * 10 >= pts.len() * 9;

    let (mut ring, method) = if closes && enough && path.len() >= 3 {
        (
            path.iter().map(|&k| pts[k]).collect::<Vec<_>>(),
            OutlineMethod::Chained,
        )
    } else {
        (convex_hull(&pts), OutlineMethod::ConvexHull)
    };
    let mut area = shoelace_area(&ring);
    if area < 0.0 {
        ring.reverse();
        area = -area;
    }
    if ring.len() < 3 || area == 0.0 {
        let mut line = pts.clone();
        line.sort_by(lex);
        return Ok(OutlinePolygon {
            z,
            ring: line,
            method: OutlineMethod::ConvexHull,
            degenerate: true,
            area: 0.0,
        });
    }
    Ok(OutlinePolygon {
        z,
        ring,
        method,
        degenerate: false,
        area,
    })
}
