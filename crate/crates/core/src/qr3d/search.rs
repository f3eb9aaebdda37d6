use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use super::{basis_for, project_points, rasterize, BitGrid, Qr3dError, SphereCloud};
use crate::mesh::{Vec2, Vec3};

/// `v` or `-v`, whichever has nonnegative z (ties: nonnegative y, then x).
pub fn canonical_direction(v: Vec3) -> Vec3 {
    let flip = v.z < 0.0 || (v.z == 0.0 && (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)));
    if flip {
        -v
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeScore {
    /// RMS distance to the nearest lattice site, in pitches. 1.0 when the
    /// projection has no usable pitch.
    pub score: f64,
    pub pitch: f64,
    /// In-plane lattice angle, radians, in (-pi/4, pi/4].
    pub theta: f64,
}

const DEGENERATE: f64 = 1.0;

/// Nearest-neighbour offset for every point, by a sweep over x-sorted order.
fn nearest_offsets(points: &[Vec2]) -> Vec<Vec2> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x));
    let sorted: Vec<Vec2> = order.iter().map(|&k| points[k]).collect();
    let n = sorted.len();
    let mut out = vec![Vec2::default(); n];
    for i in 0..n {
        let p = sorted[i];
        let mut best = f64::INFINITY;
        let mut off = Vec2::default();
        let mut visit = |q: Vec2| -> bool {
            let dx = q.x - p.x;
            if dx * dx >= best {
                return false;
            }
            let d = q - p;
            let d2 = d.x * d.x + d.y * d.y;
            if d2 < best {
                best = d2;
                off = d;
            }
            true
        };
        for q in &sorted[i + 1..] {
            if !visit(*q) {
                break;
            }
        }
        for q in sorted[..i].iter().rev() {
            if !visit(*q) {
                break;
            }
        }
        out[order[i]] = off;
    }
    out
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub(crate) fn score_points(points: &[Vec2]) -> LatticeScore {
    let degenerate = |pitch| LatticeScore {
        score: DEGENERATE,
        pitch,
        theta: 0.0,
    };
    if points.len() < 2 {
        return degenerate(0.0);
    }
    let offsets = nearest_offsets(points);
    let pitch = median(offsets.iter().map(|d| d.x.hypot(d.y)).collect());
    let (lo, hi) = points.iter().fold(
        (
            Vec2::new(f64::INFINITY, f64::INFINITY),
            Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    );
    let extent = lo.dist(hi);
    if !(pitch > 1e-9 * extent) {
        return degenerate(pitch);
    }

    // lattice angle is defined mod 90 degrees, so average 4*phi
    let (mut s, mut c) = (0.0, 0.0);
    for d in &offsets {
        let len = d.x.hypot(d.y);
        if len > 0.0 && len <= 1.2 * pitch {
            let phi = 4.0 * d.y.atan2(d.x);
            s += phi.sin();
            c += phi.cos();
        }
    }
    let theta = if s == 0.0 && c == 0.0 {
        0.0
    } else {
        s.atan2(c) / 4.0
    };

    let n = points.len() as f64;
    let centroid = points.iter().fold(Vec2::default(), |acc, p| {
        Vec2::new(acc.x + p.x / n, acc.y + p.y / n)
    });
    let anchor = *points
        .iter()
        .min_by(|a, b| a.dist(centroid).total_cmp(&b.dist(centroid)))
        .expect("nonempty");
    let mut fit = Lattice {
        origin: anchor,
        alpha: pitch * theta.cos(),
        beta: pitch * theta.sin(),
    };
    // The median NN distance runs short once projections are noisy, and the
    // error grows with distance from the anchor; refit over growing regions.
    for reach in [4.0, 8.0, 16.0, f64::INFINITY] {
        for _ in 0..2 {
            let near = points.iter().filter(|p| p.dist(anchor) <= reach * pitch);
            if let Some(next) = fit.refit(near) {
                fit = next;
            }
        }
    }
    let scale = fit.alpha.hypot(fit.beta);
    let sum_sq: f64 = points
        .iter()
        .map(|&p| {
            let r = p - fit.site(fit.index(p));
            r.x * r.x + r.y * r.y
        })
        .sum();
    LatticeScore {
        score: (sum_sq / n).sqrt() / scale,
        pitch: scale,
        theta: quarter_turn_angle(fit.beta.atan2(fit.alpha)),
    }
}

/// Reduces an angle to (-pi/4, pi/4]; a square lattice repeats every quarter turn.
fn quarter_turn_angle(a: f64) -> f64 {
    let q = std::f64::consts::FRAC_PI_2;
    let r = a - q * (a / q).round();
    if r <= -q / 2.0 {
        r + q
    } else {
        r
    }
}

/// Square lattice `origin + i (alpha, beta) + j (-beta, alpha)`.
#[derive(Clone, Copy)]
struct Lattice {
    origin: Vec2,
    alpha: f64,
    beta: f64,
}

impl Lattice {
    fn index(&self, p: Vec2) -> (f64, f64) {
        let d = p - self.origin;
        let s2 = self.alpha * self.alpha + self.beta * self.beta;
        (
            ((self.alpha * d.x + self.beta * d.y) / s2).round(),
            ((-self.beta * d.x + self.alpha * d.y) / s2).round(),
        )
    }

    fn site(&self, (i, j): (f64, f64)) -> Vec2 {
        Vec2::new(
            self.origin.x + self.alpha * i - self.beta * j,
            self.origin.y + self.beta * i + self.alpha * j,
        )
    }

    /// Least-squares similarity fit of the points to their current sites.
    /// `None` when the points occupy fewer than two sites.
    fn refit<'a>(&self, points: impl Iterator<Item = &'a Vec2>) -> Option<Lattice> {
        let pairs: Vec<(Vec2, (f64, f64))> = points.map(|&p| (p, self.index(p))).collect();
        let n = pairs.len() as f64;
        let (mut pm, mut qm) = (Vec2::default(), (0.0, 0.0));
        for (p, q) in &pairs {
            pm = Vec2::new(pm.x + p.x / n, pm.y + p.y / n);
            qm = (qm.0 + q.0 / n, qm.1 + q.1 / n);
        }
        let (mut sqq, mut sa, mut sb) = (0.0, 0.0, 0.0);
        for (p, q) in &pairs {
            let (qx, qy) = (q.0 - qm.0, q.1 - qm.1);
            let (px, py) = (p.x - pm.x, p.y - pm.y);
            sqq += qx * qx + qy * qy;
            sa += qx * px + qy * py;
            sb += qx * py - qy * px;
        }
        if !(sqq > 0.0) {
            return None;
        }
        let (alpha, beta) = (sa / sqq, sb / sqq);
        if !(alpha.hypot(beta) > 0.0) {
            return None;
        }
        let origin = Vec2::new(
            pm.x - (alpha * qm.0 - beta * qm.1),
            pm.y - (beta * qm.0 + alpha * qm.1),
        );
        Some(Lattice {
            origin,
            alpha,
            beta,
        })
    }
}

/// How well the cloud, projected along `v`, fits a square lattice. The
/// pitch is the median nearest-neighbour distance, the lattice is anchored
/// at the point closest to the centroid and its in-plane angle is fitted.
/// `v` and `-v` score identically.
pub fn lattice_score(cloud: &SphereCloud, v: Vec3) -> LatticeScore {
    score_points(&project_points(
        &cloud.centers,
        canonical_direction(v.normalized()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchParams {
    pub coarse_step_deg: f64,
    pub refine_to_deg: f64,
    pub candidates: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            coarse_step_deg: 2.0,
            refine_to_deg: 0.05,
            candidates: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionSearchResult {
    pub direction: Vec3,
    pub score: f64,
    pub estimated_pitch: f64,
    pub grid: BitGrid,
    pub candidates_evaluated: usize,
    /// Collinear centers or no usable pitch: any direction is as good.
    pub degenerate: bool,
}

#[derive(Clone, Copy)]
struct Scored {
    score: f64,
    dir: Vec3,
}

fn rank(a: &Scored, b: &Scored) -> Ordering {
    a.score
        .total_cmp(&b.score)
        .then(a.dir.x.total_cmp(&b.dir.x))
        .then(a.dir.y.total_cmp(&b.dir.y))
        .then(a.dir.z.total_cmp(&b.dir.z))
}

fn sphere_dir(theta_deg: f64, phi_deg: f64) -> Vec3 {
    let (st, ct) = theta_deg.to_radians().sin_cos();
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    canonical_direction(Vec3::new(st * cp, st * sp, ct))
}

fn hemisphere_grid(step: f64) -> Vec<Vec3> {
    let mut dirs = vec![Vec3::Z];
    let n_theta = (90.0 / step).floor() as usize;
    let n_phi = (360.0 / step).floor() as usize;
    for k in 1..=n_theta {
        let theta = k as f64 * step;
        for m in 0..n_phi {
            let phi = m as f64 * step;
            // on the equator phi and phi + 180 are the same axis
            if theta >= 90.0 && phi >= 180.0 {
                continue;
            }
            dirs.push(sphere_dir(theta, phi));
        }
    }
    dirs
}

fn collinear(centers: &[Vec3]) -> bool {
    let far = |from: Vec3| {
        *centers
            .iter()
            .max_by(|a, b| (**a - from).norm().total_cmp(&(**b - from).norm()))
            .expect("nonempty")
    };
    let a = far(centers[0]);
    let b = far(a);
    let len = (b - a).norm();
    if len == 0.0 {
        return true;
    }
    let d = (b - a) / len;
    centers
        .iter()
        .all(|&c| (c - a).cross(d).norm() <= 1e-9 * len)
}

/// Finds the viewing direction along which the cloud collapses onto a
/// square lattice: a coarse hemisphere sweep, then pattern-search refinement
/// of the best few candidates. Results are canonicalized and ties are broken
/// lexicographically, so the outcome does not depend on evaluation order.
pub fn search_direction(
    cloud: &SphereCloud,
    params: SearchParams,
) -> Result<DirectionSearchResult, Qr3dError> {
    let centers = &cloud.centers;
    if centers.len() < 4 {
        return Err(Qr3dError::TooFewSpheres(centers.len()));
    }
    if !(params.coarse_step_deg > 0.0 && params.refine_to_deg > 0.0 && params.candidates > 0) {
        return Err(Qr3dError::InvalidParams(
            "search steps and candidate count must be positive".to_string(),
        ));
    }
    let eval = |dir: Vec3| Scored {
        score: score_points(&project_points(centers, dir)).score,
        dir,
    };

    let coarse = hemisphere_grid(params.coarse_step_deg);
    let mut evaluated = coarse.len();
    let mut scored: Vec<Scored> = coarse.par_iter().map(|&d| eval(d)).collect();
    scored.sort_by(rank);
    scored.truncate(params.candidates);

    let mut best: Option<Scored> = None;
    for start in scored {
        let mut cur = start;
        let mut step = params.coarse_step_deg;
        while step >= params.refine_to_deg {
            let t = step.to_radians().tan();
            // move while a neighbour improves; bounded so plateaus terminate
            for _ in 0..32 {
                let (e1, e2) = basis_for(cur.dir);
                let mut next = cur;
                for a in [-t, 0.0, t] {
                    for b in [-t, 0.0, t] {
                        if a == 0.0 && b == 0.0 {
                            continue;
                        }
                        let dir = canonical_direction((cur.dir + e1 * a + e2 * b).normalized());
                        let s = eval(dir);
                        evaluated += 1;
                        if rank(&s, &next) == Ordering::Less {
                            next = s;
                        }
                    }
                }
                if rank(&next, &cur) != Ordering::Less {
                    break;
                }
                cur = next;
            }
            step /= 2.0;
        }
        if best.is_none_or(|b| rank(&cur, &b) == Ordering::Less) {
            best = Some(cur);
        }
    }
    let best = best.expect("at least one candidate");

    let fit = score_points(&project_points(centers, best.dir));
    let degenerate = collinear(centers) || fit.score == DEGENERATE;
    let grid = rasterize(&project_points(centers, best.dir), fit.pitch, fit.theta)?;
    Ok(DirectionSearchResult {
        direction: best.dir,
        score: best.score,
        estimated_pitch: fit.pitch,
        grid,
        candidates_evaluated: evaluated,
        degenerate,
    })
}
