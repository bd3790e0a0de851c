//! Gauss linking numbers of closed polylines.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::curves::Polyline;
use crate::error::{Error, Result};
use crate::grid::{cross, dot};

/// Minimum segment-to-segment distance accepted by [`gauss_linking`].
pub const MIN_SEPARATION: f64 = 1e-6;

struct Segments {
    mids: Vec<[f64; 3]>,
    dirs: Vec<[f64; 3]>,
    ends: Vec<([f64; 3], [f64; 3])>,
}

/// Segments sorted by midpoint so the summation order does not depend on
/// where the curve starts or which way it runs.
fn segments(c: &Polyline) -> Segments {
    let mut segs: Vec<([f64; 3], [f64; 3], [f64; 3])> = c
        .segments()
        .map(|(a, b)| {
            let mid = [0, 1, 2].map(|d| 0.5 * (a[d] + b[d]));
            let dir = [0, 1, 2].map(|d| b[d] - a[d]);
            (mid, dir, a)
        })
        .collect();
    segs.sort_by(|x, y| {
        x.0.iter()
            .zip(&y.0)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Segments {
        mids: segs.iter().map(|s| s.0).collect(),
        dirs: segs.iter().map(|s| s.1).collect(),
        ends: segs
            .iter()
            .map(|s| (s.2, [0, 1, 2].map(|d| s.2[d] + s.1[d])))
            .collect(),
    }
}

/// Closest distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_distance(p0: [f64; 3], p1: [f64; 3], q0: [f64; 3], q1: [f64; 3]) -> f64 {
    let d1 = [0, 1, 2].map(|i| p1[i] - p0[i]);
    let d2 = [0, 1, 2].map(|i| q1[i] - q0[i]);
    let r = [0, 1, 2].map(|i| p0[i] - q0[i]);
    let a = dot(d1, d1);
    let e = dot(d2, d2);
    let f = dot(d2, r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        s = 0.0;
        t = 0.0;
    } else if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(d1, r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(d1, d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let cp = [0, 1, 2].map(|i| p0[i] + s * d1[i]);
    let cq = [0, 1, 2].map(|i| q0[i] + t * d2[i]);
    crate::curves::distance(cp, cq)
}

/// Midpoint-rule Gauss double integral
/// `(1/4 pi) sum_ij (m_i - m_j) . (d_i x d_j) / |m_i - m_j|^3`.
///
/// Both curves must be closed and no two segments may come closer than
/// [`MIN_SEPARATION`].
pub fn gauss_linking(a: &Polyline, b: &Polyline) -> Result<f64> {
    if !a.closed || !b.closed || a.len() < 3 || b.len() < 3 {
        return Err(Error::Config(
            "linking number needs two closed curves of at least 3 points".into(),
        ));
    }
    let (sa, sb) = (segments(a), segments(b));
    let rows: Vec<(f64, f64)> = (0..sa.mids.len())
        .into_par_iter()
        .map(|i| {
            let (mi, di) = (sa.mids[i], sa.dirs[i]);
            let mut acc = 0.0;
            let mut closest = f64::INFINITY;
            for j in 0..sb.mids.len() {
                let r = [0, 1, 2].map(|d| mi[d] - sb.mids[j][d]);
                let dist2 = dot(r, r);
                let inv = 1.0 / (dist2 * dist2.sqrt());
                acc += dot(r, cross(di, sb.dirs[j])) * inv;
                let (p0, p1) = sa.ends[i];
                let (q0, q1) = sb.ends[j];
                // Cheap bound before the exact test.
                let reach = 0.5 * (dot(di, di).sqrt() + dot(sb.dirs[j], sb.dirs[j]).sqrt());
                if dist2.sqrt() - reach < closest {
                    closest = closest.min(segment_distance(p0, p1, q0, q1));
                }
            }
            (acc, closest)
        })
        .collect();
    let closest = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    if closest <= MIN_SEPARATION {
        return Err(Error::Proximity { distance: closest });
    }
    let total: f64 = rows.iter().map(|r| r.0).sum();
    Ok(total / (4.0 * PI))
}

/// Pairwise linking of the closed curves in a set.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub curves: Vec<Polyline>,
    /// Open curves left out of the matrix.
    pub open_excluded: usize,
    /// Symmetric Gauss integrals; `NaN` where the pair was too close.
    pub link_matrix: Vec<Vec<f64>>,
    pub rounded_matrix: Vec<Vec<i64>>,
    /// Pairs whose linking could not be evaluated reliably.
    pub proximity_failures: usize,
    /// Sum of `|rounded|` over unordered pairs.
    pub total_linkage: i64,
}

impl LinkReport {
    /// `|link - rounded|` for pair `(i, j)`.
    pub fn residual(&self, i: usize, j: usize) -> f64 {
        (self.link_matrix[i][j] - self.rounded_matrix[i][j] as f64).abs()
    }

    /// Unordered pairs `(i, j, link, rounded)`, `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize, f64, i64)> {
        let n = self.curves.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push((i, j, self.link_matrix[i][j], self.rounded_matrix[i][j]));
            }
        }
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs()
            .iter()
            .filter(|p| p.2.is_finite())
            .map(|p| (p.2 - p.3 as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Number of unordered pairs with nonzero rounded linking.
    pub fn linked_pairs(&self) -> usize {
        self.pairs().iter().filter(|p| p.3 != 0).count()
    }
}

/// Links every pair of closed curves in `curves`.
pub fn link_report(curves: &[Polyline]) -> LinkReport {
    let closed: Vec<Polyline> = curves.iter().filter(|c| c.closed).cloned().collect();
    let open_excluded = curves.len() - closed.len();
    let n = closed.len();
    let mut link_matrix = vec![vec![0.0; n]; n];
    let mut rounded_matrix = vec![vec![0i64; n]; n];
    let mut proximity_failures = 0;
    let mut total_linkage = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (value, rounded) = match gauss_linking(&closed[i], &closed[j]) {
                Ok(l) => (l, l.round() as i64),
                Err(_) => {
                    proximity_failures += 1;
                    (f64::NAN, 0)
                }
            };
            link_matrix[i][j] = value;
            link_matrix[j][i] = value;
            rounded_matrix[i][j] = rounded;
            rounded_matrix[j][i] = rounded;
            total_linkage += rounded.abs();
        }
    }
    LinkReport {
        curves: closed,
        open_excluded,
        link_matrix,
        rounded_matrix,
        proximity_failures,
        total_linkage,
    }
}

/// Regular polygon approximating a circle: `center + r (cos t e1 + sin t e2)`.
pub fn circle(
    center: [f64; 3],
    radius: f64,
    e1: [f64; 3],
    e2: [f64; 3],
    segments: usize,
) -> Polyline {
    let points = (0..segments)
        .map(|s| {
            let t = 2.0 * PI * s as f64 / segments as f64;
            let (sn, cs) = t.sin_cos();
            [0, 1, 2].map(|d| center[d] + radius * (cs * e1[d] + sn * e2[d]))
        })
        .collect();
    Polyline::closed(points)
}
