//! Intersection curves of a `u` level surface with a `v` level surface.
//!
//! Each cell is split into six tetrahedra around its main diagonal (the
//! split is conforming between neighbouring cells). Inside a tetrahedron
//! the linear interpolants of `u` and `v` cut out at most one segment whose
//! ends lie on two of its triangular faces. Segment ends are keyed by the
//! face they sit on, so chaining across tetrahedra is exact.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::grid::{AxisKind, Grid3, ScalarField};
use crate::isosurface::{field_scale, nudged};

/// Level values selecting one `u` surface and one `v` surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoPair {
    pub u0: f64,
    pub v0: f64,
}

impl IsoPair {
    pub fn new(u0: f64, v0: f64) -> Self {
        Self { u0, v0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 3]>,
    /// Closed curves have an implicit segment from the last point back to
    /// the first.
    pub closed: bool,
}

impl Polyline {
    pub fn closed(points: Vec<[f64; 3]>) -> Self {
        Self {
            points,
            closed: true,
        }
    }

    pub fn open(points: Vec<[f64; 3]>) -> Self {
        Self {
            points,
            closed: false,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segments as point pairs, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 3], [f64; 3])> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n.saturating_sub(1) };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| distance(a, b)).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self {
            points,
            closed: self.closed,
        }
    }

    /// Applies `f` to every point.
    pub fn transformed(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        Self {
            points: self.points.iter().map(|&p| f(p)).collect(),
            closed: self.closed,
        }
    }

    pub fn centroid(&self) -> [f64; 3] {
        let n = self.points.len().max(1) as f64;
        let mut c = [0.0; 3];
        for p in &self.points {
            for d in 0..3 {
                c[d] += p[d] / n;
            }
        }
        c
    }
}

#[inline]
pub(crate) fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Extracted curves plus the number of local configurations that did not
/// resolve to a clean segment (degenerate contacts or broken chains).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveSet {
    pub curves: Vec<Polyline>,
    pub defects: usize,
}

impl CurveSet {
    pub fn closed_count(&self) -> usize {
        self.curves.iter().filter(|c| c.closed).count()
    }

    pub fn open_count(&self) -> usize {
        self.curves.len() - self.closed_count()
    }
}

/// Kuhn split of the unit cube: each permutation of the axes walks from
/// corner (0,0,0) to (1,1,1).
const TET_PATHS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

type FaceKey = [usize; 3];

#[derive(Debug, Clone, Copy)]
struct Segment {
    keys: [FaceKey; 2],
    points: [[f64; 3]; 2],
}

#[derive(Clone, Copy)]
struct Node {
    index: usize,
    pos: [f64; 3],
    u: f64,
    v: f64,
}

/// Where the two level planes meet on one triangle, computed from the
/// nodes sorted by global index so both neighbouring tetrahedra agree.
fn face_point(mut tri: [Node; 3], pair: IsoPair) -> Option<(FaceKey, [f64; 3])> {
    tri.sort_by_key(|n| n.index);
    let [a, b, c] = tri;
    let (du1, du2) = (b.u - a.u, c.u - a.u);
    let (dv1, dv2) = (b.v - a.v, c.v - a.v);
    let (ru, rv) = (pair.u0 - a.u, pair.v0 - a.v);
    let det = du1 * dv2 - du2 * dv1;
    if det == 0.0 {
        return None;
    }
    let lb = (ru * dv2 - du2 * rv) / det;
    let lc = (du1 * rv - ru * dv1) / det;
    if lb < 0.0 || lc < 0.0 || lb + lc > 1.0 {
        return None;
    }
    let p = [0, 1, 2].map(|d| a.pos[d] + lb * (b.pos[d] - a.pos[d]) + lc * (c.pos[d] - a.pos[d]));
    Some(([a.index, b.index, c.index], p))
}

fn cell_segments(
    grid: &Grid3,
    u: &[f64],
    v: &[f64],
    pair: IsoPair,
    scales: (f64, f64),
    cell: [usize; 3],
    out: &mut Vec<Segment>,
) -> usize {
    let n = grid.n();
    let node = |off: [usize; 3]| {
        let mut ijk = [0; 3];
        let mut pos = [0.0; 3];
        for d in 0..3 {
            let raw = cell[d] + off[d];
            ijk[d] = raw % n;
            pos[d] = grid.coord(d, cell[d]) + off[d] as f64 * grid.spacing(d);
        }
        let index = grid.index(ijk[0], ijk[1], ijk[2]);
        Node {
            index,
            pos,
            u: nudged(u[index], pair.u0, scales.0),
            v: nudged(v[index], pair.v0, scales.1),
        }
    };

    let mut corners = [[Node {
        index: 0,
        pos: [0.0; 3],
        u: 0.0,
        v: 0.0,
    }; 2]; 4];
    let mut umin = f64::INFINITY;
    let mut umax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for (bits, slot) in corners.iter_mut().flatten().enumerate() {
        let off = [bits >> 2 & 1, bits >> 1 & 1, bits & 1];
        let nd = node(off);
        umin = umin.min(nd.u);
        umax = umax.max(nd.u);
        vmin = vmin.min(nd.v);
        vmax = vmax.max(nd.v);
        *slot = nd;
    }
    if umin > pair.u0 || umax < pair.u0 || vmin > pair.v0 || vmax < pair.v0 {
        return 0;
    }
    let corner = |off: [usize; 3]| corners[off[0] * 2 + off[1]][off[2]];

    let mut defects = 0;
    for path in TET_PATHS {
        let mut off = [0usize; 3];
        let mut tet = [corner(off); 4];
        for (step, &axis) in path.iter().enumerate() {
            off[axis] = 1;
            tet[step + 1] = corner(off);
        }
        let mut hits: [Option<(FaceKey, [f64; 3])>; 4] = [None; 4];
        let mut count = 0;
        for skip in 0..4 {
            let tri: Vec<Node> = (0..4).filter(|&i| i != skip).map(|i| tet[i]).collect();
            if let Some(hit) = face_point([tri[0], tri[1], tri[2]], pair) {
                hits[count] = Some(hit);
                count += 1;
            }
        }
        match count {
            0 => {}
            2 => {
                let (k0, p0) = hits[0].unwrap();
                let (k1, p1) = hits[1].unwrap();
                out.push(Segment {
                    keys: [k0, k1],
                    points: [p0, p1],
                });
            }
            _ => defects += 1,
        }
    }
    defects
}

/// Closed and open curves where `u = pair.u0` meets `v = pair.v0`. Curves
/// ending on a bounded face are open; curves that wind around a periodic
/// axis are reported as open as well since they do not close in space.
pub fn extract_intersection_curves(u: &ScalarField, v: &ScalarField, pair: IsoPair) -> CurveSet {
    let grid = *u.grid();
    debug_assert_eq!(grid, *v.grid());
    if !(pair.u0 > u.min() && pair.u0 < u.max() && pair.v0 > v.min() && pair.v0 < v.max()) {
        return CurveSet::default();
    }
    let n = grid.n();
    let cells = grid
        .axes()
        .map(|kind| if kind == AxisKind::Periodic { n } else { n - 1 });
    let scales = (field_scale(u), field_scale(v));
    let (uv, vv) = (u.values(), v.values());

    let slabs: Vec<(Vec<Segment>, usize)> = (0..cells[2])
        .into_par_iter()
        .map(|k| {
            let mut segs = Vec::new();
            let mut defects = 0;
            for j in 0..cells[1] {
                for i in 0..cells[0] {
                    defects += cell_segments(&grid, uv, vv, pair, scales, [i, j, k], &mut segs);
                }
            }
            (segs, defects)
        })
        .collect();
    let mut segments = Vec::new();
    let mut defects = 0;
    for (s, d) in slabs {
        segments.extend(s);
        defects += d;
    }
    let periods = [0, 1, 2].map(|d| match grid.axis_kind(d) {
        AxisKind::Periodic => Some(2.0 * grid.half_edge()),
        AxisKind::Bounded => None,
    });
    let (curves, chain_defects) = chain(&segments, periods, grid.min_spacing());
    CurveSet {
        curves,
        defects: defects + chain_defects,
    }
}

fn chain(segments: &[Segment], periods: [Option<f64>; 3], h: f64) -> (Vec<Polyline>, usize) {
    let mut incident: HashMap<FaceKey, Vec<(usize, usize)>> = HashMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for end in 0..2 {
            incident.entry(seg.keys[end]).or_default().push((s, end));
        }
    }
    let mut defects = incident.values().filter(|v| v.len() > 2).count();
    let mut used = vec![false; segments.len()];
    let mut curves = Vec::new();

    let align = |anchor: [f64; 3], p: [f64; 3]| -> [f64; 3] {
        let mut shift = [0.0; 3];
        for d in 0..3 {
            if let Some(period) = periods[d] {
                shift[d] = ((anchor[d] - p[d]) / period).round() * period;
            }
        }
        shift
    };

    let walk = |start: usize, start_end: usize, used: &mut Vec<bool>| -> Polyline {
        let mut points = vec![segments[start].points[start_end]];
        let mut shift = [0.0; 3];
        let (mut seg, mut entry) = (start, start_end);
        let start_key = segments[start].keys[start_end];
        let mut closed = false;
        loop {
            used[seg] = true;
            let exit = 1 - entry;
            let p = segments[seg].points[exit];
            let q = [0, 1, 2].map(|d| p[d] + shift[d]);
            let key = segments[seg].keys[exit];
            if key == start_key {
                closed = distance(q, points[0]) <= 1e-6 * h;
                if !closed {
                    // Wound around a periodic axis.
                    points.push(q);
                }
                break;
            }
            points.push(q);
            let next = incident
                .get(&key)
                .and_then(|list| list.iter().find(|&&(s, _)| s != seg && !used[s]).copied());
            match next {
                Some((s, e)) => {
                    let entry_point = segments[s].points[e];
                    shift = align(q, entry_point);
                    seg = s;
                    entry = e;
                }
                None => break,
            }
        }
        points.dedup_by(|a, b| distance(*a, *b) <= 1e-12 * h);
        if closed && points.len() > 1 && distance(points[0], *points.last().unwrap()) <= 1e-12 * h {
            points.pop();
        }
        Polyline { points, closed }
    };

    // Open chains first, starting from their free ends.
    for (s, seg) in segments.iter().enumerate() {
        for end in 0..2 {
            if !used[s] && incident[&seg.keys[end]].len() == 1 {
                curves.push(walk(s, end, &mut used));
            }
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            curves.push(walk(s, 0, &mut used));
        }
    }
    let before = curves.len();
    curves.retain(|c| !c.closed || c.points.len() >= 3);
    defects += before - curves.len();
    (curves, defects)
}
