//! Marching-cubes level surfaces.

use std::collections::HashMap;

use crate::grid::{cross, Grid3, ScalarField};
use crate::mc_tables::{EDGE_CORNERS, TRI_TABLE};

/// Triangle soup with shared vertices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = cross(e1, e2);
        0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }
}

const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Field value with exact level hits pushed just above the level, so no
/// vertex lands exactly on a grid node.
#[inline]
pub(crate) fn nudged(value: f64, level: f64, scale: f64) -> f64 {
    if value == level {
        level + 1e-12 * scale
    } else {
        value
    }
}

pub(crate) fn field_scale(f: &ScalarField) -> f64 {
    let s = f.max_abs();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Level surface `f = level` over the cells strictly inside the node range
/// (cells that wrap across a periodic seam are skipped). Vertices on shared
/// cell edges are merged; triangles with area below `1e-12 h^2` are dropped.
pub fn extract_isosurface(f: &ScalarField, level: f64) -> TriMesh {
    let mut mesh = TriMesh::default();
    if !(level > f.min() && level < f.max()) {
        return mesh;
    }
    let grid: Grid3 = *f.grid();
    let n = grid.n();
    let scale = field_scale(f);
    let vals = f.values();
    let value = |i: usize, j: usize, k: usize| nudged(vals[grid.index(i, j, k)], level, scale);
    let min_area = 1e-12 * grid.min_spacing().powi(2);

    let mut edge_vertex: HashMap<(usize, usize), usize> = HashMap::new();
    for k in 0..n - 1 {
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let corner = CORNERS.map(|c| [i + c[0], j + c[1], k + c[2]]);
                let cv = corner.map(|c| value(c[0], c[1], c[2]));
                let mut case = 0usize;
                for (bit, v) in cv.iter().enumerate() {
                    if *v < level {
                        case |= 1 << bit;
                    }
                }
                if case == 0 || case == 255 {
                    continue;
                }
                let row = &TRI_TABLE[case];
                let mut local = [usize::MAX; 12];
                for t in row.chunks(3) {
                    if t[0] < 0 {
                        break;
                    }
                    let tri = [t[0], t[1], t[2]].map(|e| {
                        let e = e as usize;
                        if local[e] == usize::MAX {
                            let (a, b) = EDGE_CORNERS[e];
                            let (lo, hi) = if grid.index(corner[a][0], corner[a][1], corner[a][2])
                                < grid.index(corner[b][0], corner[b][1], corner[b][2])
                            {
                                (a, b)
                            } else {
                                (b, a)
                            };
                            let axis = (0..3).find(|&d| corner[lo][d] != corner[hi][d]).unwrap();
                            let key = (
                                grid.index(corner[lo][0], corner[lo][1], corner[lo][2]),
                                axis,
                            );
                            local[e] = *edge_vertex.entry(key).or_insert_with(|| {
                                let s = (level - cv[lo]) / (cv[hi] - cv[lo]);
                                let pa = grid.point(corner[lo][0], corner[lo][1], corner[lo][2]);
                                let pb = grid.point(corner[hi][0], corner[hi][1], corner[hi][2]);
                                mesh.vertices
                                    .push([0, 1, 2].map(|d| pa[d] + s * (pb[d] - pa[d])));
                                mesh.vertices.len() - 1
                            });
                        }
                        local[e]
                    });
                    if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                        continue;
                    }
                    mesh.triangles.push(tri);
                    if mesh.triangle_area(mesh.triangles.len() - 1) <= min_area {
                        mesh.triangles.pop();
                    }
                }
            }
        }
    }
    mesh
}
