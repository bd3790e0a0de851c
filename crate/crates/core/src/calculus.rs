//! Second-order finite-difference kernels and trapezoidal quadrature.
//!
//! Interior nodes use centred differences. Walls marked [`Wall::OneSided`]
//! use second-order one-sided formulas, [`Wall::Mirror`] walls use a mirror
//! ghost node, and periodic axes wrap.

use rayon::prelude::*;

use crate::grid::{AxisKind, AxisRule, BoundarySpec, Face, Grid3, ScalarField, VectorField3, Wall};

#[inline]
fn first_1d(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64, rule: AxisRule) -> f64 {
    match rule {
        AxisRule::Periodic => {
            let ip = if i + 1 == n { 0 } else { i + 1 };
            let im = if i == 0 { n - 1 } else { i - 1 };
            (f(ip) - f(im)) / (2.0 * h)
        }
        AxisRule::Bounded { lower, upper } => {
            if i == 0 {
                match lower {
                    Wall::OneSided => (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h),
                    Wall::Mirror => 0.0,
                }
            } else if i == n - 1 {
                match upper {
                    Wall::OneSided => (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h),
                    Wall::Mirror => 0.0,
                }
            } else {
                (f(i + 1) - f(i - 1)) / (2.0 * h)
            }
        }
    }
}

#[inline]
fn second_1d(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64, rule: AxisRule) -> f64 {
    let h2 = h * h;
    match rule {
        AxisRule::Periodic => {
            let ip = if i + 1 == n { 0 } else { i + 1 };
            let im = if i == 0 { n - 1 } else { i - 1 };
            (f(ip) - 2.0 * f(i) + f(im)) / h2
        }
        AxisRule::Bounded { lower, upper } => {
            if i == 0 {
                match lower {
                    Wall::OneSided => (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2,
                    Wall::Mirror => 2.0 * (f(1) - f(0)) / h2,
                }
            } else if i == n - 1 {
                match upper {
                    Wall::OneSided => {
                        (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2
                    }
                    Wall::Mirror => 2.0 * (f(n - 2) - f(n - 1)) / h2,
                }
            } else {
                (f(i + 1) - 2.0 * f(i) + f(i - 1)) / h2
            }
        }
    }
}

/// Applies `kernel` to every node, parallel over z-planes.
fn per_node(grid: &Grid3, kernel: impl Fn(usize, usize, usize) -> f64 + Sync) -> ScalarField {
    let n = grid.n();
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(n * n)
        .enumerate()
        .for_each(|(k, plane)| {
            for j in 0..n {
                for i in 0..n {
                    plane[i + n * j] = kernel(i, j, k);
                }
            }
        });
    ScalarField::new(*grid, out).expect("length matches grid")
}

/// First derivative of `f` along `axis`.
pub fn partial(f: &ScalarField, axis: usize, rules: &[AxisRule; 3]) -> ScalarField {
    let grid = *f.grid();
    let n = grid.n();
    let h = grid.spacing(axis);
    let vals = f.values();
    let rule = rules[axis];
    per_node(&grid, |i, j, k| match axis {
        0 => first_1d(|a| vals[grid.index(a, j, k)], i, n, h, rule),
        1 => first_1d(|a| vals[grid.index(i, a, k)], j, n, h, rule),
        _ => first_1d(|a| vals[grid.index(i, j, a)], k, n, h, rule),
    })
}

pub fn gradient_with(f: &ScalarField, rules: &[AxisRule; 3]) -> VectorField3 {
    VectorField3 {
        x: partial(f, 0, rules),
        y: partial(f, 1, rules),
        z: partial(f, 2, rules),
    }
}

/// Gradient honouring the wall treatment implied by `bc`.
pub fn gradient(f: &ScalarField, bc: &BoundarySpec) -> VectorField3 {
    gradient_with(f, &bc.rules())
}

pub fn laplacian_with(f: &ScalarField, rules: &[AxisRule; 3]) -> ScalarField {
    let grid = *f.grid();
    let n = grid.n();
    let h = [grid.spacing(0), grid.spacing(1), grid.spacing(2)];
    let vals = f.values();
    per_node(&grid, |i, j, k| {
        second_1d(|a| vals[grid.index(a, j, k)], i, n, h[0], rules[0])
            + second_1d(|a| vals[grid.index(i, a, k)], j, n, h[1], rules[1])
            + second_1d(|a| vals[grid.index(i, j, a)], k, n, h[2], rules[2])
    })
}

/// Seven-point Laplacian honouring the wall treatment implied by `bc`.
pub fn laplacian(f: &ScalarField, bc: &BoundarySpec) -> ScalarField {
    laplacian_with(f, &bc.rules())
}

/// Divergence with one-sided walls on bounded axes.
pub fn divergence(w: &VectorField3) -> ScalarField {
    let rules = AxisRule::for_grid(w.grid());
    let dx = partial(&w.x, 0, &rules);
    let dy = partial(&w.y, 1, &rules);
    let dz = partial(&w.z, 2, &rules);
    let s = dx.zip_map(&dy, |a, b| a + b);
    s.zip_map(&dz, |a, b| a + b)
}

/// Curl with one-sided walls on bounded axes.
pub fn curl(w: &VectorField3) -> VectorField3 {
    let rules = AxisRule::for_grid(w.grid());
    let d = |f: &ScalarField, a| partial(f, a, &rules);
    VectorField3 {
        x: d(&w.z, 1).zip_map(&d(&w.y, 2), |a, b| a - b),
        y: d(&w.x, 2).zip_map(&d(&w.z, 0), |a, b| a - b),
        z: d(&w.y, 0).zip_map(&d(&w.x, 1), |a, b| a - b),
    }
}

/// Trapezoidal weights along one axis (full weight when periodic).
pub fn axis_weights(grid: &Grid3, axis: usize) -> Vec<f64> {
    let n = grid.n();
    let h = grid.spacing(axis);
    let mut w = vec![h; n];
    if grid.axis_kind(axis) == AxisKind::Bounded {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Trapezoidal volume quadrature over the whole box.
pub fn volume_integral(f: &ScalarField) -> f64 {
    let grid = *f.grid();
    let n = grid.n();
    let [wx, wy, wz] = [0, 1, 2].map(|a| axis_weights(&grid, a));
    // Per-plane partial sums, then a fixed-order total for reproducibility.
    let planes: Vec<f64> = f
        .values()
        .par_chunks(n * n)
        .enumerate()
        .map(|(k, plane)| {
            let mut acc = 0.0;
            for j in 0..n {
                let row = &plane[n * j..n * (j + 1)];
                let s: f64 = row.iter().zip(&wx).map(|(v, w)| v * w).sum();
                acc += wy[j] * s;
            }
            wz[k] * acc
        })
        .collect();
    planes.iter().sum()
}

/// Node-plane index carrying `face`. Periodic faces share plane 0.
pub fn face_plane(grid: &Grid3, face: Face) -> usize {
    if face.is_upper() && grid.axis_kind(face.axis()) == AxisKind::Bounded {
        grid.n() - 1
    } else {
        0
    }
}

/// 2D trapezoidal integral of the node values on one face.
pub fn face_integral(g: &ScalarField, face: Face) -> f64 {
    let grid = *g.grid();
    let n = grid.n();
    let axis = face.axis();
    let (a, b) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let wa = axis_weights(&grid, a);
    let wb = axis_weights(&grid, b);
    let plane = face_plane(&grid, face);
    let mut total = 0.0;
    for jb in 0..n {
        let mut row = 0.0;
        for ja in 0..n {
            let mut ijk = [0usize; 3];
            ijk[axis] = plane;
            ijk[a] = ja;
            ijk[b] = jb;
            row += wa[ja] * g.at(ijk[0], ijk[1], ijk[2]);
        }
        total += wb[jb] * row;
    }
    total
}

/// Sum of [`face_integral`] over `faces`.
pub fn surface_integral(g: &ScalarField, faces: &[Face]) -> f64 {
    faces.iter().map(|&f| face_integral(g, f)).sum()
}

/// Outward flux of `w` through one face.
pub fn face_flux(w: &VectorField3, face: Face) -> f64 {
    face.outward_sign() * face_integral(w.component(face.axis()), face)
}
