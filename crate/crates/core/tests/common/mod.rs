#![allow(dead_code)]

use knotmedia::dynamics::{
    equilibrium_state, hopf_initial_condition, HopfICParams, MediumState, ModelParams,
};
use knotmedia::grid::{BoundarySpec, Grid3, ScalarField, VectorField3};

/// Reference box: L = 5, walls pinned at the model equilibrium.
pub fn reference_setup(n: usize) -> (MediumState, ModelParams, BoundarySpec) {
    let g = Grid3::bounded(5.0, n).unwrap();
    let p = ModelParams::default();
    let (ue, ve) = equilibrium_state(&p).unwrap();
    let bc = BoundarySpec::all_dirichlet(ue, ve);
    let mut s = hopf_initial_condition(&g, &HopfICParams::default());
    s.pin_boundary(&bc);
    (s, p, bc)
}

/// Nodes at least `margin` nodes away from every bounded wall.
pub fn interior_mask(g: &Grid3, margin: usize) -> Vec<bool> {
    let n = g.n();
    (0..g.len())
        .map(|idx| {
            let ijk = g.ijk(idx);
            (0..3).all(|a| {
                g.axis_kind(a) == knotmedia::AxisKind::Periodic
                    || (ijk[a] >= margin && ijk[a] + margin < n)
            })
        })
        .collect()
}

/// Grows a node mask by `radius` nodes in each direction (box neighbourhood).
pub fn dilate(g: &Grid3, mask: &[bool], radius: usize) -> Vec<bool> {
    let n = g.n() as isize;
    let r = radius as isize;
    let mut out = mask.to_vec();
    for idx in (0..g.len()).filter(|&i| mask[i]) {
        let [i, j, k] = g.ijk(idx).map(|c| c as isize);
        for dk in -r..=r {
            for dj in -r..=r {
                for di in -r..=r {
                    let (a, b, c) = (i + di, j + dj, k + dk);
                    if (0..n).contains(&a) && (0..n).contains(&b) && (0..n).contains(&c) {
                        out[g.index(a as usize, b as usize, c as usize)] = true;
                    }
                }
            }
        }
    }
    out
}

/// `||a - b||_2 / ||b||_2` over nodes where `keep` is true.
pub fn rel_l2(a: &VectorField3, b: &VectorField3, keep: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (idx, &k) in keep.iter().enumerate() {
        if !k {
            continue;
        }
        let (x, y) = (a.at_index(idx), b.at_index(idx));
        for d in 0..3 {
            num += (x[d] - y[d]).powi(2);
            den += y[d].powi(2);
        }
    }
    (num / den).sqrt()
}

/// Root mean square of `f` over nodes where `keep` is true.
pub fn rms_masked(f: &ScalarField, keep: &[bool]) -> f64 {
    let (mut s, mut c) = (0.0, 0usize);
    for (v, &k) in f.values().iter().zip(keep) {
        if k {
            s += v * v;
            c += 1;
        }
    }
    (s / c as f64).sqrt()
}

pub fn rms_vec_masked(w: &VectorField3, keep: &[bool]) -> f64 {
    let (mut s, mut c) = (0.0, 0usize);
    for (idx, &k) in keep.iter().enumerate() {
        if k {
            let v = w.at_index(idx);
            s += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            c += 1;
        }
    }
    (s / c as f64).sqrt()
}

/// Deterministic smooth periodic field on `[-pi, pi]^3` built from a few
/// low Fourier modes, none of them constant.
pub fn smooth_periodic(g: &Grid3, seed: u64) -> ScalarField {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let modes: Vec<([f64; 3], f64, f64)> = (0..8)
        .map(|_| {
            let mut k = [0, 1, 2].map(|_| (next() * 2.5).round());
            if k == [0.0; 3] {
                k[0] = 1.0;
            }
            (k, next(), next() * std::f64::consts::PI)
        })
        .collect();
    ScalarField::from_fn(*g, move |x, y, z| {
        modes
            .iter()
            .map(|(k, a, ph)| a * (k[0] * x + k[1] * y + k[2] * z + ph).sin())
            .sum()
    })
}
