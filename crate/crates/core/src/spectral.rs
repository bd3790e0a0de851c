//! FFT-based vector calculus: Coulomb-gauge inversion of a curl, Leray
//! projection, and spectral divergence/gradient.
//!
//! Periodic axes are transformed as they are. Bounded axes are zero-padded
//! to twice their node count first, which treats the field as isolated in a
//! box twice as large; the result is then restricted to the original nodes.
//! That padding is an approximation and its error is not hidden: the curl of
//! the returned potential only matches the input away from the walls.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::{cross, dot, AxisKind, Grid3, ScalarField, VectorField3};

/// Transform layout for one grid: padded sizes and angular wavenumbers.
struct SpectralBox {
    grid: Grid3,
    dims: [usize; 3],
    /// Wavenumber per axis index; `None` marks the Nyquist bin.
    k: [Vec<Option<f64>>; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl SpectralBox {
    fn new(grid: &Grid3) -> Self {
        let n = grid.n();
        let dims = [0, 1, 2].map(|a| match grid.axis_kind(a) {
            AxisKind::Periodic => n,
            AxisKind::Bounded => 2 * n,
        });
        let k = [0, 1, 2].map(|a| {
            let m = dims[a];
            let period = m as f64 * grid.spacing(a);
            (0..m)
                .map(|i| {
                    if m % 2 == 0 && i == m / 2 {
                        None
                    } else {
                        let s = if i <= m / 2 {
                            i as f64
                        } else {
                            i as f64 - m as f64
                        };
                        Some(2.0 * std::f64::consts::PI * s / period)
                    }
                })
                .collect()
        });
        let mut planner = FftPlanner::new();
        let forward = dims.map(|m| planner.plan_fft_forward(m));
        let inverse = dims.map(|m| planner.plan_fft_inverse(m));
        Self {
            grid: *grid,
            dims,
            k,
            forward,
            inverse,
        }
    }

    fn total(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    fn embed(&self, f: &ScalarField) -> Vec<Complex64> {
        let n = self.grid.n();
        let [nx, ny, _] = self.dims;
        let mut out = vec![Complex64::new(0.0, 0.0); self.total()];
        let vals = f.values();
        out.par_chunks_mut(nx * ny)
            .enumerate()
            .filter(|(k, _)| *k < n)
            .for_each(|(k, plane)| {
                for j in 0..n {
                    for i in 0..n {
                        plane[i + nx * j] = Complex64::new(vals[i + n * (j + n * k)], 0.0);
                    }
                }
            });
        out
    }

    fn restrict(&self, data: &[Complex64]) -> ScalarField {
        let n = self.grid.n();
        let [nx, ny, _] = self.dims;
        let scale = 1.0 / self.total() as f64;
        let mut vals = vec![0.0; self.grid.len()];
        vals.par_chunks_mut(n * n)
            .enumerate()
            .for_each(|(k, plane)| {
                for j in 0..n {
                    for i in 0..n {
                        plane[i + n * j] = data[i + nx * (j + ny * k)].re * scale;
                    }
                }
            });
        ScalarField::new(self.grid, vals).expect("restricted length matches grid")
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plans = if inverse {
            &self.inverse
        } else {
            &self.forward
        };
        let [nx, ny, nz] = self.dims;
        data.par_chunks_mut(nx)
            .for_each(|line| plans[0].process(line));
        data.par_chunks_mut(nx * ny).for_each(|plane| {
            let mut col = vec![Complex64::new(0.0, 0.0); ny];
            for i in 0..nx {
                for j in 0..ny {
                    col[j] = plane[i + nx * j];
                }
                plans[1].process(&mut col);
                for j in 0..ny {
                    plane[i + nx * j] = col[j];
                }
            }
        });
        let stride = nx * ny;
        let columns: Vec<Vec<Complex64>> = (0..stride)
            .into_par_iter()
            .map(|c| {
                let mut col: Vec<Complex64> = (0..nz).map(|k| data[c + stride * k]).collect();
                plans[2].process(&mut col);
                col
            })
            .collect();
        for (c, col) in columns.iter().enumerate() {
            for (k, v) in col.iter().enumerate() {
                data[c + stride * k] = *v;
            }
        }
    }

    fn forward(&self, f: &ScalarField) -> Vec<Complex64> {
        let mut d = self.embed(f);
        self.transform(&mut d, false);
        d
    }

    fn backward(&self, mut d: Vec<Complex64>) -> ScalarField {
        self.transform(&mut d, true);
        self.restrict(&d)
    }

    /// Wavevector of a flat spectral index, `None` on any Nyquist bin.
    #[inline]
    fn wavevector(&self, idx: usize) -> Option<[f64; 3]> {
        let [nx, ny, _] = self.dims;
        let i = idx % nx;
        let j = (idx / nx) % ny;
        let k = idx / (nx * ny);
        Some([self.k[0][i]?, self.k[1][j]?, self.k[2][k]?])
    }

    fn forward3(&self, w: &VectorField3) -> [Vec<Complex64>; 3] {
        [self.forward(&w.x), self.forward(&w.y), self.forward(&w.z)]
    }

    fn backward3(&self, hats: [Vec<Complex64>; 3]) -> VectorField3 {
        let [a, b, c] = hats;
        VectorField3 {
            x: self.backward(a),
            y: self.backward(b),
            z: self.backward(c),
        }
    }

    /// Applies a per-mode linear map to a 3-vector spectrum.
    fn map_vector(
        &self,
        hats: &mut [Vec<Complex64>; 3],
        f: impl Fn([f64; 3], [Complex64; 3]) -> [Complex64; 3] + Sync,
    ) {
        let [hx, hy, hz] = hats;
        hx.par_iter_mut()
            .zip(hy.par_iter_mut())
            .zip(hz.par_iter_mut())
            .enumerate()
            .for_each(|(idx, ((a, b), c))| {
                let out = match self.wavevector(idx) {
                    Some(k) => f(k, [*a, *b, *c]),
                    None => [Complex64::new(0.0, 0.0); 3],
                };
                *a = out[0];
                *b = out[1];
                *c = out[2];
            });
    }
}

fn ccross(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let re = cross(k, [v[0].re, v[1].re, v[2].re]);
    let im = cross(k, [v[0].im, v[1].im, v[2].im]);
    [0, 1, 2].map(|a| Complex64::new(re[a], im[a]))
}

/// Divergence-free vector potential `psi` with `curl psi = omega`:
/// `psi_hat(k) = i k x omega_hat(k) / |k|^2`, zero mean mode.
pub fn coulomb_potential(omega: &VectorField3) -> VectorField3 {
    let sb = SpectralBox::new(omega.grid());
    let mut hats = sb.forward3(omega);
    sb.map_vector(&mut hats, |k, w| {
        let k2 = dot(k, k);
        if k2 == 0.0 {
            return [Complex64::new(0.0, 0.0); 3];
        }
        let c = ccross(k, w);
        c.map(|z| Complex64::new(-z.im, z.re) / k2)
    });
    sb.backward3(hats)
}

/// Removes the longitudinal part of `w` (Leray projection).
pub fn solenoidal_projection(w: &VectorField3) -> VectorField3 {
    let sb = SpectralBox::new(w.grid());
    let mut hats = sb.forward3(w);
    sb.map_vector(&mut hats, |k, v| {
        let k2 = dot(k, k);
        if k2 == 0.0 {
            return v;
        }
        let kv = Complex64::new(
            dot(k, [v[0].re, v[1].re, v[2].re]),
            dot(k, [v[0].im, v[1].im, v[2].im]),
        ) / k2;
        [0, 1, 2].map(|a| v[a] - kv * k[a])
    });
    sb.backward3(hats)
}

/// Leray projection of `w` and the Coulomb potential of that projection,
/// both taken from one (padded) spectrum so that `curl psi = w_sol` holds on
/// the padded box before restriction.
pub fn solenoidal_and_potential(w: &VectorField3) -> (VectorField3, VectorField3) {
    let sb = SpectralBox::new(w.grid());
    let mut hats = sb.forward3(w);
    sb.map_vector(&mut hats, |k, v| {
        let k2 = dot(k, k);
        if k2 == 0.0 {
            return v;
        }
        let kv = Complex64::new(
            dot(k, [v[0].re, v[1].re, v[2].re]),
            dot(k, [v[0].im, v[1].im, v[2].im]),
        ) / k2;
        [0, 1, 2].map(|a| v[a] - kv * k[a])
    });
    let mut pot = hats.clone();
    sb.map_vector(&mut pot, |k, v| {
        let k2 = dot(k, k);
        if k2 == 0.0 {
            return [Complex64::new(0.0, 0.0); 3];
        }
        ccross(k, v).map(|z| Complex64::new(-z.im, z.re) / k2)
    });
    (sb.backward3(hats), sb.backward3(pot))
}

/// Spectral divergence `i k . w_hat`.
pub fn spectral_divergence(w: &VectorField3) -> ScalarField {
    let sb = SpectralBox::new(w.grid());
    let hats = sb.forward3(w);
    let out: Vec<Complex64> = (0..sb.total())
        .into_par_iter()
        .map(|idx| match sb.wavevector(idx) {
            Some(k) => {
                let s = hats[0][idx] * k[0] + hats[1][idx] * k[1] + hats[2][idx] * k[2];
                Complex64::new(-s.im, s.re)
            }
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    sb.backward(out)
}

/// Spectral curl `i k x w_hat`.
pub fn spectral_curl(w: &VectorField3) -> VectorField3 {
    let sb = SpectralBox::new(w.grid());
    let mut hats = sb.forward3(w);
    sb.map_vector(&mut hats, |k, v| {
        ccross(k, v).map(|z| Complex64::new(-z.im, z.re))
    });
    sb.backward3(hats)
}

/// Spectral gradient `i k f_hat`.
pub fn spectral_gradient(f: &ScalarField) -> VectorField3 {
    let sb = SpectralBox::new(f.grid());
    let hat = sb.forward(f);
    let comp = |a: usize| {
        let d: Vec<Complex64> = hat
            .par_iter()
            .enumerate()
            .map(|(idx, z)| match sb.wavevector(idx) {
                Some(k) => Complex64::new(-z.im, z.re) * k[a],
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        sb.backward(d)
    };
    VectorField3 {
        x: comp(0),
        y: comp(1),
        z: comp(2),
    }
}
