//! Phase representation of the medium and its helicity diagnostics.
//!
//! `(u, v)` are mapped affinely to `(U, V)` inside the disk `U^2 + V^2 <= 1`,
//! with polar form `p = |(U, V)|`, `q = atan2(V, U)`. The complex field
//! `phi = sqrt((1 - p)/p) e^{iq}` defines
//!
//! ```text
//! Omega = grad phi x grad phi* / (2 pi i (1 + |phi|^2)^2) = grad U x grad V / (2 pi p)
//! ```
//!
//! whose field lines are the intersections of `u` and `v` level surfaces.
//! Production code works with the right-hand form; [`phi_forms`] keeps the
//! complex expressions for cross-checking.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::calculus::{face_flux, gradient, volume_integral};
use crate::dynamics::MediumState;
use crate::error::{Error, Result};
use crate::grid::{cross, AxisKind, BoundarySpec, Face, ScalarField, VectorField3};
use crate::spectral;

/// Fixed `(u, v)` window mapped onto the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRanges {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl NormalizationRanges {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        let r = Self {
            u_min,
            u_max,
            v_min,
            v_max,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.u_min, self.u_max, self.v_min, self.v_max]
            .iter()
            .all(|v| v.is_finite())
            && self.u_max > self.u_min
            && self.v_max > self.v_min;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid normalization ranges {self:?}"
            )))
        }
    }

    /// Extremes of `s`, each widened by `expand` times its span on both sides.
    pub fn from_state(s: &MediumState, expand: f64) -> Result<Self> {
        let widen = |lo: f64, hi: f64| {
            let span = hi - lo;
            let pad = if span > 0.0 { expand * span } else { 1.0 };
            (lo - pad, hi + pad)
        };
        let (u_min, u_max) = widen(s.u.min(), s.u.max());
        let (v_min, v_max) = widen(s.v.min(), s.v.max());
        Self::new(u_min, u_max, v_min, v_max)
    }

    /// `dU/du`.
    pub fn u_scale(&self) -> f64 {
        SQRT_2 / (self.u_max - self.u_min)
    }

    pub fn v_scale(&self) -> f64 {
        SQRT_2 / (self.v_max - self.v_min)
    }

    /// `U` for an excitation value already inside the window.
    #[inline]
    pub fn map_u(&self, u: f64) -> f64 {
        (2.0 * (u - self.u_min) / (self.u_max - self.u_min) - 1.0) / SQRT_2
    }

    #[inline]
    pub fn map_v(&self, v: f64) -> f64 {
        (2.0 * (v - self.v_min) / (self.v_max - self.v_min) - 1.0) / SQRT_2
    }
}

/// Default regularization `max(1e-6, h^2)`.
pub fn default_p_reg(min_spacing: f64) -> f64 {
    (min_spacing * min_spacing).max(1e-6)
}

/// Normalized phase variables on the grid.
#[derive(Debug, Clone)]
pub struct PhaseField {
    pub big_u: ScalarField,
    pub big_v: ScalarField,
    pub p: ScalarField,
    /// `true` where `p < p_reg`.
    pub singular: Vec<bool>,
    /// Nodes where `u` or `v` fell outside the window and was clamped.
    pub clamp_count: usize,
    /// Per-node flags: `(u clamped, v clamped)`.
    pub clamped: Vec<(bool, bool)>,
    pub p_reg: f64,
}

impl PhaseField {
    #[inline]
    pub fn q(&self, idx: usize) -> f64 {
        self.big_v.values()[idx].atan2(self.big_u.values()[idx])
    }
}

/// Maps a state into the unit disk. Out-of-window values are clamped and
/// counted rather than rejected.
pub fn normalize_uv(s: &MediumState, r: &NormalizationRanges, p_reg: f64) -> PhaseField {
    let grid = *s.grid();
    let mapped: Vec<(f64, f64, bool, bool)> =
        s.u.values()
            .par_iter()
            .zip(s.v.values().par_iter())
            .map(|(&u, &v)| {
                let uc = u.clamp(r.u_min, r.u_max);
                let vc = v.clamp(r.v_min, r.v_max);
                (r.map_u(uc), r.map_v(vc), uc != u, vc != v)
            })
            .collect();
    let big_u: Vec<f64> = mapped.iter().map(|m| m.0).collect();
    let big_v: Vec<f64> = mapped.iter().map(|m| m.1).collect();
    let clamped: Vec<(bool, bool)> = mapped.iter().map(|m| (m.2, m.3)).collect();
    let clamp_count = clamped.iter().filter(|c| c.0 || c.1).count();
    let p: Vec<f64> = big_u.iter().zip(&big_v).map(|(a, b)| a.hypot(*b)).collect();
    let singular = p.iter().map(|&p| p < p_reg).collect();
    PhaseField {
        big_u: ScalarField::new(grid, big_u).expect("grid length"),
        big_v: ScalarField::new(grid, big_v).expect("grid length"),
        p: ScalarField::new(grid, p).expect("grid length"),
        singular,
        clamp_count,
        clamped,
        p_reg,
    }
}

/// `phi` at every node; `None` on the singular mask.
pub fn phi_field(pf: &PhaseField) -> Vec<Option<Complex64>> {
    (0..pf.p.values().len())
        .into_par_iter()
        .map(|i| {
            if pf.singular[i] {
                None
            } else {
                Some(phi_forms::phi(pf.big_u.values()[i], pf.big_v.values()[i]))
            }
        })
        .collect()
}

/// `Omega = grad U x grad V / (2 pi max(p, p_reg))`.
pub fn omega_field(pf: &PhaseField, bc: &BoundarySpec) -> VectorField3 {
    let gu = gradient(&pf.big_u, bc);
    let gv = gradient(&pf.big_v, bc);
    let grid = *pf.p.grid();
    VectorField3::from_nodes(grid, |i| {
        let c = cross(gu.at_index(i), gv.at_index(i));
        let denom = 2.0 * PI * pf.p.values()[i].max(pf.p_reg);
        c.map(|x| x / denom)
    })
}

/// Coulomb-gauge potential of `omega`. Bounded axes are zero-padded.
pub fn vector_potential_coulomb(omega: &VectorField3) -> VectorField3 {
    spectral::coulomb_potential(omega)
}

/// `H = integral of psi . omega` over the box.
pub fn helicity(psi: &VectorField3, omega: &VectorField3) -> f64 {
    volume_integral(&psi.dot(omega))
}

/// Coulomb-gauge helicity of `omega`. The field is first projected onto its
/// divergence-free part so that the result is unchanged under
/// `psi -> psi + grad chi` on periodic boxes.
pub fn coulomb_helicity(omega: &VectorField3) -> (f64, VectorField3, VectorField3) {
    let (sol, psi) = spectral::solenoidal_and_potential(omega);
    (helicity(&psi, &sol), psi, sol)
}

/// `grad q = (U grad V - V grad U) / max(p^2, p_reg^2)` and `grad p`.
fn phase_gradients(pf: &PhaseField, bc: &BoundarySpec) -> (VectorField3, VectorField3) {
    let gu = gradient(&pf.big_u, bc);
    let gv = gradient(&pf.big_v, bc);
    let grid = *pf.p.grid();
    let reg2 = pf.p_reg * pf.p_reg;
    let gq = VectorField3::from_nodes(grid, |i| {
        let (a, b) = (pf.big_u.values()[i], pf.big_v.values()[i]);
        let p = pf.p.values()[i];
        let (du, dv) = (gu.at_index(i), gv.at_index(i));
        let d = (p * p).max(reg2);
        [0, 1, 2].map(|k| (a * dv[k] - b * du[k]) / d)
    });
    let gp = VectorField3::from_nodes(grid, |i| {
        let (a, b) = (pf.big_u.values()[i], pf.big_v.values()[i]);
        let p = pf.p.values()[i].max(pf.p_reg);
        let (du, dv) = (gu.at_index(i), gv.at_index(i));
        [0, 1, 2].map(|k| (a * du[k] + b * dv[k]) / p)
    });
    (gq, gp)
}

/// Closed-form potential `(p - 1) grad q / (2 pi)`, the gauge whose time
/// derivative is [`dpsi_dt`].
pub fn analytic_potential(pf: &PhaseField, bc: &BoundarySpec) -> VectorField3 {
    let (gq, _) = phase_gradients(pf, bc);
    let grid = *pf.p.grid();
    VectorField3::from_nodes(grid, |i| {
        let s = (pf.p.values()[i] - 1.0) / (2.0 * PI);
        gq.at_index(i).map(|c| s * c)
    })
}

/// `d psi/dt = (p_t grad q - q_t grad p) / (2 pi)` from the medium rates.
/// Clamped nodes do not move in `(U, V)`.
pub fn dpsi_dt(
    pf: &PhaseField,
    rates: (&ScalarField, &ScalarField),
    r: &NormalizationRanges,
    bc: &BoundarySpec,
) -> VectorField3 {
    let (gq, gp) = phase_gradients(pf, bc);
    let grid = *pf.p.grid();
    let (su, sv) = (r.u_scale(), r.v_scale());
    let reg2 = pf.p_reg * pf.p_reg;
    VectorField3::from_nodes(grid, |i| {
        let (cu, cv) = pf.clamped[i];
        let ut = if cu { 0.0 } else { su * rates.0.values()[i] };
        let vt = if cv { 0.0 } else { sv * rates.1.values()[i] };
        let (a, b) = (pf.big_u.values()[i], pf.big_v.values()[i]);
        let p = pf.p.values()[i];
        let pt = (a * ut + b * vt) / p.max(pf.p_reg);
        let qt = (a * vt - b * ut) / (p * p).max(reg2);
        let (q, pg) = (gq.at_index(i), gp.at_index(i));
        [0, 1, 2].map(|k| (pt * q[k] - qt * pg[k]) / (2.0 * PI))
    })
}

/// Boundary helicity flux, total and per face (in [`Face::ALL`] order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport {
    pub total: f64,
    pub per_face: [f64; 6],
}

/// `integral over S of psi . (n x d psi/dt) dS`, evaluated face by face as
/// the outward flux of `d psi/dt x psi`. Periodic faces are reported as the
/// net contribution of their pair split evenly, which is exactly zero.
pub fn helicity_flux(psi: &VectorField3, dpsi: &VectorField3, bc: &BoundarySpec) -> FluxReport {
    let integrand = dpsi.cross(psi);
    let mut per_face = Face::ALL.map(|f| face_flux(&integrand, f) + 0.0);
    for axis in 0..3 {
        if integrand.grid().axis_kind(axis) == AxisKind::Periodic
            || bc.faces[2 * axis].is_periodic()
        {
            let net = per_face[2 * axis] + per_face[2 * axis + 1];
            per_face[2 * axis] = 0.5 * net;
            per_face[2 * axis + 1] = 0.5 * net;
        }
    }
    FluxReport {
        total: per_face.iter().sum(),
        per_face,
    }
}

/// Helicity and its boundary flux at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicityRecord {
    pub t: f64,
    pub helicity: f64,
    pub flux: f64,
    pub per_face_flux: [f64; 6],
    pub clamp_count: usize,
}

/// Convenience bundle: phase field, Coulomb helicity and boundary flux.
pub fn helicity_record(
    s: &MediumState,
    rates: (&ScalarField, &ScalarField),
    r: &NormalizationRanges,
    p_reg: f64,
    bc: &BoundarySpec,
) -> HelicityRecord {
    let pf = normalize_uv(s, r, p_reg);
    let omega = omega_field(&pf, bc);
    let (h, _, _) = coulomb_helicity(&omega);
    let psi_a = analytic_potential(&pf, bc);
    let dpsi = dpsi_dt(&pf, rates, r, bc);
    let flux = helicity_flux(&psi_a, &dpsi, bc);
    HelicityRecord {
        t: s.t,
        helicity: h,
        flux: flux.total,
        per_face_flux: flux.per_face,
        clamp_count: pf.clamp_count,
    }
}

/// Pointwise complex-field expressions, kept for validating the reduced
/// `(U, V, p)` forms used on the grid.
pub mod phi_forms {
    use super::*;

    /// `phi = sqrt((1 - p)/p) e^{iq}`.
    pub fn phi(big_u: f64, big_v: f64) -> Complex64 {
        let p = big_u.hypot(big_v);
        let q = big_v.atan2(big_u);
        Complex64::from_polar(((1.0 - p) / p).sqrt(), q)
    }

    /// `grad phi x grad phi* / (2 pi i (1 + |phi|^2)^2)`; purely real.
    pub fn omega(phi: Complex64, grad_phi: [Complex64; 3]) -> [f64; 3] {
        let gc = grad_phi.map(|z| z.conj());
        let c = [
            grad_phi[1] * gc[2] - grad_phi[2] * gc[1],
            grad_phi[2] * gc[0] - grad_phi[0] * gc[2],
            grad_phi[0] * gc[1] - grad_phi[1] * gc[0],
        ];
        let w = 1.0 + phi.norm_sqr();
        let denom = Complex64::new(0.0, 2.0 * PI * w * w);
        c.map(|z| (z / denom).re)
    }

    /// `-(phi*_t grad phi - phi_t grad phi*) / (2 pi i (1 + |phi|^2)^2)`.
    pub fn dpsi_dt(phi: Complex64, phi_t: Complex64, grad_phi: [Complex64; 3]) -> [f64; 3] {
        let w = 1.0 + phi.norm_sqr();
        let denom = Complex64::new(0.0, 2.0 * PI * w * w);
        [0, 1, 2].map(|k| {
            let num = phi_t.conj() * grad_phi[k] - phi_t * grad_phi[k].conj();
            (-num / denom).re
        })
    }

    /// Reduced `grad U x grad V / (2 pi p)` at one point.
    pub fn omega_reduced(big_u: f64, big_v: f64, grad_u: [f64; 3], grad_v: [f64; 3]) -> [f64; 3] {
        let p = big_u.hypot(big_v);
        cross(grad_u, grad_v).map(|c| c / (2.0 * PI * p))
    }

    /// Reduced `(p_t grad q - q_t grad p) / (2 pi)` at one point.
    pub fn dpsi_dt_reduced(
        (big_u, big_v): (f64, f64),
        (u_t, v_t): (f64, f64),
        grad_u: [f64; 3],
        grad_v: [f64; 3],
    ) -> [f64; 3] {
        let p = big_u.hypot(big_v);
        let pt = (big_u * u_t + big_v * v_t) / p;
        let qt = (big_u * v_t - big_v * u_t) / (p * p);
        [0, 1, 2].map(|k| {
            let gq = (big_u * grad_v[k] - big_v * grad_u[k]) / (p * p);
            let gp = (big_u * grad_u[k] + big_v * grad_v[k]) / p;
            (pt * gq - qt * gp) / (2.0 * PI)
        })
    }
}
