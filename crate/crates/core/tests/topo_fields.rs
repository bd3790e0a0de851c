mod common;

use std::f64::consts::PI;

use knotmedia::calculus::{curl, divergence};
use knotmedia::dynamics::MediumState;
use knotmedia::grid::{AxisKind, BoundarySpec, Grid3, ScalarField, VectorField3};
use knotmedia::spectral::{
    solenoidal_projection, spectral_curl, spectral_divergence, spectral_gradient,
};
use knotmedia::topo::phi_forms;
use knotmedia::topo::{
    analytic_potential, coulomb_helicity, default_p_reg, dpsi_dt, helicity, helicity_flux,
    normalize_uv, omega_field, vector_potential_coulomb, NormalizationRanges,
};
use num_complex::Complex64;

/// Smooth analytic `(U, V)` away from the phase singularity.
fn big_uv(x: f64, y: f64, z: f64) -> (f64, f64) {
    (
        0.3 + 0.2 * (x + 0.5 * z).sin(),
        0.25 * (y - 0.3 * x).cos() + 0.1 * z,
    )
}

fn grad_num(f: impl Fn(f64, f64, f64) -> f64, p: [f64; 3]) -> [f64; 3] {
    let e = 1e-5;
    [0, 1, 2].map(|d| {
        let (mut a, mut b) = (p, p);
        a[d] += e;
        b[d] -= e;
        (f(a[0], a[1], a[2]) - f(b[0], b[1], b[2])) / (2.0 * e)
    })
}

fn grad_phi(p: [f64; 3], uv: impl Fn(f64, f64, f64) -> (f64, f64)) -> [Complex64; 3] {
    let e = 1e-5;
    [0, 1, 2].map(|d| {
        let (mut a, mut b) = (p, p);
        a[d] += e;
        b[d] -= e;
        let (ua, va) = uv(a[0], a[1], a[2]);
        let (ub, vb) = uv(b[0], b[1], b[2]);
        (phi_forms::phi(ua, va) - phi_forms::phi(ub, vb)) / (2.0 * e)
    })
}

fn rel(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d: f64 = (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt();
    let n: f64 = (0..3).map(|k| b[k].powi(2)).sum::<f64>().sqrt();
    d / n
}

#[test]
fn reduced_omega_matches_complex_form() {
    for i in 0..50 {
        let t = i as f64 * 0.37;
        let p = [t.sin(), (1.3 * t).cos(), 0.5 * (0.7 * t).sin()];
        let (u, v) = big_uv(p[0], p[1], p[2]);
        let gu = grad_num(|x, y, z| big_uv(x, y, z).0, p);
        let gv = grad_num(|x, y, z| big_uv(x, y, z).1, p);
        let reduced = phi_forms::omega_reduced(u, v, gu, gv);
        let full = phi_forms::omega(phi_forms::phi(u, v), grad_phi(p, big_uv));
        assert!(rel(full, reduced) < 1e-6, "{full:?} vs {reduced:?}");
    }
}

#[test]
fn reduced_rate_matches_complex_form() {
    let omega_t = 1.7;
    for i in 0..50 {
        let s = i as f64 * 0.41;
        let p = [s.cos(), (0.9 * s).sin(), 0.4 * (1.1 * s).cos()];
        let t = 0.3 + 0.01 * i as f64;
        // Rotating phase with time-dependent amplitude.
        let uv = move |x: f64, y: f64, z: f64, t: f64| {
            let (a, b) = big_uv(x, y, z);
            let (c, sn) = ((omega_t * t).cos(), (omega_t * t).sin());
            let amp = 1.0 + 0.2 * (t * 0.5).sin();
            (amp * (c * a - sn * b), amp * (sn * a + c * b))
        };
        let (u, v) = uv(p[0], p[1], p[2], t);
        let e = 1e-6;
        let (ua, va) = uv(p[0], p[1], p[2], t + e);
        let (ub, vb) = uv(p[0], p[1], p[2], t - e);
        let (ut, vt) = ((ua - ub) / (2.0 * e), (va - vb) / (2.0 * e));
        let phi_t = (phi_forms::phi(ua, va) - phi_forms::phi(ub, vb)) / (2.0 * e);
        let gu = grad_num(|x, y, z| uv(x, y, z, t).0, p);
        let gv = grad_num(|x, y, z| uv(x, y, z, t).1, p);
        let reduced = phi_forms::dpsi_dt_reduced((u, v), (ut, vt), gu, gv);
        let full = phi_forms::dpsi_dt(
            phi_forms::phi(u, v),
            phi_t,
            grad_phi(p, |x, y, z| uv(x, y, z, t)),
        );
        assert!(rel(full, reduced) < 1e-6, "{full:?} vs {reduced:?}");
    }
}

#[test]
fn rate_and_potential_differ_by_a_gradient() {
    // U = g cos(wt), V = g sin(wt): the closed-form potential and the rate
    // field differ by grad((p - 1) q_t)/2pi, whose curl vanishes.
    let g = Grid3::periodic(PI, 32).unwrap();
    let bc = BoundarySpec::all_periodic();
    let r = NormalizationRanges::new(-1.0, 1.0, -1.0, 1.0).unwrap();
    let w = 0.9;
    let amp = |x: f64, y: f64, z: f64| 0.5 + 0.2 * x.sin() * y.cos() + 0.1 * z.sin();
    let state_at = |t: f64| {
        // Invert the normalization so that (U, V) is exactly the target.
        let s = 2f64.sqrt() / 2.0;
        let u = ScalarField::from_fn(g, |x, y, z| amp(x, y, z) * (w * t).cos() / s * 0.5);
        let v = ScalarField::from_fn(g, |x, y, z| amp(x, y, z) * (w * t).sin() / s * 0.5);
        MediumState::new(t, u, v).unwrap()
    };
    let t = 0.4;
    let s = state_at(t);
    let pf = normalize_uv(&s, &r, 1e-12);
    let rates = (
        ScalarField::from_fn(g, |x, y, z| {
            -w * amp(x, y, z) * (w * t).sin() * 2f64.sqrt() * 0.5
        }),
        ScalarField::from_fn(g, |x, y, z| {
            w * amp(x, y, z) * (w * t).cos() * 2f64.sqrt() * 0.5
        }),
    );
    let rate = dpsi_dt(&pf, (&rates.0, &rates.1), &r, &bc);
    let e = 1e-5;
    let pa = analytic_potential(&normalize_uv(&state_at(t + e), &r, 1e-12), &bc);
    let pb = analytic_potential(&normalize_uv(&state_at(t - e), &r, 1e-12), &bc);
    let fd = pa.sub(&pb).scale(1.0 / (2.0 * e));
    let diff = rate.sub(&fd);
    let c = spectral_curl(&diff);
    let scale = rate.magnitude().max_abs();
    assert!(
        diff.magnitude().max_abs() > 1e-3 * scale,
        "the two are not identical"
    );
    assert!(
        c.magnitude().max_abs() < 1e-6 * scale.max(1.0),
        "{}",
        c.magnitude().max_abs()
    );
}

/// Residual of `curl psi_a` against Omega away from the phase core. The
/// excluded tube has a fixed physical radius so the residual is a pure
/// truncation error; a tube of a few cells would keep it at O(1) because
/// `psi_a` grows like 1/distance towards the core.
fn closed_form_residual(n: usize) -> f64 {
    let (s, _, bc) = common::reference_setup(n);
    let g = *s.grid();
    let h = g.spacing(0);
    let r = NormalizationRanges::from_state(&s, 0.1).unwrap();
    let pf = normalize_uv(&s, &r, default_p_reg(g.min_spacing()));
    let omega = omega_field(&pf, &bc);
    let c = curl(&analytic_potential(&pf, &bc));
    let core: Vec<bool> = pf.p.values().iter().map(|&p| p < 0.2).collect();
    let tube = common::dilate(&g, &core, (0.6 / h).ceil() as usize);
    let inner = common::interior_mask(&g, (1.0 / h).ceil() as usize);
    let keep: Vec<bool> = (0..g.len()).map(|i| inner[i] && !tube[i]).collect();
    common::rel_l2(&c, &omega, &keep)
}

#[test]
fn closed_form_potential_curls_back_to_omega_off_the_core() {
    let (e48, e64) = (closed_form_residual(48), closed_form_residual(64));
    let order = (e48 / e64).ln() / (63.0f64 / 47.0).ln();
    assert!(e64 < 0.08, "{e64}");
    assert!(order > 1.5, "order {order} ({e48:e}, {e64:e})");
}

#[test]
fn omega_is_divergence_free_to_second_order() {
    let mut res = Vec::new();
    for n in [32, 64] {
        let g = Grid3::periodic(PI, n).unwrap();
        let bc = BoundarySpec::all_periodic();
        let r = NormalizationRanges::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let u = ScalarField::from_fn(g, |x, _, z| 0.4 + 0.3 * (x + z).sin());
        let v = ScalarField::from_fn(g, |x, y, z| 0.3 * y.cos() + 0.2 * (z - x).sin());
        let s = MediumState::new(0.0, u, v).unwrap();
        let pf = normalize_uv(&s, &r, default_p_reg(g.min_spacing()));
        assert!(pf.singular.iter().all(|m| !m));
        let om = omega_field(&pf, &bc);
        let all = vec![true; g.len()];
        let ratio = common::rms_masked(&divergence(&om), &all) / common::rms_vec_masked(&om, &all);
        let h = g.spacing(0);
        assert!(ratio < h * h, "ratio {ratio} h^2 {}", h * h);
        res.push(ratio);
    }
    let order = (res[0] / res[1]).log2();
    assert!(order > 1.8, "order {order}");
}

fn random_solenoidal(g: &Grid3) -> VectorField3 {
    let w = VectorField3::new(
        common::smooth_periodic(g, 1),
        common::smooth_periodic(g, 2),
        common::smooth_periodic(g, 3),
    )
    .unwrap();
    solenoidal_projection(&w)
}

#[test]
fn coulomb_potential_inverts_the_curl_and_is_divergence_free() {
    let mut fd = Vec::new();
    for n in [32, 64] {
        let g = Grid3::periodic(PI, n).unwrap();
        let om = random_solenoidal(&g);
        let psi = vector_potential_coulomb(&om);
        let all = vec![true; g.len()];
        let exact = common::rel_l2(&spectral_curl(&psi), &om, &all);
        assert!(exact < 1e-10, "{exact}");
        let div = spectral_divergence(&psi).max_abs();
        let norm = psi.magnitude().max_abs();
        assert!(div < 1e-10 * norm, "{div} vs {norm}");
        fd.push(common::rel_l2(&curl(&psi), &om, &all));
    }
    // Finite-difference curl: second-order truncation of modes up to |k|^2 = 27.
    assert!(fd[1] < 5e-2, "{}", fd[1]);
    assert!((fd[0] / fd[1]).log2() > 1.8, "{fd:?}");
}

#[test]
fn periodic_helicity_is_gauge_invariant() {
    let g = Grid3::periodic(PI, 48).unwrap();
    let om = random_solenoidal(&g);
    let (h, psi, sol) = coulomb_helicity(&om);
    assert!(h.abs() > 1e-3);
    for seed in 10..13 {
        let chi = common::smooth_periodic(&g, seed).map(|c| 5.0 * c);
        let shifted = psi.add(&spectral_gradient(&chi));
        let h2 = helicity(&shifted, &sol);
        assert!((h2 - h).abs() <= 1e-8 * h.abs(), "{h} vs {h2}");
    }
}

#[test]
fn helicity_of_initial_data_matches_independent_oracle() {
    // Values from an independent NumPy implementation (same discretization).
    let oracle = [
        (48, -5.837809466864645e-3),
        (64, -7.969138507814036e-3),
        (96, -4.259996765297002e-3),
    ];
    for (n, want) in oracle {
        let (s, _, bc) = common::reference_setup(n);
        let r = NormalizationRanges::from_state(&s, 0.1).unwrap();
        let pf = normalize_uv(&s, &r, default_p_reg(s.grid().min_spacing()));
        let (h, _, _) = coulomb_helicity(&omega_field(&pf, &bc));
        assert!((h - want).abs() < 1e-9 * want.abs(), "n={n}: {h} vs {want}");
        assert!(h < 0.0);
    }
}

#[test]
fn normalization_preserves_level_sets() {
    let (s, _, _) = common::reference_setup(24);
    let r = NormalizationRanges::from_state(&s, 0.1).unwrap();
    let pf = normalize_uv(&s, &r, 1e-6);
    for c in [-0.9, -0.7, -0.5, -0.3, -0.1] {
        let cu = r.map_u(c);
        let a: Vec<bool> = s.u.values().iter().map(|&u| u < c).collect();
        let b: Vec<bool> = pf.big_u.values().iter().map(|&u| u < cu).collect();
        assert_eq!(a, b, "level {c}");
    }
    let disk = pf
        .big_u
        .values()
        .iter()
        .zip(pf.big_v.values())
        .all(|(u, v)| u * u + v * v <= 1.0);
    assert!(disk);
}

#[test]
fn flux_vanishes_on_pinned_walls_and_periodic_pairs() {
    let (s, p, bc) = common::reference_setup(32);
    let r = NormalizationRanges::from_state(&s, 0.1).unwrap();
    let pf = normalize_uv(&s, &r, default_p_reg(s.grid().min_spacing()));
    let (du, dv) = knotmedia::fhn_rhs(&s, &p, &bc);
    let f = helicity_flux(
        &analytic_potential(&pf, &bc),
        &dpsi_dt(&pf, (&du, &dv), &r, &bc),
        &bc,
    );
    assert_eq!(f.total, 0.0);
    assert!(f.per_face.iter().all(|&x| x == 0.0));

    let g = Grid3::new(
        5.0,
        32,
        [AxisKind::Bounded, AxisKind::Bounded, AxisKind::Periodic],
    )
    .unwrap();
    let bc = BoundarySpec::per_axis([
        knotmedia::FaceCondition::NeumannZero,
        knotmedia::FaceCondition::NeumannZero,
        knotmedia::FaceCondition::Periodic,
    ]);
    let s = knotmedia::hopf_initial_condition(&g, &Default::default());
    let r = NormalizationRanges::from_state(&s, 0.1).unwrap();
    let pf = normalize_uv(&s, &r, default_p_reg(g.min_spacing()));
    let (du, dv) = knotmedia::fhn_rhs(&s, &p, &bc);
    let f = helicity_flux(
        &analytic_potential(&pf, &bc),
        &dpsi_dt(&pf, (&du, &dv), &r, &bc),
        &bc,
    );
    assert_eq!(f.per_face[4], 0.0);
    assert_eq!(f.per_face[5], 0.0);
    assert!(
        f.per_face[..4].iter().all(|&x| x != 0.0),
        "{:?}",
        f.per_face
    );
    let sum: f64 = f.per_face.iter().sum();
    assert!((sum - f.total).abs() <= 1e-12 * f.per_face.iter().map(|x| x.abs()).sum::<f64>());
}
