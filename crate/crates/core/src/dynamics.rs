//! FitzHugh-Nagumo kinetics, forward-Euler integration, and initial data.

use rayon::prelude::*;

use crate::calculus::laplacian;
use crate::error::{Error, Result};
use crate::grid::{BoundarySpec, Grid3, ScalarField};

/// Excitation values above this magnitude are treated as blow-up.
pub const BLOW_UP_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub eps: f64,
    pub beta: f64,
    pub gamma: f64,
    pub du: f64,
    pub dv: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            eps: 0.3,
            beta: 0.7,
            gamma: 0.5,
            du: 1.0,
            dv: 0.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.eps, self.beta, self.gamma, self.du, self.dv];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::Config(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.du < 0.0 || self.dv < 0.0 {
            return Err(Error::Config(
                "diffusion coefficients must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Fast kinetics `f(u, v) = u - u^3/3 - v`.
    #[inline]
    pub fn f(&self, u: f64, v: f64) -> f64 {
        u - u * u * u / 3.0 - v
    }

    /// Recovery kinetics `g(u, v) = u + beta - gamma v`.
    #[inline]
    pub fn g(&self, u: f64, v: f64) -> f64 {
        u + self.beta - self.gamma * v
    }
}

/// Time plus the excitation and inhibition fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumState {
    pub t: f64,
    /// Number of Euler steps taken to reach `t`.
    pub step: u64,
    pub u: ScalarField,
    pub v: ScalarField,
}

impl MediumState {
    pub fn new(t: f64, u: ScalarField, v: ScalarField) -> Result<Self> {
        u.grid().check_same(v.grid())?;
        Ok(Self { t, step: 0, u, v })
    }

    pub fn uniform(grid: Grid3, u: f64, v: f64) -> Self {
        Self {
            t: 0.0,
            step: 0,
            u: ScalarField::constant(grid, u),
            v: ScalarField::constant(grid, v),
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.u.grid()
    }

    /// Overwrites nodes on Dirichlet faces with their pinned values.
    pub fn pin_boundary(&mut self, bc: &BoundarySpec) {
        if !bc.has_dirichlet() {
            return;
        }
        let grid = *self.grid();
        let n = grid.n();
        let u = self.u.values_mut().par_chunks_mut(n * n);
        let v = self.v.values_mut().par_chunks_mut(n * n);
        u.zip(v).enumerate().for_each(|(k, (up, vp))| {
            for j in 0..n {
                for i in 0..n {
                    if let Some((pu, pv)) = bc.dirichlet_at(&grid, [i, j, k]) {
                        up[i + n * j] = pu;
                        vp[i + n * j] = pv;
                    }
                }
            }
        });
    }
}

/// Spatially uniform rest state `(u*, v*)` where both kinetics vanish.
///
/// With `gamma != 0` this is a root of `gamma u^3 + 3(1 - gamma) u + 3 beta = 0`
/// and `v* = (u* + beta)/gamma`. When several real roots exist the most
/// negative one (the resting branch) is returned.
pub fn equilibrium_state(p: &ModelParams) -> Result<(f64, f64)> {
    if ![p.beta, p.gamma].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("non-finite kinetics parameters".into()));
    }
    if p.gamma == 0.0 {
        let u = -p.beta;
        return Ok((u, p.f(u, 0.0)));
    }
    let (a, b, c) = (p.gamma, 3.0 * (1.0 - p.gamma), 3.0 * p.beta);
    let roots = real_cubic_roots(a, b, c);
    let u = roots
        .into_iter()
        .next()
        .ok_or_else(|| Error::Domain("kinetics admit no real equilibrium".into()))?;
    let v = (u + p.beta) / p.gamma;
    let (rf, rg) = (p.f(u, v).abs(), p.g(u, v).abs());
    if rf > 1e-12 || rg > 1e-12 {
        return Err(Error::Domain(format!(
            "equilibrium residual too large (|f| = {rf:e}, |g| = {rg:e})"
        )));
    }
    Ok((u, v))
}

/// Real roots of `a x^3 + b x + c`, ascending, found by bracketing and
/// bisection then polished with Newton steps.
fn real_cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let poly = |x: f64| (a * x * x + b) * x + c;
    let deriv = |x: f64| 3.0 * a * x * x + b;
    let bound = 1.0 + (b / a).abs().max((c / a).abs());
    const SAMPLES: usize = 4096;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = poly(x0);
    for s in 1..=SAMPLES {
        let x1 = -bound + 2.0 * bound * s as f64 / SAMPLES as f64;
        let f1 = poly(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if poly(lo) * poly(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut x = 0.5 * (lo + hi);
            for _ in 0..4 {
                let d = deriv(x);
                if d == 0.0 {
                    break;
                }
                let next = x - poly(x) / d;
                if !(lo..=hi).contains(&next) {
                    break;
                }
                x = next;
            }
            roots.push(x);
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// Time derivatives `(du/dt, dv/dt)`; zero on Dirichlet-pinned nodes.
pub fn fhn_rhs(s: &MediumState, p: &ModelParams, bc: &BoundarySpec) -> (ScalarField, ScalarField) {
    let grid = *s.grid();
    let n = grid.n();
    let lap_u = (p.du != 0.0).then(|| laplacian(&s.u, bc));
    let lap_v = (p.dv != 0.0).then(|| laplacian(&s.v, bc));
    let mut du = vec![0.0; grid.len()];
    let mut dv = vec![0.0; grid.len()];
    let (uu, vv) = (s.u.values(), s.v.values());
    du.par_chunks_mut(n * n)
        .zip(dv.par_chunks_mut(n * n))
        .enumerate()
        .for_each(|(k, (dup, dvp))| {
            for j in 0..n {
                for i in 0..n {
                    let loc = i + n * j;
                    if bc.dirichlet_at(&grid, [i, j, k]).is_some() {
                        dup[loc] = 0.0;
                        dvp[loc] = 0.0;
                        continue;
                    }
                    let idx = loc + n * n * k;
                    let (u, v) = (uu[idx], vv[idx]);
                    let mut ru = p.f(u, v) / p.eps;
                    if let Some(l) = &lap_u {
                        ru += p.du * l.values()[idx];
                    }
                    let mut rv = p.eps * p.g(u, v);
                    if let Some(l) = &lap_v {
                        rv += p.dv * l.values()[idx];
                    }
                    dup[loc] = ru;
                    dvp[loc] = rv;
                }
            }
        });
    (
        ScalarField::new(grid, du).expect("grid length"),
        ScalarField::new(grid, dv).expect("grid length"),
    )
}

/// Which explicit diffusion bound sets the time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StabilityBound {
    /// `1 / (2 D sum_a h_a^-2)`, i.e. `h^2 / 6D` on a cubic grid.
    #[default]
    ThreeDimensional,
    /// The looser one-dimensional rule `h^2 / 2D`.
    OneDimensional,
}

/// Largest explicit step times `safety`. Without diffusion the step is
/// limited by the kinetics time scale `eps / 10` instead.
pub fn stable_dt(grid: &Grid3, p: &ModelParams, safety: f64, bound: StabilityBound) -> f64 {
    let d = p.du.max(p.dv);
    if d <= 0.0 {
        return p.eps / 10.0;
    }
    match bound {
        StabilityBound::ThreeDimensional => {
            let inv: f64 = (0..3).map(|a| grid.spacing(a).powi(-2)).sum();
            safety / (2.0 * d * inv)
        }
        StabilityBound::OneDimensional => {
            let h = grid.min_spacing();
            safety * h * h / (2.0 * d)
        }
    }
}

/// One forward-Euler step. Dirichlet nodes stay pinned.
pub fn step_euler(
    s: &MediumState,
    p: &ModelParams,
    bc: &BoundarySpec,
    dt: f64,
) -> Result<MediumState> {
    let (du, dv) = fhn_rhs(s, p, bc);
    let mut next = s.clone();
    next.u
        .values_mut()
        .par_iter_mut()
        .zip(du.values().par_iter())
        .for_each(|(u, r)| *u += dt * r);
    next.v
        .values_mut()
        .par_iter_mut()
        .zip(dv.values().par_iter())
        .for_each(|(v, r)| *v += dt * r);
    next.pin_boundary(bc);
    next.t = s.t + dt;
    next.step = s.step + 1;

    let bad_u = next
        .u
        .values()
        .par_iter()
        .any(|u| !u.is_finite() || u.abs() > BLOW_UP_LIMIT);
    let bad_v = next.v.values().par_iter().any(|v| !v.is_finite());
    if bad_u || bad_v {
        return Err(Error::BlowUp {
            step: next.step,
            t: next.t,
            reason: if bad_v {
                "non-finite inhibitor value".into()
            } else {
                format!("|u| exceeded {BLOW_UP_LIMIT} or became non-finite")
            },
        });
    }
    Ok(next)
}

/// Time-stepping controls for [`run_simulation`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSchedule {
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    /// Fixed step; `None` uses [`stable_dt`] with `safety`.
    pub dt: Option<f64>,
    pub safety: f64,
    pub bound: StabilityBound,
}

impl RunSchedule {
    pub fn new(t_end: f64, snapshot_times: Vec<f64>) -> Self {
        Self {
            t_end,
            snapshot_times,
            dt: None,
            safety: 0.9,
            bound: StabilityBound::default(),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        let sorted = self.snapshot_times.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            return Err(Error::Config(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(0.0..=self.t_end).contains(&t))
        {
            return Err(Error::Config(
                "snapshot times must lie in [0, t_end]".into(),
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

/// Integrates from `s0` to `schedule.t_end`, landing exactly on every
/// snapshot time. Returns `s0` followed by the snapshot states; `observe` is
/// called on each of them as it is produced.
pub fn run_simulation<F>(
    s0: &MediumState,
    p: &ModelParams,
    bc: &BoundarySpec,
    schedule: &RunSchedule,
    mut observe: F,
) -> Result<Vec<MediumState>>
where
    F: FnMut(&MediumState) -> Result<()>,
{
    p.validate()?;
    schedule.validate()?;
    bc.check_grid(s0.grid())?;
    let dt = schedule
        .dt
        .unwrap_or_else(|| stable_dt(s0.grid(), p, schedule.safety, schedule.bound));

    observe(s0)?;
    let mut trajectory = vec![s0.clone()];
    let mut state = s0.clone();
    let mut targets: Vec<(f64, bool)> = schedule
        .snapshot_times
        .iter()
        .filter(|&&t| t > s0.t)
        .map(|&t| (t, true))
        .collect();
    if targets.last().is_none_or(|&(t, _)| t < schedule.t_end) && schedule.t_end > s0.t {
        targets.push((schedule.t_end, false));
    }
    // Snapshots requested at the starting time are the initial state itself.
    for _ in schedule
        .snapshot_times
        .iter()
        .filter(|&&t| t <= s0.t && t > 0.0)
    {
        observe(&state)?;
        trajectory.push(state.clone());
    }

    for (target, record) in targets {
        state = advance_to(state, p, bc, dt, target)?;
        if record {
            observe(&state)?;
            trajectory.push(state.clone());
        }
    }
    Ok(trajectory)
}

/// Steps until `target`, shortening the final step to land on it exactly.
pub fn advance_to(
    mut state: MediumState,
    p: &ModelParams,
    bc: &BoundarySpec,
    dt: f64,
    target: f64,
) -> Result<MediumState> {
    // Remaining gaps below this are absorbed into the previous step.
    let slack = dt * 1e-9;
    while state.t < target {
        let remaining = target - state.t;
        if remaining <= dt + slack {
            state = step_euler(&state, p, bc, remaining)?;
            state.t = target;
        } else {
            state = step_euler(&state, p, bc, dt)?;
        }
    }
    Ok(state)
}

/// Amplitudes and offset of the nonzero-helicity initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfICParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub offset: f64,
}

impl Default for HopfICParams {
    fn default() -> Self {
        Self {
            lambda1: std::f64::consts::SQRT_2,
            lambda2: std::f64::consts::FRAC_1_SQRT_2,
            offset: -0.4,
        }
    }
}

impl HopfICParams {
    /// `(u, v)` at one point.
    pub fn eval(&self, x: f64, y: f64, z: f64) -> (f64, f64) {
        let r2 = x * x + y * y + z * z;
        let den = (r2 + 1.0) * (r2 + 1.0);
        let u = self.lambda1 * (2.0 * x * z + y * (r2 - 1.0)) / den + self.offset;
        let v = self.lambda2 * (2.0 * y * z - x * (r2 - 1.0)) / den + self.offset;
        (u, v)
    }
}

/// Samples the linked-fibre initial data at every node, `t = 0`.
pub fn hopf_initial_condition(grid: &Grid3, ic: &HopfICParams) -> MediumState {
    MediumState {
        t: 0.0,
        step: 0,
        u: ScalarField::from_fn(*grid, |x, y, z| ic.eval(x, y, z).0),
        v: ScalarField::from_fn(*grid, |x, y, z| ic.eval(x, y, z).1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_grid(n: usize) -> Grid3 {
        Grid3::bounded(5.0, n).unwrap()
    }

    /// Independent Newton iteration on `u^3 + 3u + 4.2 = 0`.
    fn newton_reference() -> f64 {
        let mut u: f64 = -1.0;
        for _ in 0..50 {
            u -= (u * u * u + 3.0 * u + 4.2) / (3.0 * u * u + 3.0);
        }
        u
    }

    #[test]
    fn equilibrium_matches_five_digit_values() {
        let p = ModelParams::default();
        let (u, v) = equilibrium_state(&p).unwrap();
        assert!((u + 1.03279).abs() < 1e-5, "{u}");
        assert!((v + 0.66558).abs() < 1e-5, "{v}");
        assert!(p.f(u, v).abs() < 1e-12);
        assert!(p.g(u, v).abs() < 1e-12);
        assert!((u - newton_reference()).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_of_odd_kinetics_is_origin() {
        let p = ModelParams {
            beta: 0.0,
            gamma: 0.0,
            ..ModelParams::default()
        };
        assert_eq!(equilibrium_state(&p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn equilibrium_rejects_non_finite() {
        let p = ModelParams {
            beta: f64::NAN,
            ..ModelParams::default()
        };
        assert!(matches!(equilibrium_state(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn cubic_with_three_roots_picks_lowest() {
        // (x+2)(x)(x-2) = x^3 - 4x
        let r = real_cubic_roots(1.0, -4.0, 0.0);
        assert_eq!(r.len(), 3);
        assert!((r[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rhs_hand_values() {
        let g = reference_grid(8);
        let p = ModelParams::default();
        let bc = BoundarySpec::all_neumann();
        let (du, dv) = fhn_rhs(&MediumState::uniform(g, 0.0, 0.0), &p, &bc);
        assert_eq!(du.max_abs(), 0.0);
        assert!(dv.values().iter().all(|r| (r - 0.21).abs() < 1e-15));

        let (du, dv) = fhn_rhs(&MediumState::uniform(g, 1.0, 0.0), &p, &bc);
        assert!(du.values().iter().all(|r| (r - 20.0 / 9.0).abs() < 1e-14));
        assert!(dv.values().iter().all(|r| (r - 0.51).abs() < 1e-15));
    }

    #[test]
    fn rhs_zero_at_equilibrium_and_on_pins() {
        let g = reference_grid(10);
        let p = ModelParams::default();
        let (ue, ve) = equilibrium_state(&p).unwrap();
        let bc = BoundarySpec::all_dirichlet(ue, ve);
        let (du, dv) = fhn_rhs(&MediumState::uniform(g, ue, ve), &p, &bc);
        assert!(du.max_abs() < 1e-12 && dv.max_abs() < 1e-12);

        let (du, dv) = fhn_rhs(&MediumState::uniform(g, 0.5, 0.1), &p, &bc);
        assert_eq!(du.at(0, 3, 3), 0.0);
        assert_eq!(dv.at(9, 9, 9), 0.0);
        assert_ne!(du.at(3, 3, 3), 0.0);
    }

    #[test]
    fn stable_dt_values() {
        let p = ModelParams::default();
        let g = reference_grid(100);
        let dt = stable_dt(&g, &p, 0.9, StabilityBound::ThreeDimensional);
        assert!((dt - 1.5305e-3).abs() < 1e-7, "{dt}");

        let still = ModelParams {
            du: 0.0,
            dv: 0.0,
            ..p
        };
        assert!(
            (stable_dt(&g, &still, 0.9, StabilityBound::ThreeDimensional) - 0.03).abs() < 1e-15
        );

        let unit = Grid3::bounded(3.5, 8).unwrap();
        assert_eq!(unit.spacing(0), 1.0);
        let dt = stable_dt(&unit, &p, 1.0, StabilityBound::ThreeDimensional);
        assert!((dt - 1.0 / 6.0).abs() < 1e-15);
        let loose = stable_dt(&unit, &p, 1.0, StabilityBound::OneDimensional);
        assert!((loose - 0.5).abs() < 1e-15);
    }

    #[test]
    fn one_step_from_origin() {
        let g = reference_grid(8);
        let p = ModelParams::default();
        let s = step_euler(
            &MediumState::uniform(g, 0.0, 0.0),
            &p,
            &BoundarySpec::all_neumann(),
            0.01,
        )
        .unwrap();
        assert!(s.u.max_abs() == 0.0);
        assert!(s.v.values().iter().all(|v| (v - 0.0021).abs() < 1e-15));
        assert_eq!(s.step, 1);
        assert!((s.t - 0.01).abs() < 1e-16);
    }

    #[test]
    fn hopf_ic_point_values() {
        let ic = HopfICParams::default();
        assert_eq!(ic.eval(0.0, 0.0, 0.0), (-0.4, -0.4));
        let (u, v) = ic.eval(1.0, 1.0, 1.0);
        assert!((u - (2f64.sqrt() * 4.0 / 16.0 - 0.4)).abs() < 1e-15);
        assert!((u + 0.04645).abs() < 1e-5);
        assert!((v + 0.4).abs() < 1e-15);
        let (u, v) = ic.eval(1e10, -2e10, 3e10);
        assert!((u + 0.4).abs() < 1e-8 && (v + 0.4).abs() < 1e-8);
    }

    #[test]
    fn hopf_ic_on_grid() {
        let g = Grid3::bounded(1.0, 9).unwrap();
        let s = hopf_initial_condition(&g, &HopfICParams::default());
        assert_eq!(s.u.at(4, 4, 4), -0.4);
        assert!((s.u.at(8, 8, 8) + 0.04645).abs() < 1e-5);
        assert_eq!(s.t, 0.0);
    }
}
