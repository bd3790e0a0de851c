//! Integrates the medium from the linked-fibre initial data and prints the
//! excitation range at each snapshot.
//!
//! `cargo run --release --example simulate -- [n]`

use knotmedia::dynamics::{run_simulation, RunSchedule};
use knotmedia::{
    equilibrium_state, hopf_initial_condition, stable_dt, BoundarySpec, Grid3, HopfICParams,
    ModelParams, StabilityBound,
};

fn main() -> knotmedia::Result<()> {
    let n = std::env::args()
        .nth(1)
        .map_or(48, |s| s.parse().expect("grid size"));
    let grid = Grid3::bounded(5.0, n)?;
    let params = ModelParams::default();
    let (ue, ve) = equilibrium_state(&params)?;
    let bc = BoundarySpec::all_dirichlet(ue, ve);

    let mut s0 = hopf_initial_condition(&grid, &HopfICParams::default());
    s0.pin_boundary(&bc);
    let dt = stable_dt(&grid, &params, 0.9, StabilityBound::ThreeDimensional);
    println!(
        "n = {n}, h = {:.4}, dt = {dt:.3e}, walls at ({ue:.6}, {ve:.6})",
        grid.spacing(0)
    );

    let schedule = RunSchedule::new(0.8, vec![0.2, 0.4, 0.6, 0.8]);
    run_simulation(&s0, &params, &bc, &schedule, |s| {
        let range = |v: &[f64]| {
            v.iter()
                .fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)))
        };
        let (umin, umax) = range(s.u.values());
        let (vmin, vmax) = range(s.v.values());
        println!(
            "t = {:.2} step {:4}: u in [{umin:+.4}, {umax:+.4}], v in [{vmin:+.4}, {vmax:+.4}]",
            s.t, s.step
        );
        Ok(())
    })?;
    Ok(())
}
