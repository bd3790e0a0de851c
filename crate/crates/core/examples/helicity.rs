//! Coulomb-gauge helicity and boundary flux of the initial data under three
//! boundary setups.
//!
//! `cargo run --release --example helicity`

use knotmedia::dynamics::fhn_rhs;
use knotmedia::topo::{default_p_reg, helicity_record};
use knotmedia::AxisKind::{Bounded, Periodic};
use knotmedia::{
    equilibrium_state, hopf_initial_condition, BoundarySpec, FaceCondition, Grid3, HopfICParams,
    ModelParams, NormalizationRanges,
};

fn main() -> knotmedia::Result<()> {
    let params = ModelParams::default();
    let (ue, ve) = equilibrium_state(&params)?;
    let n = 48;
    let setups = [
        (
            "dirichlet",
            [Bounded; 3],
            BoundarySpec::all_dirichlet(ue, ve),
        ),
        (
            "neumann x/y, periodic z",
            [Bounded, Bounded, Periodic],
            BoundarySpec::per_axis([
                FaceCondition::NeumannZero,
                FaceCondition::NeumannZero,
                FaceCondition::Periodic,
            ]),
        ),
        ("periodic", [Periodic; 3], BoundarySpec::all_periodic()),
    ];
    for (name, axes, bc) in setups {
        let grid = Grid3::new(5.0, n, axes)?;
        let mut s = hopf_initial_condition(&grid, &HopfICParams::default());
        s.pin_boundary(&bc);
        let ranges = NormalizationRanges::from_state(&s, 0.1)?;
        let rates = fhn_rhs(&s, &params, &bc);
        let rec = helicity_record(
            &s,
            (&rates.0, &rates.1),
            &ranges,
            default_p_reg(grid.min_spacing()),
            &bc,
        );
        println!("{name}:");
        println!("  H = {:+.6e}", rec.helicity);
        println!("  dH/dt boundary flux = {:+.6e}", rec.flux);
        println!(
            "  per face {:?}",
            rec.per_face_flux.map(|f| format!("{f:+.2e}"))
        );
    }
    Ok(())
}
