//! Gauss linking numbers: a Hopf link, separated rings, and the
//! intersection curves of the initial data.
//!
//! `cargo run --release --example linking`

use knotmedia::linking::circle;
use knotmedia::{extract_intersection_curves, gauss_linking, link_report, IsoPair, RunConfig};

fn main() -> knotmedia::Result<()> {
    let (x, y, z) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
    for segments in [32, 128, 512] {
        let a = circle([0.0; 3], 1.0, x, y, segments);
        let b = circle([1.0, 0.0, 0.0], 1.0, x, z, segments);
        println!(
            "Hopf link, {segments:3} segments: {:+.8}",
            gauss_linking(&a, &b)?
        );
    }
    let a = circle([0.0; 3], 1.0, x, y, 128);
    let far = circle([3.0, 0.0, 0.0], 1.0, x, y, 128);
    println!("separated rings: {:+.2e}", gauss_linking(&a, &far)?);

    // Default setup: L = 5, walls pinned at the equilibrium.
    let cfg = RunConfig {
        n: 64,
        ..RunConfig::default()
    };
    let s = cfg.initial_state()?;
    let mut curves = Vec::new();
    for pair in [IsoPair::new(-0.5, -0.36), IsoPair::new(-0.3, -0.3)] {
        curves.extend(extract_intersection_curves(&s.u, &s.v, pair).curves);
    }
    let report = link_report(&curves);
    println!(
        "initial data: {} closed curves, total linkage {}",
        report.curves.len(),
        report.total_linkage
    );
    for (i, j, l, r) in report.pairs() {
        println!("  ({i}, {j}): {l:+.4} -> {r}");
    }
    Ok(())
}
