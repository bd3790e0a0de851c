//! Curves where a u level surface meets a v level surface.
//!
//! `cargo run --release --example intersection_curves`

use knotmedia::{extract_intersection_curves, IsoPair, RunConfig};

fn main() -> knotmedia::Result<()> {
    // Default setup: L = 5, walls pinned at the equilibrium.
    let cfg = RunConfig {
        n: 64,
        ..RunConfig::default()
    };
    let s = cfg.initial_state()?;
    for pair in [
        IsoPair::new(-0.5, -0.36),
        IsoPair::new(-0.3, -0.3),
        IsoPair::new(-0.7, -0.1),
    ] {
        let set = extract_intersection_curves(&s.u, &s.v, pair);
        println!(
            "u = {}, v = {}: {} closed, {} open, {} defects",
            pair.u0,
            pair.v0,
            set.closed_count(),
            set.open_count(),
            set.defects
        );
        for (i, c) in set.curves.iter().enumerate() {
            let [x, y, z] = c.centroid();
            println!(
                "  curve {i}: {} points, length {:.3}, centroid ({x:+.3}, {y:+.3}, {z:+.3})",
                c.len(),
                c.length()
            );
        }
    }
    Ok(())
}
