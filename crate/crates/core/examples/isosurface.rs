//! Level surfaces of the initial excitation field, written as VTK polydata.
//!
//! `cargo run --release --example isosurface -- [out_dir]`

use std::path::PathBuf;

use knotmedia::{extract_isosurface, hopf_initial_condition, vtk, Grid3, HopfICParams};

fn main() -> knotmedia::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(
        || std::env::temp_dir().join("knotmedia-isosurface"),
        PathBuf::from,
    );
    std::fs::create_dir_all(&out).map_err(|e| knotmedia::Error::Io {
        path: out.clone(),
        source: e,
    })?;

    let grid = Grid3::bounded(5.0, 64)?;
    let s = hopf_initial_condition(&grid, &HopfICParams::default());
    for level in [-0.7, -0.5, -0.3] {
        let mesh = extract_isosurface(&s.u, level);
        let path = out.join(format!("u_{level}.vtk"));
        vtk::write_mesh(&path, &mesh, &format!("u = {level}"))?;
        println!(
            "u = {level:+.2}: {:6} triangles, area {:8.4} -> {}",
            mesh.triangles.len(),
            mesh.area(),
            path.display()
        );
    }
    Ok(())
}
