use std::path::Path;
use std::process::Command;

use knotmedia::config::InitialKind;
use knotmedia::pipeline::{cmd_curves, cmd_helicity, cmd_ic, cmd_link, cmd_run, TIMESERIES_HEADER};
use knotmedia::snapshot::{read_snapshot, write_snapshot};
use knotmedia::{
    vtk, BoundarySpec, DiagnosticsRow, Error, Grid3, IsoPair, MediumState, ModelParams, RunConfig,
    ScalarField, Snapshot,
};
use tempfile::tempdir;

fn small(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.apply_overrides(&["n=20", "t_end=0.1", "snapshot_times=0.05, 0.1"])
        .unwrap();
    cfg.out_dir = dir.to_path_buf();
    cfg
}

#[test]
fn config_text_is_a_fixpoint() {
    let mut cfg = RunConfig::default();
    cfg.apply_overrides(&[
        "bc_z=periodic",
        "bc_x=neumann",
        "dt=0.001",
        "iso_pairs=-0.5:-0.36",
        "norm_ranges=-2, 2, -1, 0.5",
        "stability=1d",
        "eps=0.25",
    ])
    .unwrap();
    let text = cfg.to_text();
    let back = RunConfig::parse(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.to_text(), text);
}

#[test]
fn config_errors_carry_line_numbers() {
    let text = "n = 16\n# comment\nbogus = 3\n";
    match RunConfig::parse(text) {
        Err(Error::ConfigLine { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match RunConfig::parse("n = 16\nt_end = 1\nn = 17\n") {
        Err(Error::ConfigLine { line, message }) => {
            assert_eq!(line, 3);
            assert!(message.contains("line 1"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let e = RunConfig::parse("bc_x = neumann\nbc_x_dirichlet_u = -1\n").unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn snapshots_round_trip_and_reject_damage() {
    let dir = tempdir().unwrap();
    let cfg = small(dir.path());
    let path = cmd_ic(&cfg).unwrap();
    let snap = read_snapshot(&path).unwrap();
    assert_eq!(snap.state, cfg.initial_state().unwrap());
    assert_eq!(snap.bc, cfg.boundary().unwrap());

    let copy = dir.path().join("copy.bin");
    write_snapshot(&copy, &snap).unwrap();
    assert_eq!(std::fs::read(&copy).unwrap(), std::fs::read(&path).unwrap());

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 8);
    let cut = dir.path().join("cut.bin");
    std::fs::write(&cut, &bytes).unwrap();
    assert!(matches!(
        read_snapshot(&cut),
        Err(Error::PayloadLength { .. })
    ));

    bytes[0] = b'X';
    std::fs::write(&cut, &bytes).unwrap();
    let e = read_snapshot(&cut).unwrap_err();
    assert!(matches!(e, Error::Snapshot { .. }));
    assert_eq!(e.exit_code(), 4);
}

#[test]
fn vtk_files_read_back() {
    let dir = tempdir().unwrap();
    let curves = vec![
        knotmedia::linking::circle([0.0; 3], 1.0, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 12),
        knotmedia::Polyline::open(vec![[0.0, 0.0, 2.0], [0.5, 0.25, 2.0], [1.0, 0.0, 2.125]]),
    ];
    let path = dir.path().join("c.vtk");
    vtk::write_polylines(&path, &curves, "test").unwrap();
    let back = vtk::read_polylines(&path).unwrap();
    assert_eq!(back.len(), 2);
    assert!(back[0].closed && !back[1].closed);
    for (a, b) in curves.iter().zip(&back) {
        assert_eq!(a.points.len(), b.points.len());
        for (p, q) in a.points.iter().zip(&b.points) {
            for d in 0..3 {
                assert!((p[d] - q[d]).abs() < 1e-12);
            }
        }
    }

    let g = Grid3::bounded(1.5, 17).unwrap();
    let f = ScalarField::from_fn(g, |x, y, z| x * x + y * y + z * z);
    let mesh = knotmedia::extract_isosurface(&f, 1.0);
    let mpath = dir.path().join("m.vtk");
    vtk::write_mesh(&mpath, &mesh, "sphere").unwrap();
    let pd = vtk::read_polydata(&mpath).unwrap();
    assert_eq!(pd.points.len(), mesh.vertices.len());
    assert_eq!(pd.polys.len(), mesh.triangles.len());
    assert!(pd.lines.is_empty());
}

#[test]
fn run_is_deterministic_and_rows_are_consistent() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let sa = cmd_run(&small(a.path())).unwrap();
    cmd_run(&small(b.path())).unwrap();
    let read = |d: &Path| std::fs::read(d.join("timeseries.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));

    let text = String::from_utf8(read(a.path())).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TIMESERIES_HEADER));
    let rows: Vec<DiagnosticsRow> = lines
        .map(|l| DiagnosticsRow::from_csv(l).unwrap())
        .collect();
    assert_eq!(rows, sa.rows);
    assert_eq!(
        rows.iter().map(|r| r.t).collect::<Vec<_>>(),
        vec![0.0, 0.05, 0.1]
    );
    for r in &rows {
        let sum: f64 = r.per_face_flux.iter().sum();
        assert!((sum - r.flux_total).abs() <= 1e-12 * (1.0 + r.flux_total.abs()));
        assert!(r.h_coulomb.is_finite());
    }
    // The window is fixed from t = 0, so only later states may clamp.
    assert_eq!(rows[0].clamp_count, 0);
    for f in &sa.files {
        assert!(f.exists(), "{}", f.display());
    }
    let resolved = std::fs::read_to_string(a.path().join("config_resolved.txt")).unwrap();
    assert_eq!(RunConfig::parse(&resolved).unwrap(), small(a.path()));
}

#[test]
fn equilibrium_start_has_no_helicity_and_no_curves() {
    let dir = tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.ic = InitialKind::Equilibrium;
    cfg.norm_ranges = Some(knotmedia::NormalizationRanges::new(-2.0, 2.0, -1.0, 1.0).unwrap());
    cfg.write_surfaces = false;
    let s = cmd_run(&cfg).unwrap();
    for r in &s.rows {
        assert_eq!(r.h_coulomb, 0.0);
        assert_eq!(r.flux_total, 0.0);
        assert_eq!(r.curve_count, 0);
        assert_eq!(r.total_linkage, 0);
    }
    let snap = dir.path().join("snap_t0.1000.bin");
    let (pairs, _) = cmd_curves(&cfg, &snap).unwrap();
    assert!(pairs.iter().all(|p| p.curves.curves.is_empty()));
}

#[test]
fn curves_and_link_commands_on_a_known_field() {
    let dir = tempdir().unwrap();
    let g = Grid3::bounded(1.5, 25).unwrap();
    let state = MediumState::new(
        0.0,
        ScalarField::from_fn(g, |x, y, z| x * x + y * y + z * z),
        ScalarField::from_fn(g, |_, _, z| z),
    )
    .unwrap();
    let snap = dir.path().join("sphere.bin");
    write_snapshot(
        &snap,
        &Snapshot {
            state,
            params: ModelParams::default(),
            bc: BoundarySpec::all_neumann(),
        },
    )
    .unwrap();
    let cfg = RunConfig {
        iso_pairs: vec![IsoPair::new(1.0, 0.2)],
        out_dir: dir.path().join("out"),
        ..RunConfig::default()
    };
    let (pairs, files) = cmd_curves(&cfg, &snap).unwrap();
    assert_eq!(pairs[0].curves.closed_count(), 1);
    let links = pairs[0].links.as_ref().unwrap();
    assert_eq!(links.link_matrix, vec![vec![0.0]]);
    assert_eq!(links.total_linkage, 0);

    let vtk_files: Vec<_> = files
        .into_iter()
        .filter(|f| f.extension().unwrap() == "vtk")
        .collect();
    let (report, csv) = cmd_link(&cfg, &vtk_files).unwrap();
    assert_eq!(report.curves.len(), 1);
    assert!(csv.exists());
}

#[test]
fn helicity_command_matches_the_run() {
    let dir = tempdir().unwrap();
    let cfg = small(dir.path());
    let s = cmd_run(&cfg).unwrap();
    let r0 = cmd_helicity(&cfg, &dir.path().join("snap_t0.0000.bin")).unwrap();
    assert_eq!(r0.h_coulomb, s.rows[0].h_coulomb);
    assert_eq!(r0.per_face_flux, s.rows[0].per_face_flux);
}

fn bin(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_knotmedia"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let quick = [
        "--override",
        "n=10",
        "--override",
        "t_end=0.02",
        "--override",
        "snapshot_times=0.02",
    ];
    let mut ok = vec!["run", "--out", out];
    ok.extend(quick);
    assert_eq!(bin(&ok), 0);
    assert_eq!(bin(&["run", "--out", out, "--override", "nope=1"]), 2);
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "bc_x = periodic\nbc_x_dirichlet_v = 0\n").unwrap();
    assert_eq!(
        bin(&["run", "--config", cfg.to_str().unwrap(), "--out", out]),
        2
    );
    assert_eq!(
        bin(&[
            "run",
            "--out",
            out,
            "--override",
            "n=16",
            "--override",
            "dt=0.5",
            "--override",
            "t_end=20",
            "--override",
            "snapshot_times="
        ]),
        3
    );
    assert_eq!(bin(&["helicity", "--out", out, "/nonexistent/snap.bin"]), 4);
    assert_eq!(bin(&["run", "--config", "/nonexistent.cfg"]), 4);
    let snap = format!("{out}/snap_t0.0000.bin");
    assert_eq!(bin(&["helicity", "--out", out, &snap]), 0);
    assert_eq!(bin(&["curves", "--out", out, &snap]), 0);
}
