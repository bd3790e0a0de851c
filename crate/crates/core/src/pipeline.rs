//! End-to-end commands: simulate, extract, link, measure, and write files.
//!
//! Each command takes a resolved [`RunConfig`] and returns a summary of what
//! it wrote, so the binary stays a thin argument parser.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::curves::{extract_intersection_curves, CurveSet, IsoPair, Polyline};
use crate::dynamics::{fhn_rhs, run_simulation, MediumState, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{BoundarySpec, Face, ScalarField};
use crate::isosurface::extract_isosurface;
use crate::linking::{link_report, LinkReport};
use crate::snapshot::{read_snapshot, write_snapshot, Snapshot};
use crate::topo::{
    analytic_potential, coulomb_helicity, dpsi_dt, helicity_flux, normalize_uv, omega_field,
    NormalizationRanges,
};
use crate::vtk;

/// Column names of `timeseries.csv`.
pub const TIMESERIES_HEADER: &str = "t,H_coulomb,flux_total,flux_xmin,flux_xmax,flux_ymin,\
flux_ymax,flux_zmin,flux_zmax,curve_count,open_curve_count,total_linkage,clamp_count";

/// One line of `timeseries.csv`. Disabled diagnostics are `NaN` (reals)
/// or zero (counts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub h_coulomb: f64,
    pub flux_total: f64,
    pub per_face_flux: [f64; 6],
    pub curve_count: usize,
    pub open_curve_count: usize,
    pub total_linkage: i64,
    pub clamp_count: usize,
}

impl DiagnosticsRow {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "{:.16e},{:.16e},{:.16e}",
            self.t, self.h_coulomb, self.flux_total
        );
        for f in self.per_face_flux {
            let _ = write!(s, ",{f:.16e}");
        }
        let _ = write!(
            s,
            ",{},{},{},{}",
            self.curve_count, self.open_curve_count, self.total_linkage, self.clamp_count
        );
        s
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 13 {
            return Err(Error::Config(format!(
                "expected 13 columns, got {}",
                f.len()
            )));
        }
        let real = |i: usize| -> Result<f64> {
            f[i].parse()
                .map_err(|_| Error::Config(format!("column {i}: bad number `{}`", f[i])))
        };
        let int = |i: usize| -> Result<i64> {
            f[i].parse()
                .map_err(|_| Error::Config(format!("column {i}: bad integer `{}`", f[i])))
        };
        let mut per_face_flux = [0.0; 6];
        for (k, slot) in per_face_flux.iter_mut().enumerate() {
            *slot = real(3 + k)?;
        }
        Ok(Self {
            t: real(0)?,
            h_coulomb: real(1)?,
            flux_total: real(2)?,
            per_face_flux,
            curve_count: int(9)? as usize,
            open_curve_count: int(10)? as usize,
            total_linkage: int(11)?,
            clamp_count: int(12)? as usize,
        })
    }
}

/// Curves and their linking for one level pair at one instant.
#[derive(Debug, Clone)]
pub struct PairResult {
    pub pair: IsoPair,
    pub curves: CurveSet,
    pub links: Option<LinkReport>,
}

/// Everything computed for one snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotDiagnostics {
    pub row: DiagnosticsRow,
    pub pairs: Vec<PairResult>,
}

/// Fixed inputs shared by every snapshot of a run.
#[derive(Debug, Clone)]
pub struct DiagnosticContext {
    pub params: ModelParams,
    pub bc: BoundarySpec,
    pub ranges: NormalizationRanges,
    pub p_reg: f64,
    pub iso_pairs: Vec<IsoPair>,
    pub helicity: bool,
    pub flux: bool,
    pub curves: bool,
    pub linking: bool,
}

impl DiagnosticContext {
    pub fn from_config(cfg: &RunConfig, s0: &MediumState) -> Result<Self> {
        Ok(Self {
            params: cfg.params,
            bc: cfg.boundary()?,
            ranges: cfg.ranges(s0)?,
            p_reg: cfg.p_reg_for(s0.grid()),
            iso_pairs: cfg.iso_pairs.clone(),
            helicity: cfg.diag_helicity,
            flux: cfg.diag_flux,
            curves: cfg.diag_curves,
            linking: cfg.diag_linking,
        })
    }

    pub fn evaluate(&self, s: &MediumState) -> SnapshotDiagnostics {
        let mut row = DiagnosticsRow {
            t: s.t,
            h_coulomb: f64::NAN,
            flux_total: f64::NAN,
            per_face_flux: [f64::NAN; 6],
            curve_count: 0,
            open_curve_count: 0,
            total_linkage: 0,
            clamp_count: 0,
        };
        if self.helicity || self.flux {
            let pf = normalize_uv(s, &self.ranges, self.p_reg);
            row.clamp_count = pf.clamp_count;
            if self.helicity {
                let omega = omega_field(&pf, &self.bc);
                row.h_coulomb = coulomb_helicity(&omega).0;
            }
            if self.flux {
                let (du, dv) = fhn_rhs(s, &self.params, &self.bc);
                let psi_a = analytic_potential(&pf, &self.bc);
                let rate = dpsi_dt(&pf, (&du, &dv), &self.ranges, &self.bc);
                let report = helicity_flux(&psi_a, &rate, &self.bc);
                row.flux_total = report.total;
                row.per_face_flux = report.per_face;
            }
        }
        let mut pairs = Vec::new();
        if self.curves {
            for &pair in &self.iso_pairs {
                let curves = extract_intersection_curves(&s.u, &s.v, pair);
                row.curve_count += curves.closed_count();
                row.open_curve_count += curves.open_count();
                let links = self.linking.then(|| link_report(&curves.curves));
                if let Some(l) = &links {
                    row.total_linkage += l.total_linkage;
                }
                pairs.push(PairResult {
                    pair,
                    curves,
                    links,
                });
            }
        }
        SnapshotDiagnostics { row, pairs }
    }
}

pub fn time_tag(t: f64) -> String {
    format!("{t:.4}")
}

pub fn level_tag(x: f64) -> String {
    format!("{x:.4}")
}

pub fn snapshot_name(t: f64) -> String {
    format!("snap_t{}.bin", time_tag(t))
}

pub fn surface_name(field: &str, level: f64, t: f64) -> String {
    format!("surf_{field}_{}_t{}.vtk", level_tag(level), time_tag(t))
}

pub fn curves_name(pair: IsoPair, t: f64) -> String {
    format!(
        "curves_{}_{}_t{}.vtk",
        level_tag(pair.u0),
        level_tag(pair.v0),
        time_tag(t)
    )
}

pub fn links_name(pair: IsoPair, t: f64) -> String {
    format!(
        "links_{}_{}_t{}.csv",
        level_tag(pair.u0),
        level_tag(pair.v0),
        time_tag(t)
    )
}

/// Pairwise linking table: one row per unordered pair of closed curves.
pub fn links_csv(report: &LinkReport) -> String {
    let mut s = String::from("i,j,link,rounded,residual\n");
    for (i, j, l, r) in report.pairs() {
        let _ = writeln!(s, "{i},{j},{l:.16e},{r},{:.16e}", (l - r as f64).abs());
    }
    s
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_pair_files(dir: &Path, t: f64, pr: &PairResult) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let path = dir.join(curves_name(pr.pair, t));
    let title = format!(
        "intersection curves u={} v={} t={}",
        pr.pair.u0, pr.pair.v0, t
    );
    vtk::write_polylines(&path, &pr.curves.curves, &title)?;
    written.push(path);
    if let Some(l) = &pr.links {
        let path = dir.join(links_name(pr.pair, t));
        write_text(&path, &links_csv(l))?;
        written.push(path);
    }
    Ok(written)
}

fn write_surfaces(dir: &Path, s: &MediumState, pairs: &[IsoPair]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut levels: Vec<(&str, f64, &ScalarField)> = Vec::new();
    for p in pairs {
        levels.push(("u", p.u0, &s.u));
        levels.push(("v", p.v0, &s.v));
    }
    levels.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));
    levels.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    for (name, level, field) in levels {
        let mesh = extract_isosurface(field, level);
        let path = dir.join(surface_name(name, level, s.t));
        vtk::write_mesh(&path, &mesh, &format!("{name} = {level} at t = {}", s.t))?;
        written.push(path);
    }
    Ok(written)
}

/// What [`cmd_run`] produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub rows: Vec<DiagnosticsRow>,
    pub files: Vec<PathBuf>,
    pub steps: u64,
    pub dt: f64,
}

/// Simulates the configured run and writes all enabled artifacts into
/// `cfg.out_dir`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunSummary> {
    let dir = cfg.out_dir.clone();
    ensure_dir(&dir)?;
    let resolved = dir.join("config_resolved.txt");
    write_text(&resolved, &cfg.to_text())?;
    let mut files = vec![resolved];

    let s0 = cfg.initial_state()?;
    let ctx = DiagnosticContext::from_config(cfg, &s0)?;
    let schedule = cfg.schedule();
    let dt = schedule.dt.unwrap_or_else(|| {
        crate::dynamics::stable_dt(s0.grid(), &cfg.params, schedule.safety, schedule.bound)
    });
    let csv_path = dir.join("timeseries.csv");
    let mut csv = format!("{TIMESERIES_HEADER}\n");
    let mut rows = Vec::new();

    let trajectory = run_simulation(&s0, &cfg.params, &ctx.bc, &schedule, |s| {
        if cfg.write_snapshots {
            let path = dir.join(snapshot_name(s.t));
            write_snapshot(
                &path,
                &Snapshot {
                    state: s.clone(),
                    params: cfg.params,
                    bc: ctx.bc,
                },
            )?;
            files.push(path);
        }
        let d = ctx.evaluate(s);
        if cfg.write_surfaces {
            files.extend(write_surfaces(&dir, s, &cfg.iso_pairs)?);
        }
        for pr in &d.pairs {
            files.extend(write_pair_files(&dir, s.t, pr)?);
        }
        csv.push_str(&d.row.to_csv());
        csv.push('\n');
        rows.push(d.row);
        Ok(())
    })?;
    write_text(&csv_path, &csv)?;
    files.push(csv_path);
    Ok(RunSummary {
        rows,
        files,
        steps: trajectory.last().map_or(0, |s| s.step),
        dt,
    })
}

/// Writes the configured initial state as a snapshot; returns its path.
pub fn cmd_ic(cfg: &RunConfig) -> Result<PathBuf> {
    ensure_dir(&cfg.out_dir)?;
    let s0 = cfg.initial_state()?;
    let path = cfg.out_dir.join(snapshot_name(s0.t));
    write_snapshot(
        &path,
        &Snapshot {
            state: s0,
            params: cfg.params,
            bc: cfg.boundary()?,
        },
    )?;
    Ok(path)
}

/// Extracts curves for every configured level pair from a snapshot and
/// writes the curve and link files.
pub fn cmd_curves(cfg: &RunConfig, snapshot: &Path) -> Result<(Vec<PairResult>, Vec<PathBuf>)> {
    let snap = read_snapshot(snapshot)?;
    ensure_dir(&cfg.out_dir)?;
    let mut files = Vec::new();
    let mut results = Vec::new();
    for &pair in &cfg.iso_pairs {
        let curves = extract_intersection_curves(&snap.state.u, &snap.state.v, pair);
        let links = Some(link_report(&curves.curves));
        let pr = PairResult {
            pair,
            curves,
            links,
        };
        files.extend(write_pair_files(&cfg.out_dir, snap.state.t, &pr)?);
        results.push(pr);
    }
    Ok((results, files))
}

/// Links all curves read from the given VTK files.
pub fn cmd_link(cfg: &RunConfig, inputs: &[PathBuf]) -> Result<(LinkReport, PathBuf)> {
    let mut curves: Vec<Polyline> = Vec::new();
    for p in inputs {
        curves.extend(vtk::read_polylines(p)?);
    }
    let report = link_report(&curves);
    ensure_dir(&cfg.out_dir)?;
    let path = cfg.out_dir.join("links.csv");
    write_text(&path, &links_csv(&report))?;
    Ok((report, path))
}

/// Helicity and boundary flux of a stored snapshot. The normalization
/// window is the configured one, or else derived from the snapshot itself.
pub fn cmd_helicity(cfg: &RunConfig, snapshot: &Path) -> Result<DiagnosticsRow> {
    let snap = read_snapshot(snapshot)?;
    let mut ctx = DiagnosticContext::from_config(cfg, &snap.state)?;
    ctx.params = snap.params;
    ctx.bc = snap.bc;
    ctx.curves = false;
    ctx.linking = false;
    ctx.helicity = true;
    ctx.flux = true;
    Ok(ctx.evaluate(&snap.state).row)
}

/// Per-face names in `timeseries.csv` column order.
pub fn face_columns() -> [&'static str; 6] {
    Face::ALL.map(|f| f.name())
}
