use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use knotmedia::pipeline::{cmd_curves, cmd_helicity, cmd_ic, cmd_link, cmd_run, face_columns};
use knotmedia::{Error, Result, RunConfig};

#[derive(Parser)]
#[command(
    name = "knotmedia",
    version,
    about = "Excitable-media simulation with helicity and linking diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value configuration file; defaults apply for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` setting, applied after the file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write snapshots, surfaces, curves and timeseries.csv.
    Run(Common),
    /// Write the initial state as a snapshot.
    Ic(Common),
    /// Extract intersection curves and their linking from a snapshot.
    Curves {
        snapshot: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Helicity and boundary flux of a snapshot.
    Helicity {
        snapshot: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Gauss linking matrix of the curves stored in VTK files.
    Link {
        #[arg(required = true)]
        curves: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&c.overrides)?;
    if let Some(out) = &c.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let cfg = load(&c)?;
            let s = cmd_run(&cfg)?;
            println!("{} steps, dt = {:e}", s.steps, s.dt);
            for r in &s.rows {
                println!(
                    "t = {:.4}  H = {:+.6e}  flux = {:+.6e}  curves = {} (+{} open)  linkage = {}",
                    r.t,
                    r.h_coulomb,
                    r.flux_total,
                    r.curve_count,
                    r.open_curve_count,
                    r.total_linkage
                );
            }
            println!("wrote {} files to {}", s.files.len(), cfg.out_dir.display());
        }
        Command::Ic(c) => {
            let path = cmd_ic(&load(&c)?)?;
            println!("{}", path.display());
        }
        Command::Curves { snapshot, common } => {
            let (results, files) = cmd_curves(&load(&common)?, &snapshot)?;
            for r in &results {
                let links = r.links.as_ref().expect("linking enabled");
                println!(
                    "u0 = {}, v0 = {}: {} closed, {} open, {} defects, total linkage {}",
                    r.pair.u0,
                    r.pair.v0,
                    r.curves.closed_count(),
                    r.curves.open_count(),
                    r.curves.defects,
                    links.total_linkage
                );
            }
            println!("wrote {} files", files.len());
        }
        Command::Helicity { snapshot, common } => {
            let r = cmd_helicity(&load(&common)?, &snapshot)?;
            println!("t = {}", r.t);
            println!("H = {:e}", r.h_coulomb);
            println!("flux = {:e}", r.flux_total);
            for (name, f) in face_columns().iter().zip(r.per_face_flux) {
                println!("  {name}: {f:e}");
            }
            println!("clamped nodes = {}", r.clamp_count);
        }
        Command::Link { curves, common } => {
            let (report, path) = cmd_link(&load(&common)?, &curves)?;
            println!(
                "{} closed curves ({} open excluded), total linkage {}",
                report.curves.len(),
                report.open_excluded,
                report.total_linkage
            );
            for (i, j, l, r) in report.pairs() {
                println!("  ({i}, {j}): {l:+.6} -> {r}");
            }
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
