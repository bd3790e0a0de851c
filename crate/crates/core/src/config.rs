//! `key = value` run configuration.
//!
//! Every key is optional; an empty file yields the reference run (L = 5,
//! 100 nodes per axis, equilibrium Dirichlet walls, linked-fibre initial
//! data, snapshots at 0.2, 0.4, 0.6, 0.8). [`RunConfig::to_text`] writes a
//! file that parses back to the same value.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::curves::IsoPair;
use crate::dynamics::{
    equilibrium_state, hopf_initial_condition, HopfICParams, MediumState, ModelParams, RunSchedule,
    StabilityBound,
};
use crate::error::{Error, Result};
use crate::grid::{AxisKind, BoundarySpec, FaceCondition, Grid3};
use crate::topo::{default_p_reg, NormalizationRanges};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Periodic,
}

impl BcKind {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dirichlet" => Ok(BcKind::Dirichlet),
            "neumann" => Ok(BcKind::Neumann),
            "periodic" => Ok(BcKind::Periodic),
            _ => Err(format!(
                "expected dirichlet, neumann or periodic, got `{s}`"
            )),
        }
    }

    fn name(self) -> &'static str {
        match self {
            BcKind::Dirichlet => "dirichlet",
            BcKind::Neumann => "neumann",
            BcKind::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// Linked-fibre data with nonzero helicity.
    Hopf,
    /// Uniform equilibrium state.
    Equilibrium,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub half_edge: f64,
    pub n: usize,
    pub bc: [BcKind; 3],
    /// Pinned `(u, v)` per axis; `None` means the model equilibrium.
    pub dirichlet: [(Option<f64>, Option<f64>); 3],
    pub params: ModelParams,
    pub dt: Option<f64>,
    pub safety: f64,
    pub stability: StabilityBound,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub ic: InitialKind,
    pub hopf: HopfICParams,
    /// Fixed window; `None` derives it from the initial state.
    pub norm_ranges: Option<NormalizationRanges>,
    pub norm_expand: f64,
    pub iso_pairs: Vec<IsoPair>,
    pub p_reg: Option<f64>,
    pub out_dir: PathBuf,
    pub diag_helicity: bool,
    pub diag_flux: bool,
    pub diag_curves: bool,
    pub diag_linking: bool,
    pub write_snapshots: bool,
    pub write_surfaces: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            half_edge: 5.0,
            n: 100,
            bc: [BcKind::Dirichlet; 3],
            dirichlet: [(None, None); 3],
            params: ModelParams::default(),
            dt: None,
            safety: 0.9,
            stability: StabilityBound::ThreeDimensional,
            t_end: 0.8,
            snapshot_times: vec![0.2, 0.4, 0.6, 0.8],
            ic: InitialKind::Hopf,
            hopf: HopfICParams::default(),
            norm_ranges: None,
            norm_expand: 0.1,
            iso_pairs: vec![
                IsoPair::new(-0.7, -0.1),
                IsoPair::new(-0.5, -0.36),
                IsoPair::new(-0.3, -0.3),
            ],
            p_reg: None,
            out_dir: PathBuf::from("out"),
            diag_helicity: true,
            diag_flux: true,
            diag_curves: true,
            diag_linking: true,
            write_snapshots: true,
            write_surfaces: true,
        }
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "half_edge",
    "n",
    "bc_x",
    "bc_y",
    "bc_z",
    "bc_x_dirichlet_u",
    "bc_x_dirichlet_v",
    "bc_y_dirichlet_u",
    "bc_y_dirichlet_v",
    "bc_z_dirichlet_u",
    "bc_z_dirichlet_v",
    "eps",
    "beta",
    "gamma",
    "du",
    "dv",
    "dt",
    "safety",
    "stability",
    "t_end",
    "snapshot_times",
    "ic",
    "lambda1",
    "lambda2",
    "ic_offset",
    "norm_ranges",
    "norm_expand",
    "iso_pairs",
    "p_reg",
    "out_dir",
    "diag_helicity",
    "diag_flux",
    "diag_curves",
    "diag_linking",
    "write_snapshots",
    "write_surfaces",
];

type Parsed<T> = std::result::Result<T, String>;

fn real(s: &str) -> Parsed<f64> {
    let x: f64 = s
        .parse()
        .map_err(|_| format!("expected a number, got `{s}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("value must be finite, got `{s}`"))
    }
}

fn auto_or_real(s: &str) -> Parsed<Option<f64>> {
    if s == "auto" {
        Ok(None)
    } else {
        real(s).map(Some)
    }
}

fn flag(s: &str) -> Parsed<bool> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

fn list(s: &str) -> Parsed<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| real(t.trim())).collect()
}

fn pairs(s: &str) -> Parsed<Vec<IsoPair>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (a, b) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("iso pair `{}` must be written u0:v0", item.trim()))?;
            Ok(IsoPair::new(real(a.trim())?, real(b.trim())?))
        })
        .collect()
}

fn opt_real(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".to_string(), |x| format!("{x:?}"))
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl RunConfig {
    /// Parses a configuration file. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigLine {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            if let Some(first) = seen.insert(key.to_string(), line) {
                return Err(Error::ConfigLine {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {first})"),
                });
            }
            cfg.set(key, value.trim())
                .map_err(|message| Error::ConfigLine { line, message })?;
        }
        cfg.check(|key| seen.get(key).copied())?;
        Ok(cfg)
    }

    /// Applies `key=value` overrides on top of an already parsed config.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` must be key=value")))?;
            self.set(key.trim(), value.trim())
                .map_err(|m| Error::Config(format!("override `{o}`: {m}")))?;
        }
        self.check(|_| None)
    }

    fn set(&mut self, key: &str, value: &str) -> Parsed<()> {
        let axis = |k: &str| AXES.iter().position(|a| *a == k);
        match key {
            "half_edge" => self.half_edge = real(value)?,
            "n" => {
                self.n = value
                    .parse()
                    .map_err(|_| format!("expected a node count, got `{value}`"))?
            }
            "eps" => self.params.eps = real(value)?,
            "beta" => self.params.beta = real(value)?,
            "gamma" => self.params.gamma = real(value)?,
            "du" => self.params.du = real(value)?,
            "dv" => self.params.dv = real(value)?,
            "dt" => self.dt = auto_or_real(value)?,
            "safety" => self.safety = real(value)?,
            "stability" => {
                self.stability = match value {
                    "three_dimensional" | "3d" => StabilityBound::ThreeDimensional,
                    "one_dimensional" | "1d" => StabilityBound::OneDimensional,
                    _ => return Err(format!("unknown stability bound `{value}`")),
                }
            }
            "t_end" => self.t_end = real(value)?,
            "snapshot_times" => self.snapshot_times = list(value)?,
            "ic" => {
                self.ic = match value {
                    "hopf" => InitialKind::Hopf,
                    "equilibrium" => InitialKind::Equilibrium,
                    _ => return Err(format!("expected hopf or equilibrium, got `{value}`")),
                }
            }
            "lambda1" => self.hopf.lambda1 = real(value)?,
            "lambda2" => self.hopf.lambda2 = real(value)?,
            "ic_offset" => self.hopf.offset = real(value)?,
            "norm_ranges" => {
                self.norm_ranges = if value == "auto" {
                    None
                } else {
                    let v = list(value)?;
                    if v.len() != 4 {
                        return Err("norm_ranges needs u_min, u_max, v_min, v_max".into());
                    }
                    Some(
                        NormalizationRanges::new(v[0], v[1], v[2], v[3])
                            .map_err(|e| e.to_string())?,
                    )
                }
            }
            "norm_expand" => self.norm_expand = real(value)?,
            "iso_pairs" => self.iso_pairs = pairs(value)?,
            "p_reg" => self.p_reg = auto_or_real(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "diag_helicity" => self.diag_helicity = flag(value)?,
            "diag_flux" => self.diag_flux = flag(value)?,
            "diag_curves" => self.diag_curves = flag(value)?,
            "diag_linking" => self.diag_linking = flag(value)?,
            "write_snapshots" => self.write_snapshots = flag(value)?,
            "write_surfaces" => self.write_surfaces = flag(value)?,
            _ => {
                if let Some(rest) = key.strip_prefix("bc_") {
                    if let Some(a) = axis(rest) {
                        self.bc[a] = BcKind::parse(value)?;
                        return Ok(());
                    }
                    if let Some((ax, field)) = rest.split_once("_dirichlet_") {
                        if let Some(a) = axis(ax) {
                            let x = auto_or_real(value)?;
                            match field {
                                "u" => self.dirichlet[a].0 = x,
                                "v" => self.dirichlet[a].1 = x,
                                _ => return Err(format!("unknown key `{key}`")),
                            }
                            return Ok(());
                        }
                    }
                }
                return Err(format!("unknown key `{key}`"));
            }
        }
        Ok(())
    }

    /// Cross-key validation. `line_of` maps a key to the line that set it.
    fn check(&self, line_of: impl Fn(&str) -> Option<usize>) -> Result<()> {
        let fail = |key: &str, message: String| match line_of(key) {
            Some(line) => Error::ConfigLine { line, message },
            None => Error::Config(message),
        };
        for a in 0..3 {
            let (u, v) = self.dirichlet[a];
            if self.bc[a] != BcKind::Dirichlet && (u.is_some() || v.is_some()) {
                let key = if u.is_some() {
                    format!("bc_{}_dirichlet_u", AXES[a])
                } else {
                    format!("bc_{}_dirichlet_v", AXES[a])
                };
                return Err(fail(
                    &key,
                    format!(
                        "`{key}` conflicts with `bc_{} = {}`",
                        AXES[a],
                        self.bc[a].name()
                    ),
                ));
            }
        }
        self.params
            .validate()
            .map_err(|e| fail("eps", e.to_string()))?;
        self.grid().map_err(|e| fail("n", e.to_string()))?;
        if let Some(dt) = self.dt {
            if dt <= 0.0 {
                return Err(fail("dt", format!("dt must be positive, got {dt}")));
            }
        }
        if !self.safety.is_finite() || self.safety <= 0.0 {
            return Err(fail("safety", "safety factor must be positive".into()));
        }
        if !self.norm_expand.is_finite() || self.norm_expand < 0.0 {
            return Err(fail("norm_expand", "norm_expand must be >= 0".into()));
        }
        if let Some(p) = self.p_reg {
            if p <= 0.0 {
                return Err(fail("p_reg", "p_reg must be positive".into()));
            }
        }
        self.schedule()
            .validate()
            .map_err(|e| fail("snapshot_times", e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid3> {
        let axes = self.bc.map(|k| match k {
            BcKind::Periodic => AxisKind::Periodic,
            _ => AxisKind::Bounded,
        });
        Grid3::new(self.half_edge, self.n, axes)
    }

    /// Boundary conditions with unset Dirichlet values filled from the
    /// model equilibrium.
    pub fn boundary(&self) -> Result<BoundarySpec> {
        let needs_eq = (0..3).any(|a| {
            self.bc[a] == BcKind::Dirichlet
                && (self.dirichlet[a].0.is_none() || self.dirichlet[a].1.is_none())
        });
        let eq = if needs_eq {
            Some(equilibrium_state(&self.params)?)
        } else {
            None
        };
        let conds = [0, 1, 2].map(|a| match self.bc[a] {
            BcKind::Dirichlet => {
                let (ue, ve) = eq.unwrap_or((f64::NAN, f64::NAN));
                FaceCondition::Dirichlet {
                    u: self.dirichlet[a].0.unwrap_or(ue),
                    v: self.dirichlet[a].1.unwrap_or(ve),
                }
            }
            BcKind::Neumann => FaceCondition::NeumannZero,
            BcKind::Periodic => FaceCondition::Periodic,
        });
        BoundarySpec::new(BoundarySpec::per_axis(conds).faces)
    }

    pub fn schedule(&self) -> RunSchedule {
        RunSchedule {
            t_end: self.t_end,
            snapshot_times: self.snapshot_times.clone(),
            dt: self.dt,
            safety: self.safety,
            bound: self.stability,
        }
    }

    /// Initial state with Dirichlet nodes already pinned.
    pub fn initial_state(&self) -> Result<MediumState> {
        let grid = self.grid()?;
        let bc = self.boundary()?;
        let mut s = match self.ic {
            InitialKind::Hopf => hopf_initial_condition(&grid, &self.hopf),
            InitialKind::Equilibrium => {
                let (u, v) = equilibrium_state(&self.params)?;
                MediumState::uniform(grid, u, v)
            }
        };
        s.pin_boundary(&bc);
        Ok(s)
    }

    /// Normalization window: configured, or derived from `s0`.
    pub fn ranges(&self, s0: &MediumState) -> Result<NormalizationRanges> {
        match self.norm_ranges {
            Some(r) => Ok(r),
            None => NormalizationRanges::from_state(s0, self.norm_expand),
        }
    }

    pub fn p_reg_for(&self, grid: &Grid3) -> f64 {
        self.p_reg
            .unwrap_or_else(|| default_p_reg(grid.min_spacing()))
    }

    /// Fully resolved configuration in the input format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("half_edge", format!("{:?}", self.half_edge));
        put("n", self.n.to_string());
        for a in 0..3 {
            put(&format!("bc_{}", AXES[a]), self.bc[a].name().into());
        }
        for a in 0..3 {
            if self.bc[a] == BcKind::Dirichlet {
                put(
                    &format!("bc_{}_dirichlet_u", AXES[a]),
                    opt_real(self.dirichlet[a].0),
                );
                put(
                    &format!("bc_{}_dirichlet_v", AXES[a]),
                    opt_real(self.dirichlet[a].1),
                );
            }
        }
        let p = &self.params;
        put("eps", format!("{:?}", p.eps));
        put("beta", format!("{:?}", p.beta));
        put("gamma", format!("{:?}", p.gamma));
        put("du", format!("{:?}", p.du));
        put("dv", format!("{:?}", p.dv));
        put("dt", opt_real(self.dt));
        put("safety", format!("{:?}", self.safety));
        put(
            "stability",
            match self.stability {
                StabilityBound::ThreeDimensional => "three_dimensional",
                StabilityBound::OneDimensional => "one_dimensional",
            }
            .into(),
        );
        put("t_end", format!("{:?}", self.t_end));
        put("snapshot_times", join(&self.snapshot_times));
        put(
            "ic",
            match self.ic {
                InitialKind::Hopf => "hopf",
                InitialKind::Equilibrium => "equilibrium",
            }
            .into(),
        );
        put("lambda1", format!("{:?}", self.hopf.lambda1));
        put("lambda2", format!("{:?}", self.hopf.lambda2));
        put("ic_offset", format!("{:?}", self.hopf.offset));
        put(
            "norm_ranges",
            match self.norm_ranges {
                None => "auto".into(),
                Some(r) => join(&[r.u_min, r.u_max, r.v_min, r.v_max]),
            },
        );
        put("norm_expand", format!("{:?}", self.norm_expand));
        put(
            "iso_pairs",
            self.iso_pairs
                .iter()
                .map(|p| format!("{:?}:{:?}", p.u0, p.v0))
                .collect::<Vec<_>>()
                .join(", "),
        );
        put("p_reg", opt_real(self.p_reg));
        put("out_dir", self.out_dir.display().to_string());
        put("diag_helicity", self.diag_helicity.to_string());
        put("diag_flux", self.diag_flux.to_string());
        put("diag_curves", self.diag_curves.to_string());
        put("diag_linking", self.diag_linking.to_string());
        put("write_snapshots", self.write_snapshots.to_string());
        put("write_surfaces", self.write_surfaces.to_string());
        if let Ok(bc) = self.boundary() {
            for (a, cond) in bc.faces.iter().step_by(2).enumerate() {
                if let FaceCondition::Dirichlet { u, v } = cond {
                    let _ = writeln!(s, "# resolved {} walls: u = {u:?}, v = {v:?}", AXES[a]);
                }
            }
        }
        s
    }
}
