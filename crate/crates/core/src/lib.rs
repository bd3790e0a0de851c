//! Excitable-media simulation with topological diagnostics.
//!
//! The crate integrates the FitzHugh-Nagumo reaction-diffusion system on a
//! uniform cubic grid, maps the state to a unit-disk phase field, and
//! measures how the intersection curves of `u` and `v` level surfaces are
//! entangled: through the helicity of the associated divergence-free field,
//! its flux through the domain walls, and Gauss linking numbers of the
//! extracted curves.

pub mod calculus;
pub mod config;
pub mod curves;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod isosurface;
pub mod linking;
mod mc_tables;
pub mod pipeline;
pub mod snapshot;
pub mod spectral;
pub mod topo;
pub mod vtk;

pub use config::RunConfig;
pub use curves::{extract_intersection_curves, CurveSet, IsoPair, Polyline};
pub use dynamics::{
    equilibrium_state, fhn_rhs, hopf_initial_condition, run_simulation, stable_dt, step_euler,
    HopfICParams, MediumState, ModelParams, RunSchedule, StabilityBound,
};
pub use error::{Error, Result};
pub use grid::{AxisKind, BoundarySpec, Face, FaceCondition, Grid3, ScalarField, VectorField3};
pub use isosurface::{extract_isosurface, TriMesh};
pub use linking::{gauss_linking, link_report, LinkReport};
pub use pipeline::DiagnosticsRow;
pub use snapshot::Snapshot;
pub use topo::{HelicityRecord, NormalizationRanges, PhaseField};
