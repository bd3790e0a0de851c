//! Uniform cubic lattice, boundary specifications, and grid-sampled fields.
//!
//! Nodes are stored x-fastest: `index = i + n * (j + n * k)`. On bounded
//! axes the first and last nodes sit exactly on the faces `-L` and `+L`. On
//! periodic axes the node at `+L` is dropped because it duplicates `-L`.

use std::fmt;

use crate::error::{Error, Result};

/// Smallest node count accepted per axis.
pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKind {
    /// Boundary nodes on both faces (Dirichlet or Neumann).
    Bounded,
    /// Wraps around; both faces identified.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    half_edge: f64,
    n: usize,
    axes: [AxisKind; 3],
    spacing: [f64; 3],
}

impl Grid3 {
    /// Builds the lattice on `[-L, L]^3` with `n` nodes per axis.
    pub fn new(half_edge: f64, n: usize, axes: [AxisKind; 3]) -> Result<Self> {
        if !(half_edge.is_finite() && half_edge > 0.0) {
            return Err(Error::Config(format!(
                "half-edge length must be positive and finite, got {half_edge}"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::Config(format!(
                "need at least {MIN_NODES} nodes per axis, got {n}"
            )));
        }
        let spacing = axes.map(|kind| match kind {
            AxisKind::Bounded => 2.0 * half_edge / (n - 1) as f64,
            AxisKind::Periodic => 2.0 * half_edge / n as f64,
        });
        Ok(Self {
            half_edge,
            n,
            axes,
            spacing,
        })
    }

    /// All three axes bounded.
    pub fn bounded(half_edge: f64, n: usize) -> Result<Self> {
        Self::new(half_edge, n, [AxisKind::Bounded; 3])
    }

    /// All three axes periodic.
    pub fn periodic(half_edge: f64, n: usize) -> Result<Self> {
        Self::new(half_edge, n, [AxisKind::Periodic; 3])
    }

    pub fn half_edge(&self) -> f64 {
        self.half_edge
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axis_kind(&self, axis: usize) -> AxisKind {
        self.axes[axis]
    }

    pub fn axes(&self) -> [AxisKind; 3] {
        self.axes
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn ijk(&self, index: usize) -> [usize; 3] {
        let n = self.n;
        [index % n, (index / n) % n, index / (n * n)]
    }

    /// Coordinate of node `i` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -self.half_edge + i as f64 * self.spacing[axis]
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.coord(0, i), self.coord(1, j), self.coord(2, k)]
    }

    pub fn node_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(axis, i)).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid3) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for Grid3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "grid(L={}, n={}, axes={:?})",
            self.half_edge, self.n, self.axes
        )
    }
}

/// One of the six faces of the cubic domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::XMin,
        Face::XMax,
        Face::YMin,
        Face::YMax,
        Face::ZMin,
        Face::ZMax,
    ];

    pub fn axis(self) -> usize {
        self as usize / 2
    }

    pub fn is_upper(self) -> bool {
        self as usize % 2 == 1
    }

    /// Sign of the outward normal along `axis()`.
    pub fn outward_sign(self) -> f64 {
        if self.is_upper() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::XMin => "xmin",
            Face::XMax => "xmax",
            Face::YMin => "ymin",
            Face::YMax => "ymax",
            Face::ZMin => "zmin",
            Face::ZMax => "zmax",
        }
    }

    pub fn from_index(index: usize) -> Face {
        Face::ALL[index]
    }
}

/// Boundary condition on one face. Dirichlet carries the pinned `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceCondition {
    Dirichlet { u: f64, v: f64 },
    NeumannZero,
    Periodic,
}

impl FaceCondition {
    pub fn is_periodic(&self) -> bool {
        matches!(self, FaceCondition::Periodic)
    }
}

/// How a derivative stencil treats the wall at one end of a bounded axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    /// Second-order one-sided differences using interior nodes.
    OneSided,
    /// Mirror ghost node, zero normal derivative.
    Mirror,
}

/// Stencil rule for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRule {
    Periodic,
    Bounded { lower: Wall, upper: Wall },
}

impl AxisRule {
    /// Periodic axes wrap, bounded axes use one-sided walls.
    pub fn for_grid(grid: &Grid3) -> [AxisRule; 3] {
        grid.axes().map(|kind| match kind {
            AxisKind::Periodic => AxisRule::Periodic,
            AxisKind::Bounded => AxisRule::Bounded {
                lower: Wall::OneSided,
                upper: Wall::OneSided,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub faces: [FaceCondition; 6],
}

impl BoundarySpec {
    pub fn new(faces: [FaceCondition; 6]) -> Result<Self> {
        let spec = Self { faces };
        spec.validate()?;
        Ok(spec)
    }

    pub fn all_dirichlet(u: f64, v: f64) -> Self {
        Self {
            faces: [FaceCondition::Dirichlet { u, v }; 6],
        }
    }

    pub fn all_neumann() -> Self {
        Self {
            faces: [FaceCondition::NeumannZero; 6],
        }
    }

    pub fn all_periodic() -> Self {
        Self {
            faces: [FaceCondition::Periodic; 6],
        }
    }

    /// Same condition on both faces of each axis.
    pub fn per_axis(conds: [FaceCondition; 3]) -> Self {
        Self {
            faces: [conds[0], conds[0], conds[1], conds[1], conds[2], conds[2]],
        }
    }

    pub fn face(&self, face: Face) -> FaceCondition {
        self.faces[face as usize]
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            let lo = self.faces[2 * axis].is_periodic();
            let hi = self.faces[2 * axis + 1].is_periodic();
            if lo != hi {
                return Err(Error::Config(format!(
                    "periodic faces must come in pairs (axis {axis})"
                )));
            }
        }
        for cond in &self.faces {
            if let FaceCondition::Dirichlet { u, v } = cond {
                if !(u.is_finite() && v.is_finite()) {
                    return Err(Error::Config("Dirichlet values must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn axis_kinds(&self) -> [AxisKind; 3] {
        [0, 1, 2].map(|axis| {
            if self.faces[2 * axis].is_periodic() {
                AxisKind::Periodic
            } else {
                AxisKind::Bounded
            }
        })
    }

    /// Fails unless the periodic axes of `self` and `grid` agree.
    pub fn check_grid(&self, grid: &Grid3) -> Result<()> {
        self.validate()?;
        if self.axis_kinds() != grid.axes() {
            return Err(Error::Config(format!(
                "boundary axes {:?} do not match {grid}",
                self.axis_kinds()
            )));
        }
        Ok(())
    }

    pub fn rules(&self) -> [AxisRule; 3] {
        let wall = |c: FaceCondition| match c {
            FaceCondition::NeumannZero => Wall::Mirror,
            _ => Wall::OneSided,
        };
        [0, 1, 2].map(|axis| {
            let lo = self.faces[2 * axis];
            let hi = self.faces[2 * axis + 1];
            if lo.is_periodic() {
                AxisRule::Periodic
            } else {
                AxisRule::Bounded {
                    lower: wall(lo),
                    upper: wall(hi),
                }
            }
        })
    }

    pub fn has_dirichlet(&self) -> bool {
        self.faces
            .iter()
            .any(|c| matches!(c, FaceCondition::Dirichlet { .. }))
    }

    /// Pinned `(u, v)` at node `(i, j, k)`, if it lies on a Dirichlet face.
    /// Edge and corner nodes take the first matching face in `Face::ALL` order.
    #[inline]
    pub fn dirichlet_at(&self, grid: &Grid3, ijk: [usize; 3]) -> Option<(f64, f64)> {
        let last = grid.n() - 1;
        for face in Face::ALL {
            if let FaceCondition::Dirichlet { u, v } = self.faces[face as usize] {
                let c = ijk[face.axis()];
                let on_face = if face.is_upper() { c == last } else { c == 0 };
                if on_face {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Per-node pin mask; `None` for free nodes.
    pub fn dirichlet_nodes(&self, grid: &Grid3) -> Vec<Option<(f64, f64)>> {
        (0..grid.len())
            .map(|idx| self.dirichlet_at(grid, grid.ijk(idx)))
            .collect()
    }
}

/// Real values at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid3,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {grid}",
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid3, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y, z)` at every node.
    pub fn from_fn(grid: Grid3, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let n = grid.n();
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(n * n)
            .enumerate()
            .for_each(|(k, plane)| {
                let z = grid.coord(2, k);
                for j in 0..n {
                    let y = grid.coord(1, j);
                    for i in 0..n {
                        plane[i + n * j] = f(grid.coord(0, i), y, z);
                    }
                }
            });
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, j, k)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Root-mean-square over nodes.
    pub fn rms(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (s / self.values.len() as f64).sqrt()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        Self {
            grid: self.grid,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Three-component field on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub x: ScalarField,
    pub y: ScalarField,
    pub z: ScalarField,
}

impl VectorField3 {
    pub fn new(x: ScalarField, y: ScalarField, z: ScalarField) -> Result<Self> {
        x.grid().check_same(y.grid())?;
        x.grid().check_same(z.grid())?;
        Ok(Self { x, y, z })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
            z: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        Self {
            x: ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[0]),
            y: ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[1]),
            z: ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[2]),
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.x.grid()
    }

    pub fn component(&self, axis: usize) -> &ScalarField {
        match axis {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis {axis} out of range"),
        }
    }

    pub fn components(&self) -> [&ScalarField; 3] {
        [&self.x, &self.y, &self.z]
    }

    #[inline]
    pub fn at_index(&self, idx: usize) -> [f64; 3] {
        [
            self.x.values()[idx],
            self.y.values()[idx],
            self.z.values()[idx],
        ]
    }

    /// Builds a field from per-node vectors.
    pub fn from_nodes(grid: Grid3, f: impl Fn(usize) -> [f64; 3] + Sync + Send) -> Self {
        use rayon::prelude::*;
        let vecs: Vec<[f64; 3]> = (0..grid.len()).into_par_iter().map(f).collect();
        let comp = |a: usize| ScalarField {
            grid,
            values: vecs.iter().map(|v| v[a]).collect(),
        };
        Self {
            x: comp(0),
            y: comp(1),
            z: comp(2),
        }
    }

    pub fn dot(&self, other: &Self) -> ScalarField {
        use rayon::prelude::*;
        let grid = *self.grid();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let a = self.at_index(i);
                let b = other.at_index(i);
                a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::from_nodes(*self.grid(), |i| cross(self.at_index(i), other.at_index(i)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x.zip_map(&other.x, |a, b| a + b),
            y: self.y.zip_map(&other.y, |a, b| a + b),
            z: self.z.zip_map(&other.z, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            x: self.x.zip_map(&other.x, |a, b| a - b),
            y: self.y.zip_map(&other.y, |a, b| a - b),
            z: self.z.zip_map(&other.z, |a, b| a - b),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            x: self.x.map(|a| a * s),
            y: self.y.map(|a| a * s),
            z: self.z.map(|a| a * s),
        }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let grid = *self.grid();
        let values = (0..grid.len())
            .map(|i| {
                let a = self.at_index(i);
                (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
            })
            .collect();
        ScalarField { grid, values }
    }
}

#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
