//! Interior Dirichlet and Neumann Helmholtz problems with point-source data.
//!
//! For a source `y` inside the obstacle `D`, the scattered field `u^s(., y)`
//! solves `Δu + k²u = 0` in `D` with `u = -Φ_k(., y)` (Dirichlet) or
//! `∂u/∂ν = -∂Φ_k(., y)/∂ν` (Neumann) on `∂D`. Two backends: an
//! addition-theorem series for circles and the method of fundamental
//! solutions for general smooth curves.

mod disk;
mod mfs;

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{BoundaryCurve, GeometryError, Vec2};
use crate::linalg::{CMatrix, LinalgError};
use crate::specfun::{SpecFunError, Wavenumber};

pub use disk::{solve_disk_analytic, DiskSolver, DISK_MAX_ORDER};
pub use mfs::{mfs_build, mfs_eval, MfsGeometry, MfsModel, MfsParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteriorError {
    #[error("interior problem needs a non-real wavenumber, got {0}")]
    RealWavenumber(Complex64),
    #[error("analytic backend requires a circular obstacle")]
    NotADisk,
    #[error("point ({0}, {1}) is not strictly inside the obstacle")]
    OutsideDomain(f64, f64),
    #[error("disk series did not converge within {0} terms")]
    Nonconvergence(usize),
    #[error("denominator of order {0} underflowed")]
    Underflow(usize),
    #[error("invalid MFS parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("MFS source points must lie outside the obstacle")]
    SourcesInside,
    #[error("MFS rank collapse: kept {kept} singular values, need at least {needed}")]
    RankCollapse { kept: usize, needed: usize },
    #[error("boundary data has {got} values, expected {expected}")]
    DataLength { got: usize, expected: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        })
    }
}

/// Obstacle, boundary condition and a non-real wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorProblem {
    obstacle: BoundaryCurve,
    bc: BoundaryCondition,
    k: Wavenumber,
}

impl InteriorProblem {
    pub fn new(
        obstacle: BoundaryCurve,
        bc: BoundaryCondition,
        k: Wavenumber,
    ) -> Result<Self, InteriorError> {
        if k.is_real() {
            return Err(InteriorError::RealWavenumber(k.value()));
        }
        Ok(Self { obstacle, bc, k })
    }

    pub fn obstacle(&self) -> &BoundaryCurve {
        &self.obstacle
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn k(&self) -> Wavenumber {
        self.k
    }

    pub fn with_k(&self, k: Wavenumber) -> Result<Self, InteriorError> {
        Self::new(self.obstacle.clone(), self.bc, k)
    }

    fn check_inside(&self, p: Vec2) -> Result<(), InteriorError> {
        if self.obstacle.contains(p) {
            Ok(())
        } else {
            Err(InteriorError::OutsideDomain(p.x, p.y))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Analytic,
    Mfs(MfsParams),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::Mfs(_) => "mfs",
        }
    }
}

/// The k-independent part of a backend, built once per obstacle.
#[derive(Debug, Clone)]
pub enum SolverSetup {
    Analytic { radius: f64 },
    Mfs(Arc<MfsGeometry>),
}

impl SolverSetup {
    pub fn new(obstacle: &BoundaryCurve, backend: &Backend) -> Result<Self, InteriorError> {
        match backend {
            Backend::Analytic => Ok(SolverSetup::Analytic {
                radius: obstacle.circle_radius().ok_or(InteriorError::NotADisk)?,
            }),
            Backend::Mfs(params) => Ok(SolverSetup::Mfs(Arc::new(MfsGeometry::new(
                obstacle, params,
            )?))),
        }
    }

    /// Matrix with entry `(j, i) = u^s(x_j, y_i)` for the problem at its `k`.
    /// Returns the matrix and the solver's self-reported relative residual.
    pub fn scatter_matrix(
        &self,
        problem: &InteriorProblem,
        xs: &[Vec2],
        ys: &[Vec2],
    ) -> Result<(CMatrix, f64), InteriorError> {
        for &p in xs.iter().chain(ys) {
            problem.check_inside(p)?;
        }
        match self {
            SolverSetup::Analytic { radius } => {
                let c = problem.obstacle.center();
                let rho = |ps: &[Vec2]| ps.iter().map(|&p| (p - c).norm()).fold(0.0, f64::max);
                let solver = DiskSolver::new(*radius, problem.bc, problem.k, rho(xs), rho(ys))?;
                let xs: Vec<Vec2> = xs.iter().map(|&p| p - c).collect();
                let ys: Vec<Vec2> = ys.iter().map(|&p| p - c).collect();
                Ok((solver.matrix(&xs, &ys)?, solver.tail_estimate()))
            }
            SolverSetup::Mfs(geometry) => {
                let model = MfsModel::build(Arc::clone(geometry), problem.k, problem.bc)?;
                model.scatter_matrix_checked(xs, ys)
            }
        }
    }
}

/// `u^s(x, y)` for each `x` in `xs`.
pub fn point_source_scatter(
    problem: &InteriorProblem,
    backend: &Backend,
    y: Vec2,
    xs: &[Vec2],
) -> Result<Vec<Complex64>, InteriorError> {
    let setup = SolverSetup::new(&problem.obstacle, backend)?;
    let (m, _) = setup.scatter_matrix(problem, xs, &[y])?;
    Ok(m.column(0).iter().copied().collect())
}
