//! Discrete near-field operator and the regularized near-field equation
//! `Σ_i ω_i u^s(x_j, y_i) g_i = Φ_k(x_j, z)`.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{BoundaryCurve, CurveSampling, Vec2};
use crate::interior::{Backend, InteriorError, InteriorProblem, SolverSetup};
use crate::linalg::{CMatrix, CVector, LinalgError, Svd};
use crate::specfun::{fundamental_solution, SpecFunError, Wavenumber};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NearFieldError {
    #[error(transparent)]
    Interior(#[from] InteriorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("observation point ({0}, {1}) must lie outside the closed obstacle")]
    ObserverInside(f64, f64),
    #[error("regularization parameter must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("dimension mismatch: matrix is {matrix}, vector has {vector} entries")]
    Dimension { matrix: usize, vector: usize },
    #[error("need at least 2 probe points")]
    TooSmall,
}

/// `U(k)` with entry `(j, i) = u^s_k(x_j, y_i)` on a shared probe set.
#[derive(Debug, Clone)]
pub struct NearFieldMatrix {
    k: Wavenumber,
    entries: CMatrix,
    weights: Vec<f64>,
    backend: &'static str,
    solver_residual: f64,
}

impl NearFieldMatrix {
    /// Wraps a precomputed matrix; `weights` are the quadrature weights `ω_i`.
    pub fn from_entries(
        k: Wavenumber,
        entries: CMatrix,
        weights: Vec<f64>,
        backend: &'static str,
    ) -> Result<Self, NearFieldError> {
        if entries.nrows() != entries.ncols() || entries.ncols() != weights.len() {
            return Err(NearFieldError::Dimension {
                matrix: entries.nrows(),
                vector: weights.len(),
            });
        }
        Ok(Self {
            k,
            entries,
            weights,
            backend,
            solver_residual: 0.0,
        })
    }

    pub fn k(&self) -> Wavenumber {
        self.k
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn backend(&self) -> &'static str {
        self.backend
    }

    /// Relative residual reported by the interior solver.
    pub fn solver_residual(&self) -> f64 {
        self.solver_residual
    }

    /// `A = U diag(ω)`.
    pub fn weighted(&self) -> CMatrix {
        let mut a = self.entries.clone();
        for (i, mut col) in a.column_iter_mut().enumerate() {
            col *= Complex64::from(self.weights[i]);
        }
        a
    }

    /// `max |U - U^T| / max |U|`.
    pub fn asymmetry(&self) -> f64 {
        let u = &self.entries;
        let scale = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for j in 0..u.nrows() {
            for i in j + 1..u.ncols() {
                worst = worst.max((u[(j, i)] - u[(i, j)]).norm());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// Row-major `re,im` pairs after a `# nearfield k=... N=...` header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# nearfield k={} N={}", self.k, self.len())?;
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:e},{:e}", v.re, v.im)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// One interior solve per probe source, all evaluated on the probe points.
pub fn assemble_with(
    setup: &SolverSetup,
    problem: &InteriorProblem,
    probe: &CurveSampling,
    backend: &'static str,
) -> Result<NearFieldMatrix, NearFieldError> {
    if probe.len() < 2 {
        return Err(NearFieldError::TooSmall);
    }
    let (entries, solver_residual) = setup.scatter_matrix(problem, &probe.points, &probe.points)?;
    Ok(NearFieldMatrix {
        k: problem.k(),
        entries,
        weights: probe.weights.clone(),
        backend,
        solver_residual,
    })
}

pub fn assemble(
    problem: &InteriorProblem,
    probe: &CurveSampling,
    backend: &Backend,
) -> Result<NearFieldMatrix, NearFieldError> {
    let setup = SolverSetup::new(problem.obstacle(), backend)?;
    assemble_with(&setup, problem, probe, backend.name())
}

/// `(Φ_k(x_j, z))_j` for an observation point `z` outside the closed obstacle.
pub fn rhs(
    k: Wavenumber,
    probe: &CurveSampling,
    z: Vec2,
    obstacle: &BoundaryCurve,
) -> Result<CVector, NearFieldError> {
    check_observer(obstacle, z)?;
    let values = probe
        .points
        .iter()
        .map(|&x| fundamental_solution(k, x, z))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(values))
}

/// Rejects `z` inside or on the obstacle.
pub fn check_observer(obstacle: &BoundaryCurve, z: Vec2) -> Result<(), NearFieldError> {
    if obstacle.contains(z) || on_boundary(obstacle, z) {
        return Err(NearFieldError::ObserverInside(z.x, z.y));
    }
    Ok(())
}

fn on_boundary(obstacle: &BoundaryCurve, z: Vec2) -> bool {
    let s = match obstacle.sample_uniform(1024) {
        Ok(s) => s,
        Err(_) => return false,
    };
    s.distance_to(z) <= 1e-9 * obstacle.diameter()
}

/// Regularized density `g` with the `α` used and `‖A g - φ‖`.
#[derive(Debug, Clone)]
pub struct DensityVector {
    pub g: CVector,
    pub alpha: f64,
    pub residual: f64,
}

/// Minimizes `‖A g - φ‖² + α‖g‖²` with `A = U diag(ω)` via the SVD filter
/// `σ/(σ² + α)`.
pub fn tikhonov_solve(
    u: &NearFieldMatrix,
    phi: &CVector,
    alpha: f64,
) -> Result<DensityVector, NearFieldError> {
    let a = u.weighted();
    let svd = Svd::new(a.clone())?;
    tikhonov_with_svd(&svd, &a, phi, alpha)
}

/// Same as [`tikhonov_solve`] with a precomputed SVD of `a`.
pub fn tikhonov_with_svd(
    svd: &Svd,
    a: &CMatrix,
    phi: &CVector,
    alpha: f64,
) -> Result<DensityVector, NearFieldError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(NearFieldError::NonPositiveAlpha(alpha));
    }
    if phi.len() != a.nrows() {
        return Err(NearFieldError::Dimension {
            matrix: a.nrows(),
            vector: phi.len(),
        });
    }
    let b = CMatrix::from_column_slice(phi.len(), 1, phi.as_slice());
    let g = svd.filtered_solve(&b, |s| s / (s * s + alpha));
    let g = CVector::from_column_slice(g.as_slice());
    let residual = (a * &g - phi).norm();
    Ok(DensityVector { g, alpha, residual })
}

/// `α = δ σ_max(A)²`.
pub fn reference_alpha(u: &NearFieldMatrix, delta: f64) -> Result<f64, NearFieldError> {
    let s = Svd::new(u.weighted())?;
    Ok(delta * s.sigma_max().powi(2))
}

pub fn indicator_norm(g: &DensityVector) -> f64 {
    g.g.norm()
}

/// `σ_max/σ_min` of the unweighted `U`; `+∞` when `σ_min` underflows.
pub fn indicator_cond(u: &NearFieldMatrix) -> Result<f64, NearFieldError> {
    if u.len() < 2 {
        return Err(NearFieldError::TooSmall);
    }
    let s = Svd::new(u.entries.clone())?;
    Ok(cond_from(&s))
}

pub(crate) fn cond_from(s: &Svd) -> f64 {
    let lo = s.sigma_min();
    if lo <= f64::MIN_POSITIVE {
        f64::INFINITY
    } else {
        s.sigma_max() / lo
    }
}
