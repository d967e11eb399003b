//! Method of fundamental solutions.
//!
//! The interior field is expanded as `Σ_j c_j Φ_k(x, s_j)` with sources `s_j`
//! on a curve outside the obstacle, and the coefficients are fit to the
//! boundary data at oversampled collocation points by truncated SVD.

use std::sync::Arc;

use num_complex::Complex64;

use super::{BoundaryCondition, InteriorError, InteriorProblem};
use crate::geometry::{polyline_self_intersects, BoundaryCurve, CurveSampling, Vec2};
use crate::linalg::{self, CMatrix, Svd};
use crate::specfun::{fundamental_solution, KernelValue, Wavenumber};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfsParams {
    /// Number of sources `M`.
    pub sources: usize,
    /// Source distance from the boundary; `None` means a quarter of the
    /// obstacle diameter.
    pub offset: Option<f64>,
    /// Collocation points per source.
    pub oversample: f64,
    /// Singular values below `rel_cut * sigma_max` are dropped.
    pub rel_cut: f64,
}

impl Default for MfsParams {
    fn default() -> Self {
        Self {
            sources: 96,
            offset: None,
            oversample: 2.0,
            rel_cut: 1e-12,
        }
    }
}

/// Source, collocation and verification points. Independent of `k`.
#[derive(Debug, Clone)]
pub struct MfsGeometry {
    obstacle: BoundaryCurve,
    params: MfsParams,
    offset: f64,
    sources: Vec<Vec2>,
    collocation: CurveSampling,
    verification: CurveSampling,
}

fn displaced(s: &CurveSampling, d: f64) -> Vec<Vec2> {
    s.points
        .iter()
        .zip(&s.normals)
        .map(|(&p, &n)| p + n * d)
        .collect()
}

/// Keeps samples `0, 2, 4, ...` with doubled weights.
fn every_other(s: CurveSampling) -> CurveSampling {
    let pick = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
    CurveSampling {
        params: pick(&s.params),
        points: s.points.iter().step_by(2).copied().collect(),
        normals: s.normals.iter().step_by(2).copied().collect(),
        weights: pick(&s.weights).into_iter().map(|w| 2.0 * w).collect(),
    }
}

impl MfsGeometry {
    pub fn new(obstacle: &BoundaryCurve, params: &MfsParams) -> Result<Self, InteriorError> {
        if params.sources < 16 {
            return Err(InteriorError::InvalidParameter("at least 16 sources"));
        }
        if !(params.oversample >= 1.0 && params.oversample.is_finite()) {
            return Err(InteriorError::InvalidParameter("oversample must be >= 1"));
        }
        if !(params.rel_cut > 0.0 && params.rel_cut < 1.0) {
            return Err(InteriorError::InvalidParameter("rel_cut must lie in (0, 1)"));
        }
        let offset = params.offset.unwrap_or(0.25 * obstacle.diameter());
        if !(offset > 0.0 && offset.is_finite()) {
            return Err(InteriorError::InvalidParameter("offset must be positive"));
        }
        let m = params.sources;
        let dense = displaced(&obstacle.sample_uniform(4 * m)?, offset);
        if polyline_self_intersects(&dense) {
            return Err(crate::geometry::GeometryError::SelfIntersecting.into());
        }
        let sources = displaced(&obstacle.sample_uniform(m)?, offset);
        if sources.iter().any(|&s| obstacle.contains(s)) {
            return Err(InteriorError::SourcesInside);
        }
        let n_coll = (params.oversample * m as f64).ceil() as usize;
        Ok(Self {
            obstacle: obstacle.clone(),
            params: *params,
            offset,
            sources,
            collocation: obstacle.sample_uniform(n_coll)?,
            verification: every_other(obstacle.sample_staggered(n_coll)?),
        })
    }

    pub fn sources(&self) -> &[Vec2] {
        &self.sources
    }

    pub fn collocation(&self) -> &CurveSampling {
        &self.collocation
    }

    pub fn verification(&self) -> &CurveSampling {
        &self.verification
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn obstacle(&self) -> &BoundaryCurve {
        &self.obstacle
    }

    /// `Φ_k(x_c, s_j)` or `∂_ν Φ_k(x_c, s_j)` on a sampling.
    fn boundary_matrix(
        &self,
        k: Wavenumber,
        bc: BoundaryCondition,
        on: &CurveSampling,
    ) -> Result<CMatrix, InteriorError> {
        source_matrix(k, bc, on, &self.sources)
    }
}

/// Boundary trace (value or normal derivative) of `Φ_k(., s)` for each source.
fn source_matrix(
    k: Wavenumber,
    bc: BoundaryCondition,
    on: &CurveSampling,
    sources: &[Vec2],
) -> Result<CMatrix, InteriorError> {
    let mut m = CMatrix::zeros(on.len(), sources.len());
    for (j, &s) in sources.iter().enumerate() {
        for c in 0..on.len() {
            m[(c, j)] = trace(k, bc, on.points[c], on.normals[c], s)?;
        }
    }
    Ok(m)
}

fn trace(
    k: Wavenumber,
    bc: BoundaryCondition,
    x: Vec2,
    normal: Vec2,
    y: Vec2,
) -> Result<Complex64, InteriorError> {
    Ok(match bc {
        BoundaryCondition::Dirichlet => fundamental_solution(k, x, y)?,
        BoundaryCondition::Neumann => KernelValue::eval(k, x, y)?.normal_derivative(normal),
    })
}

/// Factorized MFS system for one wavenumber.
#[derive(Debug, Clone)]
pub struct MfsModel {
    geometry: Arc<MfsGeometry>,
    k: Wavenumber,
    bc: BoundaryCondition,
    svd: Svd,
    /// Traces of the sources at the verification points.
    check: CMatrix,
    residual: f64,
}

impl MfsModel {
    pub fn build(
        geometry: Arc<MfsGeometry>,
        k: Wavenumber,
        bc: BoundaryCondition,
    ) -> Result<Self, InteriorError> {
        let a = geometry.boundary_matrix(k, bc, &geometry.collocation)?;
        let mut svd = Svd::new(a)?;
        let m = geometry.sources.len();
        let kept = svd.truncate(geometry.params.rel_cut * svd.sigma_max());
        if kept < m / 4 {
            return Err(InteriorError::RankCollapse {
                kept,
                needed: m / 4,
            });
        }
        let check = geometry.boundary_matrix(k, bc, &geometry.verification)?;
        let mut model = Self {
            geometry,
            k,
            bc,
            svd,
            check,
            residual: f64::NAN,
        };
        let center = model.geometry.obstacle.center();
        model.residual = model.solve_point_sources(&[center])?.1;
        Ok(model)
    }

    /// Coefficients for point-source data from each `y` and the relative
    /// boundary residual of the fit at the verification points.
    fn solve_point_sources(&self, ys: &[Vec2]) -> Result<(CMatrix, f64), InteriorError> {
        let g = &self.geometry;
        let data = self.point_source_data(&g.collocation, ys)?;
        let coeffs = self.svd.filtered_solve(&data, |s| 1.0 / s);
        let truth = self.point_source_data(&g.verification, ys)?;
        let fitted = linalg::mul(&self.check, &coeffs);
        let mut worst: f64 = 0.0;
        for (f, t) in fitted.column_iter().zip(truth.column_iter()) {
            worst = worst.max((f - t).norm() / t.norm());
        }
        Ok((coeffs, worst))
    }

    /// Worst relative verification residual over point-source data from `ys`.
    pub fn point_source_residual(&self, ys: &[Vec2]) -> Result<f64, InteriorError> {
        Ok(self.solve_point_sources(ys)?.1)
    }

    /// Columns `-Φ_k(x_c, y_i)` (or the normal derivative) on a sampling.
    fn point_source_data(&self, on: &CurveSampling, ys: &[Vec2]) -> Result<CMatrix, InteriorError> {
        Ok(-source_matrix(self.k, self.bc, on, ys)?)
    }

    pub fn k(&self) -> Wavenumber {
        self.k
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn geometry(&self) -> &MfsGeometry {
        &self.geometry
    }

    pub fn rank(&self) -> usize {
        self.svd.singular_values.len()
    }

    /// Relative verification residual for a source at the obstacle center.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Least-squares source coefficients for data given at the collocation points.
    pub fn coefficients(&self, data: &[Complex64]) -> Result<Vec<Complex64>, InteriorError> {
        let expected = self.geometry.collocation.len();
        if data.len() != expected {
            return Err(InteriorError::DataLength {
                got: data.len(),
                expected,
            });
        }
        let b = CMatrix::from_column_slice(expected, 1, data);
        Ok(self.svd.filtered_solve(&b, |s| 1.0 / s).iter().copied().collect())
    }

    /// `Σ_j c_j Φ_k(x, s_j)`; `x` must lie strictly inside the obstacle.
    pub fn field(&self, coeffs: &[Complex64], x: Vec2) -> Result<Complex64, InteriorError> {
        if !self.geometry.obstacle.contains(x) {
            return Err(InteriorError::OutsideDomain(x.x, x.y));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &s) in coeffs.iter().zip(&self.geometry.sources) {
            acc += c * fundamental_solution(self.k, x, s)?;
        }
        Ok(acc)
    }

    /// Entry `(j, i) = u^s(x_j, y_i)`.
    pub fn scatter_matrix(&self, xs: &[Vec2], ys: &[Vec2]) -> Result<CMatrix, InteriorError> {
        Ok(self.scatter_matrix_checked(xs, ys)?.0)
    }

    /// [`Self::scatter_matrix`] plus the worst verification residual of the
    /// point-source fits.
    pub fn scatter_matrix_checked(
        &self,
        xs: &[Vec2],
        ys: &[Vec2],
    ) -> Result<(CMatrix, f64), InteriorError> {
        let (coeffs, residual) = self.solve_point_sources(ys)?;
        let mut eval = CMatrix::zeros(xs.len(), self.geometry.sources.len());
        for (m, &s) in self.geometry.sources.iter().enumerate() {
            for (j, &x) in xs.iter().enumerate() {
                eval[(j, m)] = fundamental_solution(self.k, x, s)?;
            }
        }
        Ok((linalg::mul(&eval, &coeffs), residual))
    }
}

/// Builds the geometry and the factorization for `problem`.
pub fn mfs_build(problem: &InteriorProblem, params: &MfsParams) -> Result<MfsModel, InteriorError> {
    let geometry = Arc::new(MfsGeometry::new(problem.obstacle(), params)?);
    MfsModel::build(geometry, problem.k(), problem.bc())
}

/// Field at `x` for boundary data sampled at the model's collocation points.
pub fn mfs_eval(model: &MfsModel, boundary_data: &[Complex64], x: Vec2) -> Result<Complex64, InteriorError> {
    let coeffs = model.coefficients(boundary_data)?;
    model.field(&coeffs, x)
}
