//! Addition-theorem series for the disk.
//!
//! With `Φ_k(x, y) = (i/4) Σ_n J_n(k|y|) H_n(k|x|) e^{in(θx-θy)}` for `|x|>|y|`,
//! the interior field is `u^s = Σ_n d_n J_n(k|x|) J_n(k|y|) e^{in(θx-θy)}`
//! with `d_n = -(i/4) H_n(kR)/J_n(kR)` (Dirichlet) or `-(i/4) H_n'(kR)/J_n'(kR)`
//! (Neumann). Terms `n` and `-n` are folded into `2 cos`.

use num_complex::Complex64;

use super::{BoundaryCondition, InteriorError, InteriorProblem};
use crate::geometry::Vec2;
use crate::linalg::CMatrix;
use crate::specfun::{h1_sequence, j_sequence, Wavenumber};

/// Largest order the series may use.
pub const DISK_MAX_ORDER: usize = 60;
const TAIL_TOL: f64 = 1e-14;
const TAIL_RUN: usize = 3;
const TINY: f64 = 1e-300;

/// Series coefficients for one `(R, bc, k)`, truncated for points with
/// `|x| <= rho_x` and `|y| <= rho_y` (coordinates relative to the disk center).
#[derive(Debug, Clone)]
pub struct DiskSolver {
    k: Complex64,
    coeffs: Vec<Complex64>,
    tail: f64,
}

fn coefficients(
    radius: f64,
    bc: BoundaryCondition,
    k: Complex64,
    nmax: usize,
) -> Result<Vec<Complex64>, InteriorError> {
    let z = k * radius;
    let js = j_sequence(nmax + 1, z)?;
    let hs = h1_sequence(nmax + 1, z)?;
    let minus_quarter_i = Complex64::new(0.0, -0.25);
    (0..=nmax)
        .map(|n| {
            let (num, den) = match bc {
                BoundaryCondition::Dirichlet => (hs[n], js[n]),
                BoundaryCondition::Neumann if n == 0 => (-hs[1], -js[1]),
                BoundaryCondition::Neumann => (
                    hs[n - 1] - (n as f64 / z) * hs[n],
                    0.5 * (js[n - 1] - js[n + 1]),
                ),
            };
            if den.norm() < TINY {
                return Err(InteriorError::Underflow(n));
            }
            Ok(minus_quarter_i * num / den)
        })
        .collect()
}

impl DiskSolver {
    /// Truncates with the tail rule `|d_n J_n(k rho_x) J_n(k rho_y)| < 1e-14 *`
    /// running max for three consecutive orders.
    pub fn new(
        radius: f64,
        bc: BoundaryCondition,
        k: Wavenumber,
        rho_x: f64,
        rho_y: f64,
    ) -> Result<Self, InteriorError> {
        let k = k.value();
        let all = coefficients(radius, bc, k, DISK_MAX_ORDER)?;
        let jx = j_sequence(DISK_MAX_ORDER, k * rho_x)?;
        let jy = j_sequence(DISK_MAX_ORDER, k * rho_y)?;
        let mut biggest: f64 = 0.0;
        let mut run = 0;
        for n in 0..=DISK_MAX_ORDER {
            let t = (all[n] * jx[n] * jy[n]).norm();
            biggest = biggest.max(t);
            if t < TAIL_TOL * biggest || biggest == 0.0 {
                run += 1;
                if run == TAIL_RUN {
                    return Ok(Self {
                        k,
                        coeffs: all[..=n].to_vec(),
                        tail: if biggest > 0.0 { t / biggest } else { 0.0 },
                    });
                }
            } else {
                run = 0;
            }
        }
        Err(InteriorError::Nonconvergence(DISK_MAX_ORDER))
    }

    /// Fixed truncation at `order` with no tail check.
    pub fn with_order(
        radius: f64,
        bc: BoundaryCondition,
        k: Wavenumber,
        order: usize,
    ) -> Result<Self, InteriorError> {
        let k = k.value();
        Ok(Self {
            k,
            coeffs: coefficients(radius, bc, k, order)?,
            tail: f64::NAN,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Relative size of the last retained term.
    pub fn tail_estimate(&self) -> f64 {
        self.tail
    }

    fn sum(&self, jx: &[Complex64], jy: &[Complex64], dtheta: f64) -> Complex64 {
        // cos(n t) by the Chebyshev recurrence
        let c1 = dtheta.cos();
        let (mut prev, mut cur) = (c1, 1.0);
        let mut acc = self.coeffs[0] * jx[0] * jy[0];
        for n in 1..self.coeffs.len() {
            let next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
            acc += 2.0 * cur * self.coeffs[n] * jx[n] * jy[n];
        }
        acc
    }

    fn seq(&self, p: Vec2) -> Result<Vec<Complex64>, InteriorError> {
        Ok(j_sequence(self.order(), self.k * p.norm())?)
    }

    /// `u^s(x, y)` with both points relative to the disk center.
    pub fn eval(&self, x: Vec2, y: Vec2) -> Result<Complex64, InteriorError> {
        Ok(self.sum(&self.seq(x)?, &self.seq(y)?, x.angle() - y.angle()))
    }

    /// Entry `(j, i) = u^s(x_j, y_i)`.
    pub fn matrix(&self, xs: &[Vec2], ys: &[Vec2]) -> Result<CMatrix, InteriorError> {
        let jx = xs.iter().map(|&p| self.seq(p)).collect::<Result<Vec<_>, _>>()?;
        let jy = ys.iter().map(|&p| self.seq(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(CMatrix::from_fn(xs.len(), ys.len(), |j, i| {
            self.sum(&jx[j], &jy[i], xs[j].angle() - ys[i].angle())
        }))
    }
}

/// `u^s(x, y)` for a disk of radius `radius` centered at the origin.
pub fn solve_disk_analytic(
    radius: f64,
    problem: &InteriorProblem,
    y: Vec2,
    x: Vec2,
) -> Result<Complex64, InteriorError> {
    if problem.obstacle().circle_radius() != Some(radius) {
        return Err(InteriorError::NotADisk);
    }
    problem.check_inside(x)?;
    problem.check_inside(y)?;
    let c = problem.obstacle().center();
    let (x, y) = (x - c, y - c);
    let solver = DiskSolver::new(radius, problem.bc(), problem.k(), x.norm(), y.norm())?;
    solver.eval(x, y)
}
