//! Dense complex SVD. Factorization runs in faer; results are held as
//! nalgebra matrices.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("SVD did not converge")]
    NoConvergence,
}

fn view(a: &CMatrix) -> faer::MatRef<'_, Complex64> {
    faer::MatRef::from_column_major_slice(a.as_slice(), a.nrows(), a.ncols())
}

fn product<T>(lhs: faer::MatRef<'_, T>, rhs: &CMatrix) -> CMatrix
where
    T: faer::traits::Conjugate<Canonical = Complex64>,
{
    let mut out = CMatrix::zeros(lhs.nrows(), rhs.ncols());
    let (r, c) = out.shape();
    let dst = faer::MatMut::from_column_major_slice_mut(out.as_mut_slice(), r, c);
    faer::linalg::matmul::matmul(
        dst,
        faer::Accum::Replace,
        lhs,
        view(rhs),
        Complex64::new(1.0, 0.0),
        faer::Par::Seq,
    );
    out
}

/// `a * b`.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "dimension mismatch");
    product(view(a), b)
}

/// `a^* * b`.
pub fn ad_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "dimension mismatch");
    product(view(a).adjoint(), b)
}

/// Thin SVD `A = U diag(s) V^*`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: DVector<f64>,
    pub v_t: CMatrix,
}

impl Svd {
    pub fn new(a: CMatrix) -> Result<Self, LinalgError> {
        if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let (m, n) = a.shape();
        let r = m.min(n);
        let src = faer::Mat::<Complex64>::from_fn(m, n, |i, j| a[(i, j)]);
        let mut s = faer::diag::Diag::<Complex64>::zeros(r);
        let mut u = faer::Mat::<Complex64>::zeros(m, r);
        let mut v = faer::Mat::<Complex64>::zeros(n, r);
        let thin = ComputeSvdVectors::Thin;
        let par = faer::Par::Seq;
        let mut mem = MemBuffer::new(svd_scratch::<Complex64>(m, n, thin, thin, par, Default::default()));
        svd(
            src.as_ref(),
            s.as_mut(),
            Some(u.as_mut()),
            Some(v.as_mut()),
            par,
            MemStack::new(&mut mem),
            Default::default(),
        )
        .map_err(|_| LinalgError::NoConvergence)?;
        let sv = s.column_vector();
        Ok(Self {
            u: CMatrix::from_fn(m, r, |i, j| u[(i, j)]),
            singular_values: DVector::from_fn(r, |i, _| sv[i].re),
            v_t: CMatrix::from_fn(r, n, |i, j| v[(j, i)].conj()),
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.iter().copied().fold(0.0, f64::max)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `V diag(f(s)) U^* b` for a spectral filter `f`.
    pub fn filtered_solve(&self, b: &CMatrix, filter: impl Fn(f64) -> f64) -> CMatrix {
        let mut coeffs = ad_mul(&self.u, b);
        for (i, mut row) in coeffs.row_iter_mut().enumerate() {
            row *= Complex64::from(filter(self.singular_values[i]));
        }
        ad_mul(&self.v_t, &coeffs)
    }

    /// Drop singular triplets with `s < cut`; returns how many were kept.
    pub fn truncate(&mut self, cut: f64) -> usize {
        let kept = self.singular_values.iter().take_while(|&&s| s >= cut).count();
        self.u = self.u.columns(0, kept).into_owned();
        self.v_t = self.v_t.rows(0, kept).into_owned();
        self.singular_values = self.singular_values.rows(0, kept).into_owned();
        kept
    }
}
