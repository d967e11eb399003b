use num_complex::Complex64;

use super::{hankel::h1_01, SpecFunError, Wavenumber};
use crate::geometry::Vec2;

/// `(H^(1)_0(z), H^(1)_1(z))`, the pair every kernel evaluation needs.
pub fn hankel1_01(z: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(SpecFunError::Singular);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(SpecFunError::BranchCut(z));
    }
    h1_01(z)
}

/// Value and gradient (with respect to `x`) of `Phi_k(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub gradient: [Complex64; 2],
}

impl KernelValue {
    pub fn eval(k: Wavenumber, x: Vec2, y: Vec2) -> Result<Self, SpecFunError> {
        let d = x - y;
        let r = d.norm();
        if r == 0.0 {
            return Err(SpecFunError::CoincidentPoints);
        }
        let k = k.value();
        let (h0, h1) = hankel1_01(k * r)?;
        let quarter_i = Complex64::new(0.0, 0.25);
        // d/dx (i/4) H0(k r) = -(ik/4) H1(kr) (x - y)/r
        let radial = -quarter_i * k * h1 / r;
        Ok(Self {
            value: quarter_i * h0,
            gradient: [radial * d.x, radial * d.y],
        })
    }

    pub fn normal_derivative(&self, normal: Vec2) -> Complex64 {
        self.gradient[0] * normal.x + self.gradient[1] * normal.y
    }
}

/// `Phi_k(x, y) = (i/4) H^(1)_0(k |x - y|)`.
pub fn fundamental_solution(k: Wavenumber, x: Vec2, y: Vec2) -> Result<Complex64, SpecFunError> {
    let r = (x - y).norm();
    if r == 0.0 {
        return Err(SpecFunError::CoincidentPoints);
    }
    let (h0, _) = hankel1_01(k.value() * r)?;
    Ok(Complex64::new(0.0, 0.25) * h0)
}

/// `dPhi_k(x, y)/dnu(x) = -(ik/4) H^(1)_1(k|x-y|) nu.(x-y)/|x-y|`.
pub fn fundamental_solution_normal_derivative(
    k: Wavenumber,
    x: Vec2,
    y: Vec2,
    normal_at_x: Vec2,
) -> Result<Complex64, SpecFunError> {
    Ok(KernelValue::eval(k, x, y)?.normal_derivative(normal_at_x))
}
