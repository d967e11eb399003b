//! Complex-argument cylinder functions and the 2D Helmholtz fundamental solution.
//!
//! Evaluation strategy by region of the argument `z`:
//!
//! * `J_n`: power series at the top order followed by backward recurrence when
//!   `|z|^2 <= 4(n + 2)`, otherwise Miller's backward recurrence normalized by
//!   the generating-function identity `e^{±iz} = J_0 + 2 Σ (±i)^n J_n`.
//! * `Y_0`, `Y_1`: Neumann series in the Miller `J` values for `|z| < 20`,
//!   Hankel's asymptotic expansion beyond. Higher orders by upward recurrence.
//! * `H^(1)_n`: `J_n + i Y_n` where `H^(1)` is not recessive; for
//!   `Im z > 1.5` (where `H^(1)` is exponentially small) a trapezoidal
//!   quadrature of its Laplace-type integral; asymptotic expansion for
//!   `|z| >= 20`. `H^(2)_n(z) = conj(H^(1)_n(conj z))`.
//!
//! Accuracy target is 1e-11 relative for `|z| <= 50`, `n <= 60`. Arguments on
//! the closed negative real axis are rejected for `Y` and `H`.

mod bessel;
mod hankel;
mod kernel;

use num_complex::Complex64;
use thiserror::Error;

pub use kernel::{
    fundamental_solution, fundamental_solution_normal_derivative, hankel1_01, KernelValue,
};

pub(crate) use bessel::j_sequence;
pub(crate) use hankel::h1_sequence;

/// Largest order accepted by the public evaluators.
pub const MAX_ORDER: u32 = 80;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("z = 0 is a singular point")]
    Singular,
    #[error("argument {0} lies on the branch cut (negative real axis)")]
    BranchCut(Complex64),
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: u32, max: u32 },
    #[error("overflow evaluating cylinder function at z = {0}")]
    Overflow(Complex64),
    #[error("coincident points in fundamental solution")]
    CoincidentPoints,
}

/// Wavenumber `k` with `k` in the complex plane minus the closed negative real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber(Complex64);

#[derive(Debug, Error, Clone, PartialEq)]
#[error("wavenumber {0} lies on the closed negative real axis")]
pub struct InvalidWavenumber(pub Complex64);

impl Wavenumber {
    pub fn new(re: f64, im: f64) -> Result<Self, InvalidWavenumber> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(k: Complex64) -> Result<Self, InvalidWavenumber> {
        if !k.re.is_finite() || !k.im.is_finite() || (k.im == 0.0 && k.re <= 0.0) {
            return Err(InvalidWavenumber(k));
        }
        Ok(Self(k))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn is_real(self) -> bool {
        self.0.im == 0.0
    }
}

impl std::fmt::Display for Wavenumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.im < 0.0 {
            write!(f, "{}{}i", self.0.re, self.0.im)
        } else {
            write!(f, "{}+{}i", self.0.re, self.0.im)
        }
    }
}

/// A cylinder function value and its derivative with respect to `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylFunValue {
    pub value: Complex64,
    pub derivative: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    First,
    Second,
}

fn check_order(n: u32) -> Result<(), SpecFunError> {
    if n > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge {
            order: n,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

fn finite(v: Complex64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(SpecFunError::Overflow(z))
    }
}

/// Bessel function of the first kind `J_n(z)` and `J_n'(z)`. Entire in `z`.
pub fn bessel_j(n: u32, z: Complex64) -> Result<CylFunValue, SpecFunError> {
    check_order(n)?;
    let js = j_sequence(n as usize + 1, z)?;
    let n = n as usize;
    let derivative = if n == 0 {
        -js[1]
    } else {
        0.5 * (js[n - 1] - js[n + 1])
    };
    Ok(CylFunValue {
        value: finite(js[n], z)?,
        derivative: finite(derivative, z)?,
    })
}

/// Bessel function of the second kind `Y_n(z)` and `Y_n'(z)`.
pub fn bessel_y(n: u32, z: Complex64) -> Result<CylFunValue, SpecFunError> {
    check_order(n)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(SpecFunError::Singular);
    }
    if on_cut(z) {
        return Err(SpecFunError::BranchCut(z));
    }
    let ys = hankel::y_sequence(n as usize + 1, z)?;
    let n = n as usize;
    let derivative = if n == 0 {
        -ys[1]
    } else {
        0.5 * (ys[n - 1] - ys[n + 1])
    };
    Ok(CylFunValue {
        value: finite(ys[n], z)?,
        derivative: finite(derivative, z)?,
    })
}

/// Hankel function `H_n^(1)(z)` or `H_n^(2)(z)` with its derivative.
///
/// The derivative uses `H_n' = H_{n-1} - (n/z) H_n`, and `H_0' = -H_1`.
pub fn hankel(kind: HankelKind, n: u32, z: Complex64) -> Result<CylFunValue, SpecFunError> {
    check_order(n)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(SpecFunError::Singular);
    }
    if on_cut(z) {
        return Err(SpecFunError::BranchCut(z));
    }
    let (arg, conj) = match kind {
        HankelKind::First => (z, false),
        HankelKind::Second => (z.conj(), true),
    };
    let hs = h1_sequence(n as usize + 1, arg)?;
    let n = n as usize;
    let value = hs[n];
    let derivative = if n == 0 {
        -hs[1]
    } else {
        hs[n - 1] - (n as f64 / arg) * value
    };
    let (value, derivative) = if conj {
        (value.conj(), derivative.conj())
    } else {
        (value, derivative)
    };
    Ok(CylFunValue {
        value: finite(value, z)?,
        derivative: finite(derivative, z)?,
    })
}

/// Leading term of the large-argument expansion,
/// `sqrt(2/(pi z)) exp(±i(z - n pi/2 - pi/4))`. Validation only.
pub fn hankel_asymptotic(kind: HankelKind, n: u32, z: Complex64) -> Result<Complex64, SpecFunError> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(SpecFunError::Singular);
    }
    let chi = z - std::f64::consts::FRAC_PI_2 * n as f64 - std::f64::consts::FRAC_PI_4;
    let pre = (2.0 / (std::f64::consts::PI * z)).sqrt();
    let phase = match kind {
        HankelKind::First => Complex64::i() * chi,
        HankelKind::Second => -Complex64::i() * chi,
    };
    finite(pre * phase.exp(), z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn j_at_origin() {
        let v = bessel_j(0, c(0.0, 0.0)).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
        assert_eq!(v.derivative, c(0.0, 0.0));
        let v1 = bessel_j(1, c(0.0, 0.0)).unwrap();
        assert_eq!(v1.value, c(0.0, 0.0));
        assert!((v1.derivative - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn j0_of_one() {
        let v = bessel_j(0, c(1.0, 0.0)).unwrap();
        assert!((v.value.re - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!(v.value.im.abs() < 1e-15);
    }

    #[test]
    fn hankel_rejects_origin_and_cut() {
        assert_eq!(
            hankel(HankelKind::First, 0, c(0.0, 0.0)),
            Err(SpecFunError::Singular)
        );
        assert!(matches!(
            hankel(HankelKind::First, 2, c(-1.0, 0.0)),
            Err(SpecFunError::BranchCut(_))
        ));
        assert!(matches!(
            bessel_j(MAX_ORDER + 1, c(1.0, 0.0)),
            Err(SpecFunError::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn h0_derivative_is_minus_h1() {
        let z = c(0.9, -0.4);
        let h0 = hankel(HankelKind::First, 0, z).unwrap();
        let h1 = hankel(HankelKind::First, 1, z).unwrap();
        assert!((h0.derivative + h1.value).norm() <= 1e-15 * h1.value.norm());
    }

    #[test]
    fn wronskian_sample() {
        let z = c(1.7, -0.9);
        let h1 = hankel(HankelKind::First, 4, z).unwrap();
        let h2 = hankel(HankelKind::Second, 4, z).unwrap();
        let w = h1.value * h2.derivative - h1.derivative * h2.value;
        let expect = -4.0 * Complex64::i() / (std::f64::consts::PI * z);
        assert!((w - expect).norm() <= 1e-11 * expect.norm(), "{w} vs {expect}");
    }

    #[test]
    fn hankel_exponential_behaviour_off_axis() {
        let z = c(3.0, 25.0);
        let h1 = hankel(HankelKind::First, 0, z).unwrap().value;
        let h2 = hankel(HankelKind::Second, 0, z).unwrap().value;
        assert!(h1.norm() < 1e-10);
        assert!(h2.norm() > 1e9);
    }

    #[test]
    fn near_disk_pole_hankel_small() {
        let v = hankel(HankelKind::First, 2, c(0.4295, -1.2814)).unwrap();
        assert!(v.value.norm() < 1e-3, "{}", v.value.norm());
    }

    #[test]
    fn wavenumber_domain() {
        assert!(Wavenumber::new(-1.0, 0.0).is_err());
        assert!(Wavenumber::new(0.0, 0.0).is_err());
        assert!(Wavenumber::new(-1.0, -0.1).is_ok());
        assert!(Wavenumber::new(1.0, 0.0).unwrap().is_real());
    }
}
