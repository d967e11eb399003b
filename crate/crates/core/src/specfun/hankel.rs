//! Hankel functions of the first kind and `Y_n` sequences.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::bessel::{j01_y01, j_sequence};
use super::SpecFunError;

/// Radius beyond which the asymptotic expansion is used for orders 0 and 1.
const ASYMPTOTIC_RADIUS: f64 = 20.0;
/// Above this imaginary part `H^(1)` is recessive and `J + iY` cancels.
const RECESSIVE_IM: f64 = 1.5;

/// `H^(1)_nu` by Hankel's expansion, summed until the terms stop decreasing
/// or fall below 1e-17.
fn asymptotic(nu: f64, z: Complex64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let rot = Complex64::i() / z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * rot * ((mu - odd * odd) / (8.0 * k as f64));
        let size = next.norm();
        if size > last {
            break;
        }
        term = next;
        sum += term;
        last = size;
        if size <= 1e-17 * sum.norm() {
            break;
        }
    }
    let chi = z - FRAC_PI_2 * nu - FRAC_PI_4;
    (2.0 / (PI * z)).sqrt() * (Complex64::i() * chi).exp() * sum
}

/// `H^(1)_0` and `H^(1)_1` for `Im z > 0` from
/// `H^(1)_nu(z) = sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} / Gamma(nu+1/2)
///   * ∫_0^∞ e^{-u} u^{nu-1/2} (1 + iu/(2z))^{nu-1/2} du`
/// with `u = t^2`, trapezoidal rule on the real line.
fn laplace_integral_01(z: Complex64) -> (Complex64, Complex64) {
    const STEP: f64 = 0.2;
    const HALF_POINTS: i32 = 33;
    let c = Complex64::i() / (2.0 * z);
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = Complex64::new(0.0, 0.0);
    for j in 1..=HALF_POINTS {
        let t = j as f64 * STEP;
        let t2 = t * t;
        let g = (-t2).exp();
        let w = (1.0 + c * t2).sqrt();
        t0 += 2.0 * g / w;
        t1 += 2.0 * g * t2 * w;
    }
    t0 *= STEP;
    t1 *= STEP;
    let pre = (2.0 / (PI * z)).sqrt();
    let sqrt_pi = PI.sqrt();
    let h0 = pre * (Complex64::i() * (z - FRAC_PI_4)).exp() * t0 / sqrt_pi;
    let h1 = pre * (Complex64::i() * (z - 3.0 * FRAC_PI_4)).exp() * t1 / (0.5 * sqrt_pi);
    (h0, h1)
}

/// `(H^(1)_0(z), H^(1)_1(z))`; `z` must be nonzero and off the negative real axis.
pub(crate) fn h1_01(z: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
    let (h0, h1) = if z.norm() >= ASYMPTOTIC_RADIUS {
        (asymptotic(0.0, z), asymptotic(1.0, z))
    } else if z.im > RECESSIVE_IM {
        laplace_integral_01(z)
    } else {
        let [j0, j1, y0, y1] = j01_y01(z)?;
        (j0 + Complex64::i() * y0, j1 + Complex64::i() * y1)
    };
    for v in [h0, h1] {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(SpecFunError::Overflow(z));
        }
    }
    Ok((h0, h1))
}

fn upward(first: Complex64, second: Complex64, nmax: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(first);
    if nmax >= 1 {
        out.push(second);
    }
    for n in 1..nmax {
        let next = (2.0 * n as f64 / z) * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

fn check(seq: Vec<Complex64>, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    if seq.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Err(SpecFunError::Overflow(z))
    } else {
        Ok(seq)
    }
}

/// Upward recurrence from `H^(1)_0`, `H^(1)_1`. Only used for `Im z >= 0`,
/// where `H^(1)` is the recessive Hankel function in `z` and grows with `n`
/// relative to `H^(2)`, so the recurrence is stable at every order.
fn h1_upper(nmax: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    let (h0, h1) = h1_01(z)?;
    check(upward(h0, h1, nmax, z), z)
}

/// `H^(2)_0 ..= H^(2)_nmax` for `Im z < 0` by reflection of [`h1_upper`].
fn h2_lower(nmax: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    Ok(h1_upper(nmax, z.conj())?.into_iter().map(|v| v.conj()).collect())
}

/// `H^(1)_0 ..= H^(1)_nmax`. In the lower half-plane recurring `H^(1)`
/// upward loses digits near `n ~ |z|`, so `H^(1) = 2J - H^(2)` is used there.
pub(crate) fn h1_sequence(nmax: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    if z.im >= 0.0 {
        return h1_upper(nmax, z);
    }
    let h2 = h2_lower(nmax, z)?;
    let j = j_sequence(nmax, z)?;
    check(j.iter().zip(&h2).map(|(j, h)| 2.0 * j - h).collect(), z)
}

/// `Y_0 ..= Y_nmax` from `J` and the recessive Hankel function.
pub(crate) fn y_sequence(nmax: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    let j = j_sequence(nmax, z)?;
    let minus_i = -Complex64::i();
    let y: Vec<Complex64> = if z.im >= 0.0 {
        let h1 = h1_upper(nmax, z)?;
        h1.iter().zip(&j).map(|(h, j)| (h - j) * minus_i).collect()
    } else {
        let h2 = h2_lower(nmax, z)?;
        j.iter().zip(&h2).map(|(j, h)| (j - h) * minus_i).collect()
    };
    check(y, z)
}
