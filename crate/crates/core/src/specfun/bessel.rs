//! Bessel functions of the first kind and the Miller-based `Y_0`, `Y_1`.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::SpecFunError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_AT: f64 = 1e200;
const SMALLEST_NORMAL: f64 = 1e-290;

const LN_TABLE_LEN: usize = 1024;

/// `ln n!` (tabulated for small `n`).
fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_TABLE_LEN);
        let mut acc = 0.0;
        t.push(0.0);
        for j in 1..LN_TABLE_LEN {
            acc += (j as f64).ln();
            t.push(acc);
        }
        t
    });
    match table.get(n) {
        Some(v) => *v,
        None => table[LN_TABLE_LEN - 1] + (LN_TABLE_LEN..=n).map(|j| (j as f64).ln()).sum::<f64>(),
    }
}

const RECIP_LEN: usize = 256;
const RECIP: [f64; RECIP_LEN] = {
    let mut t = [0.0; RECIP_LEN];
    let mut i = 1;
    while i < RECIP_LEN {
        t[i] = 1.0 / i as f64;
        i += 1;
    }
    t
};

fn recip(k: usize) -> f64 {
    if k < RECIP_LEN {
        RECIP[k]
    } else {
        1.0 / k as f64
    }
}

/// Log of the bound `(|z|/2)^n / n!` on `|J_n(z)| e^{-|Im z|}`.
fn log_bound(n: usize, ln_half: f64) -> f64 {
    n as f64 * ln_half - ln_factorial(n)
}

/// Starting order for Miller's backward recurrence so that orders `<= need`
/// carry full double precision.
fn miller_start(az: f64, need: usize) -> usize {
    let ln_half = (0.5 * az).ln();
    let mut m = need.max(az.ceil() as usize) + 12;
    let lb_need = log_bound(need, ln_half);
    while {
        let lb = log_bound(m, ln_half);
        lb > -40.0 || lb - lb_need > -24.0
    } {
        m += 1;
    }
    m
}

/// `J_n(z)` from the power series. Bounded cancellation for `|z|^2 <= 4(n + 2)`.
pub(crate) fn j_series(n: usize, z: Complex64) -> Complex64 {
    let half = 0.5 * z;
    let w = -(half * half);
    let mut pre = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        pre *= half / j as f64;
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..400 {
        term *= w / ((k * (n + k)) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    pre * sum
}

/// Normalization target of the generating-function identity:
/// `e^{iz} = J_0 + 2 Σ i^n J_n` for `Im z <= 0`, and the `-i` mirror otherwise,
/// chosen so no cancellation occurs in the sum.
fn normalization(z: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
    let (s, target) = if z.im <= 0.0 {
        (Complex64::i(), (Complex64::i() * z).exp())
    } else {
        (-Complex64::i(), (-Complex64::i() * z).exp())
    };
    if !target.re.is_finite() || !target.im.is_finite() {
        return Err(SpecFunError::Overflow(z));
    }
    Ok((s, target))
}

/// Miller's algorithm: returns `J_0 ..= J_m` for some `m >= need`.
pub(crate) fn miller(z: Complex64, need: usize) -> Result<Vec<Complex64>, SpecFunError> {
    let az = z.norm();
    let m = miller_start(az, need);
    let mut f = vec![Complex64::new(0.0, 0.0); m + 2];
    f[m] = Complex64::new(1.0, 0.0);
    for n in (1..=m).rev() {
        let next = (2.0 * n as f64 / z) * f[n] - f[n + 1];
        f[n - 1] = next;
        if next.l1_norm() > RESCALE_AT {
            for v in &mut f[n - 1..] {
                *v /= RESCALE_AT;
            }
        }
    }
    let (s, target) = normalization(z)?;
    let powers = [Complex64::new(1.0, 0.0), s, s * s, s * s * s];
    let mut sum = f[0];
    for (n, v) in f.iter().enumerate().take(m + 1).skip(1) {
        sum += 2.0 * powers[n % 4] * v;
    }
    let scale = target / sum;
    f.truncate(m + 1);
    for v in &mut f {
        *v *= scale;
    }
    Ok(f)
}

/// `J_0 ..= J_nmax`.
pub(crate) fn j_sequence(nmax: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    let mut out = vec![Complex64::new(0.0, 0.0); nmax + 1];
    if z == Complex64::new(0.0, 0.0) {
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    if z.norm_sqr() <= 4.0 * (nmax as f64 + 2.0) {
        // Series at the top, then downward recurrence. Skip orders whose
        // values underflow.
        let mut top = nmax;
        let mut upper = j_series(top + 1, z);
        let mut current = j_series(top, z);
        while top > 0 && current.norm() < SMALLEST_NORMAL {
            out[top] = current;
            top -= 1;
            upper = current;
            current = j_series(top, z);
        }
        out[top] = current;
        for n in (1..=top).rev() {
            let lower = (2.0 * n as f64 / z) * current - upper;
            out[n - 1] = lower;
            upper = current;
            current = lower;
        }
    } else {
        let f = miller(z, nmax)?;
        out.copy_from_slice(&f[..=nmax]);
    }
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(SpecFunError::Overflow(z));
    }
    Ok(out)
}

/// `(J_0, J_1, Y_0, Y_1)` from one Miller pass with the Neumann series
/// `Y_0 = (2/pi)(ln(z/2)+gamma) J_0 - (4/pi) Σ (-1)^k J_{2k}/k` and its
/// derivative for `Y_1 = -Y_0'`. No allocation.
pub(crate) fn j01_y01(z: Complex64) -> Result<[Complex64; 4], SpecFunError> {
    use std::f64::consts::PI;
    let az = z.norm();
    if az <= SERIES_J01_MAX {
        return Ok(j01_y01_series(z));
    }
    // odd start so that each pass handles one odd and one even order
    let m = miller_start(az, 1) | 1;
    let (s, target) = normalization(z)?;
    let powers = [Complex64::new(1.0, 0.0), s, s * s, s * s * s];
    let zero = Complex64::new(0.0, 0.0);
    let inv_z = 1.0 / z;
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };

    let mut upper = zero;
    let mut f = Complex64::new(1.0, 0.0);
    let mut norm = zero;
    let mut s0 = zero;
    let mut s1 = zero;
    let mut f1 = zero;
    let mut n = m;
    loop {
        // odd n = 2k - 1
        let k = n.div_ceil(2);
        norm += 2.0 * powers[n % 4] * f;
        if n >= 3 {
            s1 += (sign(k) * (recip(k) + recip(k - 1))) * f;
        } else {
            s1 -= f;
            f1 = f;
        }
        let lower = (2.0 * n as f64) * inv_z * f - upper;
        upper = f;
        f = lower;
        n -= 1;
        if n == 0 {
            norm += f;
            break;
        }
        // even n = 2k
        let k = n / 2;
        norm += 2.0 * powers[n % 4] * f;
        s0 += (sign(k) * recip(k)) * f;
        let lower = (2.0 * n as f64) * inv_z * f - upper;
        upper = f;
        f = lower;
        n -= 1;
        if f.l1_norm() > RESCALE_AT {
            f /= RESCALE_AT;
            upper /= RESCALE_AT;
            norm /= RESCALE_AT;
            s0 /= RESCALE_AT;
            s1 /= RESCALE_AT;
            f1 /= RESCALE_AT;
        }
    }
    let scale = target / norm;
    let j0 = f * scale;
    let j1 = f1 * scale;
    let s0 = s0 * scale;
    let s1 = s1 * scale;
    let log_term = (0.5 * z).ln() + EULER_GAMMA;
    let y0 = (2.0 / PI) * log_term * j0 - (4.0 / PI) * s0;
    let y1 = (2.0 / PI) * (log_term * j1 - j0 * inv_z) + (2.0 / PI) * s1;
    let out = [j0, j1, y0, y1];
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(SpecFunError::Overflow(z));
    }
    Ok(out)
}

/// Below this modulus the ascending series is cheaper than Miller and
/// loses at most about one digit to cancellation.
const SERIES_J01_MAX: f64 = 4.0;

/// Ascending series with `t_j = (-z^2/4)^j / (j!)^2`:
/// `J_0 = Σ t_j`, `J_1 = -(2/z) Σ j t_j`,
/// `Y_0 = (2/pi)[(ln(z/2)+gamma) J_0 - Σ H_j t_j]`, `Y_1 = -Y_0'`.
fn j01_y01_series(z: Complex64) -> [Complex64; 4] {
    use std::f64::consts::PI;
    let w = -0.25 * z * z;
    let zero = Complex64::new(0.0, 0.0);
    let mut t = Complex64::new(1.0, 0.0);
    let mut j0 = t;
    let (mut sj, mut sh, mut sjh) = (zero, zero, zero);
    let mut h = 0.0;
    for j in 1..64 {
        t *= w * (recip(j) * recip(j));
        h += recip(j);
        let jf = j as f64;
        j0 += t;
        sj += jf * t;
        sh += h * t;
        sjh += (jf * h) * t;
        if t.norm_sqr() < 1e-36 * j0.norm_sqr().max(1.0) {
            break;
        }
    }
    let inv_z = 1.0 / z;
    let j1 = -2.0 * inv_z * sj;
    let log_term = (0.5 * z).ln() + EULER_GAMMA;
    let y0 = (2.0 / PI) * (log_term * j0 - sh);
    let y1 = -(2.0 / PI) * (j0 * inv_z - log_term * j1 - 2.0 * inv_z * sjh);
    [j0, j1, y0, y1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_miller_agree_in_overlap() {
        for &z in &[
            Complex64::new(2.5, -1.5),
            Complex64::new(4.0, 0.3),
            Complex64::new(-3.0, 2.0),
        ] {
            let m = miller(z, 12).unwrap();
            for n in 8..=12 {
                let s = j_series(n, z);
                assert!((m[n] - s).norm() <= 1e-13 * s.norm(), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn j01_matches_sequence() {
        let z = Complex64::new(1.3, -0.7);
        let [j0, j1, _, _] = j01_y01(z).unwrap();
        let seq = j_sequence(3, z).unwrap();
        assert!((j0 - seq[0]).norm() < 1e-15);
        assert!((j1 - seq[1]).norm() < 1e-15);
    }

    #[test]
    fn j01_series_matches_miller_at_switch() {
        for &z in &[
            Complex64::new(3.9, 0.2),
            Complex64::new(-2.0, -3.3),
            Complex64::new(0.4, 2.1),
            Complex64::new(1e-4, -2e-5),
        ] {
            let a = j01_y01_series(z);
            let seq = j_sequence(1, z).unwrap();
            assert!((a[0] - seq[0]).norm() <= 1e-14 * seq[0].norm().max(1.0), "z={z}");
            assert!((a[1] - seq[1]).norm() <= 1e-14 * seq[1].norm().max(1.0), "z={z}");
        }
    }

    #[test]
    fn tiny_argument_high_order_underflows_gracefully() {
        let z = Complex64::new(1e-3, 1e-4);
        let seq = j_sequence(128, z).unwrap();
        assert!((seq[0] - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        assert!(seq[128].norm() < 1e-300);
    }
}
