mod common;

use common::dd_oracle as oracle;
use num_complex::Complex64;
use polescan_core::specfun::{bessel_j, bessel_y, hankel, hankel_asymptotic, HankelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_z(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> Complex64 {
    let r = rng.random_range(rmin..rmax);
    // stay strictly off the cut
    let theta = rng.random_range(-PI * 0.999..PI * 0.999);
    Complex64::from_polar(r, theta)
}

fn close(got: Complex64, want: Complex64, rel: f64, abs: f64) -> bool {
    (got - want).norm() <= rel * want.norm() + abs
}

#[test]
fn oracle_self_check_real_axis() {
    // J0(1), Y0(1) to 16 digits
    let j = oracle::bessel_j(0, c(1.0, 0.0));
    let y = oracle::bessel_y(0, c(1.0, 0.0));
    assert!((j.re - 0.765_197_686_557_966_6).abs() < 1e-16);
    assert!((y.re - 0.088_256_964_215_676_96).abs() < 1e-16);
    // J1(2.5) = 0.4970941024642741
    let j1 = oracle::bessel_j(1, c(2.5, 0.0));
    assert!((j1.re - 0.497_094_102_464_274_1).abs() < 1e-15);
}

#[test]
fn j0_of_one_matches_oracle() {
    let v = bessel_j(0, c(1.0, 0.0)).unwrap().value;
    assert!((v.re - 0.765_197_686_6).abs() < 1e-10);
    assert!(close(v, oracle::bessel_j(0, c(1.0, 0.0)), 1e-14, 0.0));
}

#[test]
fn j3_complex_argument_matches_oracle() {
    let z = c(2.5, -1.5);
    let got = bessel_j(3, z).unwrap().value;
    let want = oracle::bessel_j(3, z);
    assert!(close(got, want, 1e-11, 0.0), "{got} vs {want}");
}

#[test]
fn h0_of_one_matches_oracle() {
    let got = hankel(HankelKind::First, 0, c(1.0, 0.0)).unwrap().value;
    let want = c(0.765_197_686_6, 0.088_256_964_2);
    assert!((got - want).norm() < 1e-10);
}

#[test]
fn random_sample_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = [0.0f64; 4];
    for _ in 0..500 {
        let z = random_z(&mut rng, 0.1, 20.0);
        let n = rng.random_range(0..=30u32);
        let nn = n as usize;
        let cases = [
            (bessel_j(n, z).unwrap().value, oracle::bessel_j(nn, z)),
            (bessel_y(n, z).unwrap().value, oracle::bessel_y(nn, z)),
            (
                hankel(HankelKind::First, n, z).unwrap().value,
                oracle::hankel1(nn, z),
            ),
            (
                hankel(HankelKind::Second, n, z).unwrap().value,
                oracle::hankel2(nn, z),
            ),
        ];
        for (slot, (got, want)) in cases.into_iter().enumerate() {
            let err = (got - want).norm() / (want.norm() + 1e-2);
            worst[slot] = worst[slot].max(err);
            assert!(
                close(got, want, 1e-10, 1e-12),
                "kind {slot} n={n} z={z}: {got} vs {want}"
            );
        }
    }
    eprintln!("worst relative errors J/Y/H1/H2: {worst:?}");
}

#[test]
fn derivatives_match_oracle_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let z = random_z(&mut rng, 0.1, 20.0);
        let n = rng.random_range(1..=30usize);
        let want = 0.5 * (oracle::bessel_j(n - 1, z) - oracle::bessel_j(n + 1, z));
        let scale = oracle::bessel_j(n - 1, z)
            .norm()
            .max(oracle::bessel_j(n + 1, z).norm());
        let got = bessel_j(n as u32, z).unwrap().derivative;
        assert!((got - want).norm() <= 1e-10 * scale + 1e-12, "n={n} z={z}");
        let want = oracle::hankel1(n - 1, z) - (n as f64 / z) * oracle::hankel1(n, z);
        let got = hankel(HankelKind::First, n as u32, z).unwrap().derivative;
        let scale = oracle::hankel1(n - 1, z)
            .norm()
            .max(oracle::hankel1(n, z).norm() * n as f64 / z.norm());
        assert!((got - want).norm() <= 1e-10 * scale + 1e-12, "n={n} z={z}");
    }
}

/// Tolerance `1e-11` relative to the larger of the exact value and the two
/// products, which is what double precision can resolve when the products
/// cancel.
fn wronskian_ok(p: Complex64, q: Complex64, expect: Complex64) -> bool {
    let scale = expect.norm().max(p.norm()).max(q.norm());
    (p - q - expect).norm() <= 1e-11 * scale
}

#[test]
fn hankel_wronskian() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut strict = 0;
    for _ in 0..400 {
        let z = random_z(&mut rng, 0.1, 50.0);
        let n = rng.random_range(0..=30u32);
        let a = hankel(HankelKind::First, n, z).unwrap();
        let b = hankel(HankelKind::Second, n, z).unwrap();
        let (p, q) = (a.value * b.derivative, a.derivative * b.value);
        let expect = -4.0 * Complex64::i() / (PI * z);
        assert!(wronskian_ok(p, q, expect), "n={n} z={z}: {} vs {expect}", p - q);
        if (p - q - expect).norm() <= 1e-11 * expect.norm() {
            strict += 1;
        }
    }
    // the bare bound holds wherever the products do not cancel
    assert!(strict > 200, "{strict}");
}

#[test]
fn jy_wronskian() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..400 {
        let z = random_z(&mut rng, 0.1, 50.0);
        let n = rng.random_range(0..=30u32);
        let j = bessel_j(n, z).unwrap();
        let y = bessel_y(n, z).unwrap();
        let (p, q) = (j.value * y.derivative, j.derivative * y.value);
        let expect = Complex64::new(2.0, 0.0) / (PI * z);
        assert!(wronskian_ok(p, q, expect), "n={n} z={z}: {} vs {expect}", p - q);
    }
}

#[test]
fn wronskians_strict_near_real_axis_low_order() {
    for &z in &[c(1.7, -0.9), c(5.0, 0.3), c(12.0, -1.0), c(30.0, 0.5), c(0.4, -0.2)] {
        for n in 0..=((z.norm() as u32).min(30)) {
            let a = hankel(HankelKind::First, n, z).unwrap();
            let b = hankel(HankelKind::Second, n, z).unwrap();
            let w = a.value * b.derivative - a.derivative * b.value;
            let expect = -4.0 * Complex64::i() / (PI * z);
            assert!((w - expect).norm() <= 1e-11 * expect.norm(), "n={n} z={z}");
            let j = bessel_j(n, z).unwrap();
            let y = bessel_y(n, z).unwrap();
            let w = j.value * y.derivative - j.derivative * y.value;
            let expect = Complex64::new(2.0, 0.0) / (PI * z);
            assert!((w - expect).norm() <= 1e-11 * expect.norm(), "n={n} z={z}");
        }
    }
}

#[test]
fn three_term_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let z = random_z(&mut rng, 0.1, 50.0);
        let n = rng.random_range(1..=29u32);
        type Eval = fn(u32, Complex64) -> Complex64;
        let evals: [Eval; 3] = [
            |n, z| bessel_j(n, z).unwrap().value,
            |n, z| bessel_y(n, z).unwrap().value,
            |n, z| hankel(HankelKind::First, n, z).unwrap().value,
        ];
        for f in evals {
            let lo = f(n - 1, z);
            let mid = (2.0 * n as f64 / z) * f(n, z);
            let hi = f(n + 1, z);
            let scale = lo.norm().max(mid.norm()).max(hi.norm());
            assert!((lo + hi - mid).norm() <= 1e-12 * scale, "n={n} z={z}");
        }
    }
}

fn deviation(kind: HankelKind, n: u32, z: Complex64) -> f64 {
    let h = hankel(kind, n, z).unwrap().value;
    let a = hankel_asymptotic(kind, n, z).unwrap();
    (h - a).norm() / h.norm()
}

fn check_halving(kind: HankelKind, phase: f64) {
    for n in 0..=3u32 {
        let devs: Vec<f64> = [20.0, 40.0, 80.0]
            .iter()
            .map(|&r| deviation(kind, n, Complex64::from_polar(r, phase)))
            .collect();
        let bound = (((4 * n * n) as f64 - 1.0).abs() + 1.0) / 4.0;
        for (d, r) in devs.iter().zip([20.0, 40.0, 80.0]) {
            assert!(*d <= bound / r, "n={n} r={r}: {d}");
        }
        for pair in devs.windows(2) {
            let ratio = pair[1] / pair[0];
            assert!((0.4..=0.6).contains(&ratio), "n={n} ratio {ratio}");
        }
    }
}

#[test]
fn asymptotic_remainder_halves_real_axis() {
    check_halving(HankelKind::First, 0.0);
}

#[test]
fn asymptotic_remainder_halves_lower_half_plane() {
    check_halving(HankelKind::First, -PI / 8.0);
}

#[test]
fn asymptotic_remainder_halves_second_kind() {
    check_halving(HankelKind::Second, 0.0);
    check_halving(HankelKind::Second, PI / 8.0);
}
