use std::f64::consts::PI;

use num_complex::Complex64;
use polescan_core::geometry::{make_circle, make_ellipse, Vec2};
use polescan_core::specfun::{HankelKind, Wavenumber};
use polescan_core::wavefield::*;
use proptest::prelude::*;

mod common;
use common::dd_oracle::{bessel_j, hankel1};

fn k(re: f64, im: f64) -> Wavenumber {
    Wavenumber::new(re, im).unwrap()
}

fn mode_layer(a: f64, n: i32, samples: usize) -> SingleLayer {
    let c = make_circle(Vec2::ZERO, a).unwrap();
    SingleLayer::from_fn(&c, samples, |t| Complex64::from_polar(1.0, n as f64 * t)).unwrap()
}

#[test]
fn circle_modes_match_addition_theorem() {
    // S e^{inθ} = (iπa/2) J_n(ka) H_n(kr) e^{inφ} outside the circle
    let a = 0.6;
    for kk in [k(1.3, -0.4), k(0.7, 0.9), k(2.5, 0.0)] {
        for n in [0i32, 3] {
            let layer = mode_layer(a, n, 96);
            for (r, phi) in [(1.1, 0.3), (2.4, -2.0)] {
                let x = Vec2::from_polar(r, phi);
                let got = single_layer_field(kk, &layer, x).unwrap();
                let kv = kk.value();
                let want = Complex64::new(0.0, PI * a / 2.0)
                    * bessel_j(n as usize, kv * a)
                    * hankel1(n as usize, kv * r)
                    * Complex64::from_polar(1.0, n as f64 * phi);
                assert!((got - want).norm() <= 1e-12 * want.norm(), "{kk:?} n={n}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn far_field_of_a_uniform_circle() {
    let a = 0.6;
    let kk = k(1.7, 0.0);
    let layer = mode_layer(a, 0, 64);
    let ff = single_layer_farfield(kk, &layer, 16).unwrap();
    let kv = kk.value();
    let want = Complex64::from_polar(1.0, PI / 4.0) / (8.0 * PI * kv).sqrt() * 2.0 * PI * a * bessel_j(0, kv * a);
    for v in &ff.values {
        assert!((v - want).norm() < 1e-13, "{v} vs {want}");
    }
    assert!((ff.sup_norm() - want.norm()).abs() < 1e-13);
}

#[test]
fn field_approaches_its_far_field() {
    let ellipse = make_ellipse(0.6, 0.4).unwrap();
    let layer = SingleLayer::from_fn(&ellipse, 128, |t| Complex64::new(t.cos(), (2.0 * t).sin())).unwrap();
    let kk = k(2.0, 0.0);
    let ff = single_layer_farfield(kk, &layer, 8).unwrap();
    let err = |r: f64| {
        let x = Vec2::from_polar(r, ff.angles[3]);
        let u = single_layer_field(kk, &layer, x).unwrap();
        (u * r.sqrt() * (-Complex64::i() * kk.value() * r).exp() - ff.values[3]).norm()
    };
    let (e1, e2) = (err(50.0), err(100.0));
    assert!(e1 < 0.05 * ff.sup_norm());
    assert!((e2 / e1 - 0.5).abs() < 0.1, "{e1} {e2}");
}

#[test]
fn single_layers_are_outgoing() {
    let ellipse = make_ellipse(0.6, 0.4).unwrap();
    let layer = SingleLayer::from_fn(&ellipse, 128, |t| Complex64::new(1.0 + t.sin(), t.cos())).unwrap();
    for kk in [k(1.0, -0.3), k(0.8, 0.5)] {
        let d = modal_decompose(|x| single_layer_field(kk, &layer, x), layer.source_radius(), kk, &ModalFit::new(1.5, 16))
            .unwrap();
        let report = verify_outgoing(&d, 1e-8).unwrap();
        assert!(report.outgoing, "{kk:?}: {report:?}");
    }
}

#[test]
fn incoming_component_is_detected() {
    let kk = k(1.2, -0.2);
    let field = |x: Vec2| {
        Ok(cylindrical_wave(HankelKind::First, 2, kk, x)? + 1e-3 * cylindrical_wave(HankelKind::Second, -1, kk, x)?)
    };
    let d = modal_decompose(field, 0.5, kk, &ModalFit::new(1.0, 6)).unwrap();
    let (a2, b2) = d.mode(2).unwrap().coeffs.unwrap();
    assert!((a2 - 1.0).norm() < 1e-10 && b2.norm() < 1e-10);
    let (_, b) = d.mode(-1).unwrap().coeffs.unwrap();
    assert!((b - 1e-3).norm() < 1e-12);
    let report = verify_outgoing(&d, 1e-8).unwrap();
    assert_eq!(report.offending, vec![-1]);
}

#[test]
fn weighted_circle_integrals_settle() {
    let layer = mode_layer(0.5, 1, 64);
    let kk = k(0.8, -0.5);
    let radii = [20.0, 40.0, 80.0];
    let rep = rellich_decay_check(|x| single_layer_field(kk, &layer, x), layer.source_radius(), kk, &radii, 256).unwrap();
    assert!(rep.converging, "{rep:?}");
    let ratio = rep.relative_change[1] / rep.relative_change[0];
    assert!((0.3..0.7).contains(&ratio), "{rep:?}");
    let zero = rellich_decay_check(|_| Ok(Complex64::new(0.0, 0.0)), 0.5, kk, &radii, 64).unwrap();
    assert!(zero.weighted.iter().all(|&m| m == 0.0) && zero.converging);
}

#[test]
fn rejects_bad_inputs() {
    let layer = mode_layer(0.5, 0, 32);
    let kk = k(1.0, 0.0);
    assert!(matches!(single_layer_field(kk, &layer, Vec2::new(0.1, 0.0)), Err(WavefieldError::Inside(..))));
    assert!(matches!(single_layer_field(kk, &layer, Vec2::new(0.51, 0.0)), Err(WavefieldError::TooClose { .. })));
    assert!(matches!(single_layer_farfield(kk, &layer, 4), Err(WavefieldError::TooFewDirections(4))));
    let field = |x: Vec2| single_layer_field(kk, &layer, x);
    assert!(matches!(
        modal_decompose(field, 0.5, kk, &ModalFit::new(0.4, 4)),
        Err(WavefieldError::RadiusInsideSources { .. })
    ));
    let fit = ModalFit { samples: 8, ..ModalFit::new(1.0, 4) };
    assert!(matches!(modal_decompose(field, 0.5, kk, &fit), Err(WavefieldError::TooFewSamples { .. })));
    assert!(rellich_decay_check(field, 0.5, kk, &[2.0, 1.0], 64).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn modal_fit_recovers_both_kinds(
        kr in 0.3f64..2.5, ki in -0.5f64..0.5,
        ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
        n in -4i32..=4,
    ) {
        let kk = k(kr, ki);
        let (alpha, beta) = (Complex64::new(ar, ai), Complex64::new(br, bi));
        prop_assume!(alpha.norm() > 0.1 && beta.norm() > 0.1);
        let field = |x: Vec2| Ok(alpha * cylindrical_wave(HankelKind::First, n, kk, x)? + beta * cylindrical_wave(HankelKind::Second, n, kk, x)?);
        let d = modal_decompose(field, 0.5, kk, &ModalFit::new(1.0, 6)).unwrap();
        let (a, b) = d.mode(n).unwrap().coeffs.unwrap();
        prop_assert!((a - alpha).norm() < 1e-8 * alpha.norm());
        prop_assert!((b - beta).norm() < 1e-8 * beta.norm());
        prop_assert!(d.max_residual() < 1e-8);
    }
}
