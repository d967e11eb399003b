//! Invariant suites run by `polescan validate`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use polescan_core::geometry::{make_ellipse, BoundaryCurve, Vec2};
use polescan_core::interior::{point_source_scatter, Backend, InteriorProblem, MfsParams};
use polescan_core::nearfield::assemble;
use polescan_core::specfun::{bessel_j, bessel_y, hankel, HankelKind, Wavenumber};
use polescan_core::wavefield::{
    cylindrical_wave, modal_decompose, single_layer_farfield, single_layer_field, verify_outgoing, ModalFit,
    SingleLayer,
};

use crate::config::{ObstacleSpec, RunConfig};
use crate::CliError;

/// Reciprocity tolerance for the analytic backend.
pub const RECIPROCITY_ANALYTIC: f64 = 1e-10;
pub const RECIPROCITY_MFS: f64 = 1e-5;
pub const BACKEND_TOL_DISK: f64 = 1e-7;
/// Two MFS discretizations of a non-circular obstacle.
pub const BACKEND_TOL_MFS: f64 = 1e-5;
pub const WRONSKIAN_TOL: f64 = 1e-11;
pub const OUTGOING_TOL: f64 = 1e-8;
pub const RATE_RANGE: (f64, f64) = (0.35, 0.65);

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured quantity.
    pub measure: f64,
    pub detail: String,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<12} {:<4} {:>10.3e}  {}",
            self.name,
            if self.passed { "pass" } else { "FAIL" },
            self.measure,
            self.detail
        )
    }
}

fn failed(name: &'static str, e: impl fmt::Display) -> SuiteReport {
    SuiteReport {
        name,
        passed: false,
        measure: f64::NAN,
        detail: format!("error: {e}"),
    }
}

/// Deterministic sample `(n, z)` for the special-function suites: `n <= n_max`,
/// `|z|` in `[0.5, r_max]`, angles spread over the cut plane.
pub fn wronskian_points(count: usize, n_max: u32, r_max: f64) -> Vec<(u32, Complex64)> {
    // golden-ratio sequences
    let g1 = 0.618_033_988_749_895;
    let g2 = 0.754_877_666_246_693;
    (0..count)
        .map(|i| {
            let u = (0.5 + g1 * i as f64).fract();
            let v = (0.5 + g2 * i as f64).fract();
            let r = 0.5 + (r_max - 0.5) * u;
            let theta = -0.95 * PI + 1.9 * PI * v;
            (i as u32 % (n_max + 1), Complex64::from_polar(r, theta))
        })
        .collect()
}

/// `J Y' - J' Y = 2/(πz)` and `H1 H2' - H1' H2 = -4i/(πz)`. Errors are taken
/// relative to the larger of the exact value and the products being cancelled.
pub fn wronskian_errors(points: &[(u32, Complex64)]) -> Result<(f64, f64), CliError> {
    let mut worst_scaled: f64 = 0.0;
    let mut worst_bare: f64 = 0.0;
    let err = |e: polescan_core::specfun::SpecFunError| CliError::Other(e.to_string());
    for &(n, z) in points {
        let j = bessel_j(n, z).map_err(err)?;
        let y = bessel_y(n, z).map_err(err)?;
        let h1 = hankel(HankelKind::First, n, z).map_err(err)?;
        let h2 = hankel(HankelKind::Second, n, z).map_err(err)?;
        let cases = [
            (j.value * y.derivative, j.derivative * y.value, 2.0 / (PI * z)),
            (
                h1.value * h2.derivative,
                h1.derivative * h2.value,
                Complex64::new(0.0, -4.0) / (PI * z),
            ),
        ];
        for (p, q, exact) in cases {
            let e = (p - q - exact).norm();
            worst_bare = worst_bare.max(e / exact.norm());
            worst_scaled = worst_scaled.max(e / exact.norm().max(p.norm()).max(q.norm()));
        }
    }
    Ok((worst_scaled, worst_bare))
}

pub fn wronskian_suite() -> SuiteReport {
    let name = "wronskian";
    match wronskian_errors(&wronskian_points(400, 30, 20.0)) {
        Ok((scaled, _)) => SuiteReport {
            name,
            passed: scaled <= WRONSKIAN_TOL,
            measure: scaled,
            detail: "400 samples, n <= 30, |z| <= 20".into(),
        },
        Err(e) => failed(name, e),
    }
}

fn problem(cfg: &RunConfig, k: Complex64) -> Result<InteriorProblem, CliError> {
    let obstacle = cfg.obstacle.curve().map_err(|e| CliError::Config(e.to_string()))?;
    let k = Wavenumber::from_complex(k).map_err(|e| CliError::Config(e.to_string()))?;
    InteriorProblem::new(obstacle, cfg.bc, k).map_err(|e| CliError::Config(e.to_string()))
}

/// Largest `max |U - U^T| / max |U|` over `ks`.
pub fn reciprocity_asymmetry(cfg: &RunConfig, ks: &[Complex64]) -> Result<f64, CliError> {
    let probe = cfg.probe.sampling().map_err(|e| CliError::Config(e.to_string()))?;
    let mut worst: f64 = 0.0;
    for &k in ks {
        let u = assemble(&problem(cfg, k)?, &probe, &cfg.backend).map_err(|e| CliError::Other(e.to_string()))?;
        worst = worst.max(u.asymmetry());
    }
    Ok(worst)
}

/// Region center and corners.
pub fn region_samples(cfg: &RunConfig) -> Vec<Complex64> {
    let r = &cfg.region;
    vec![
        r.center(),
        Complex64::new(r.re_min, r.im_min),
        Complex64::new(r.re_max, r.im_max),
    ]
}

pub fn reciprocity_suite(cfg: &RunConfig) -> SuiteReport {
    let name = "reciprocity";
    let tol = match cfg.backend {
        Backend::Analytic => RECIPROCITY_ANALYTIC,
        Backend::Mfs(_) => RECIPROCITY_MFS,
    };
    match reciprocity_asymmetry(cfg, &region_samples(cfg)) {
        Ok(a) => SuiteReport {
            name,
            passed: a <= tol,
            measure: a,
            detail: format!("{} backend, tol {tol:e}", cfg.backend.name()),
        },
        Err(e) => failed(name, e),
    }
}

/// MFS parameters used as the second opinion on a disk of radius `r`.
pub fn disk_mfs_params(radius: f64) -> MfsParams {
    MfsParams {
        sources: 80,
        offset: Some(0.3 * radius),
        oversample: 2.0,
        ..MfsParams::default()
    }
}

/// Relative sup difference of `u^s(x, y)` over `xs` between two backends,
/// with `y` running over `ys`.
pub fn backend_difference(
    problem: &InteriorProblem,
    a: &Backend,
    b: &Backend,
    ys: &[Vec2],
    xs: &[Vec2],
) -> Result<f64, CliError> {
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &y in ys {
        let ua = point_source_scatter(problem, a, y, xs).map_err(|e| CliError::Other(e.to_string()))?;
        let ub = point_source_scatter(problem, b, y, xs).map_err(|e| CliError::Other(e.to_string()))?;
        for (p, q) in ua.iter().zip(&ub) {
            diff = diff.max((p - q).norm());
            scale = scale.max(p.norm());
        }
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// `count` points on a sunflower spiral in the open disk of the given
/// center and radius.
pub fn interior_cloud(center: Vec2, radius: f64, count: usize) -> Vec<Vec2> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let r = radius * ((i as f64 + 0.5) / count as f64).sqrt();
            center + Vec2::from_polar(r, golden * i as f64)
        })
        .collect()
}

pub fn backend_suite(cfg: &RunConfig) -> SuiteReport {
    let name = "backends";
    let run = || -> Result<SuiteReport, CliError> {
        let (a, b, tol, cloud) = match (&cfg.obstacle, cfg.backend) {
            (ObstacleSpec::Disk { radius, center }, _) => (
                Backend::Analytic,
                Backend::Mfs(disk_mfs_params(*radius)),
                BACKEND_TOL_DISK,
                interior_cloud(*center, 0.8 * radius, 100),
            ),
            (_, Backend::Mfs(p)) => {
                let finer = MfsParams {
                    sources: p.sources + 32,
                    ..p
                };
                (
                    Backend::Mfs(p),
                    Backend::Mfs(finer),
                    BACKEND_TOL_MFS,
                    interior_cloud(cfg.probe.center, cfg.probe.radius, 100),
                )
            }
            (_, Backend::Analytic) => return Err(CliError::Config("analytic backend needs a disk".into())),
        };
        let probe = cfg.probe.sampling().map_err(|e| CliError::Config(e.to_string()))?;
        let ys: Vec<Vec2> = probe.points.iter().step_by(10).copied().collect();
        let mut worst: f64 = 0.0;
        for k in region_samples(cfg) {
            worst = worst.max(backend_difference(&problem(cfg, k)?, &a, &b, &ys, &cloud)?);
        }
        Ok(SuiteReport {
            name,
            passed: worst <= tol,
            measure: worst,
            detail: format!("{} vs {}, tol {tol:e}", describe(&a), describe(&b)),
        })
    };
    run().unwrap_or_else(|e| failed(name, e))
}

fn describe(b: &Backend) -> String {
    match b {
        Backend::Analytic => "analytic".into(),
        Backend::Mfs(p) => format!("mfs(M={})", p.sources),
    }
}

/// Curve carrying the test densities of the outgoing and far-field suites.
pub fn layer_curve() -> BoundaryCurve {
    make_ellipse(0.6, 0.4).expect("valid ellipse")
}

/// Trigonometric density with deterministic coefficients indexed by `seed`.
pub fn test_layer(seed: usize) -> SingleLayer {
    let c = |j: usize| {
        let x = ((seed * 7 + j * 13) as f64 * 0.618_033_988_749_895).fract() - 0.5;
        let y = ((seed * 11 + j * 5) as f64 * 0.754_877_666_246_693).fract() - 0.5;
        Complex64::new(x, y)
    };
    SingleLayer::from_fn(&layer_curve(), 128, |t| {
        (0..6).fold(Complex64::new(0.0, 0.0), |acc, m| {
            acc + c(m) * Complex64::from_polar(1.0, (m as f64 - 2.0) * t)
        })
    })
    .expect("valid layer")
}

/// `(max_i max|β_n|/max|α_n|, injected-violation detected)` over the layers.
pub fn outgoing_purity(ks: &[Complex64], layers: usize) -> Result<(f64, bool), CliError> {
    let fit = ModalFit::new(1.5, 16);
    let err = |e: polescan_core::wavefield::WavefieldError| CliError::Other(e.to_string());
    let mut worst: f64 = 0.0;
    let mut detected = true;
    for i in 0..layers {
        let k = Wavenumber::from_complex(ks[i % ks.len()]).map_err(|e| CliError::Other(e.to_string()))?;
        let layer = test_layer(i);
        let r = layer.source_radius();
        let field = |x: Vec2| single_layer_field(k, &layer, x);
        let d = modal_decompose(field, r, k, &fit).map_err(err)?;
        let rep = verify_outgoing(&d, OUTGOING_TOL).map_err(err)?;
        worst = worst.max(rep.ratio);
        if i == 0 {
            let scale = d.alpha_max();
            let bad = |x: Vec2| Ok(field(x)? + cylindrical_wave(HankelKind::Second, 1, k, x)? * (1e-3 * scale));
            let rep = verify_outgoing(&modal_decompose(bad, r, k, &fit).map_err(err)?, OUTGOING_TOL).map_err(err)?;
            detected = !rep.outgoing && rep.offending == vec![1];
        }
    }
    Ok((worst, detected))
}

pub fn outgoing_suite(cfg: &RunConfig) -> SuiteReport {
    let name = "outgoing";
    match outgoing_purity(&region_samples(cfg), 6) {
        Ok((ratio, detected)) => SuiteReport {
            name,
            passed: ratio <= OUTGOING_TOL && detected,
            measure: ratio,
            detail: format!("6 layers, injected H2 detected: {detected}"),
        },
        Err(e) => failed(name, e),
    }
}

/// `max_x̂ |√r e^{-ikr} u(r x̂) - u∞(x̂)| / max|u∞|` at radius `r`.
fn farfield_remainder(k: Wavenumber, layer: &SingleLayer, r: f64) -> Result<f64, CliError> {
    let err = |e: polescan_core::wavefield::WavefieldError| CliError::Other(e.to_string());
    let pattern = single_layer_farfield(k, layer, 32).map_err(err)?;
    let kv = k.value();
    let mut worst: f64 = 0.0;
    for (a, v) in pattern.angles.iter().zip(&pattern.values) {
        let u = single_layer_field(k, layer, Vec2::from_polar(r, *a)).map_err(err)?;
        let scaled = u * r.sqrt() * (-Complex64::i() * kv * r).exp();
        worst = worst.max((scaled - v).norm());
    }
    Ok(worst / pattern.sup_norm())
}

/// Remainder ratios `e(2r)/e(r)` of the far-field expansion for each `k`.
pub fn farfield_rates(ks: &[Complex64], r: f64) -> Result<Vec<f64>, CliError> {
    let layer = test_layer(0);
    ks.iter()
        .map(|&k| {
            let k = Wavenumber::from_complex(k).map_err(|e| CliError::Other(e.to_string()))?;
            Ok(farfield_remainder(k, &layer, 2.0 * r)? / farfield_remainder(k, &layer, r)?)
        })
        .collect()
}

pub const RATE_WAVENUMBERS: [Complex64; 3] = [
    Complex64::new(1.0, -0.3),
    Complex64::new(0.8, -0.5),
    Complex64::new(2.0, 0.4),
];

pub fn rate_suite() -> SuiteReport {
    let name = "farfield";
    match farfield_rates(&RATE_WAVENUMBERS, 20.0) {
        Ok(rates) => {
            let inside = rates.iter().all(|q| (RATE_RANGE.0..=RATE_RANGE.1).contains(q));
            let off = rates.iter().map(|q| (q - 0.5).abs()).fold(0.0, f64::max);
            SuiteReport {
                name,
                passed: inside,
                measure: off,
                detail: format!(
                    "remainder ratios {}",
                    rates.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(" ")
                ),
            }
        }
        Err(e) => failed(name, e),
    }
}

/// Every suite, in display order.
pub fn run_all(cfg: &RunConfig) -> Vec<SuiteReport> {
    vec![
        wronskian_suite(),
        reciprocity_suite(cfg),
        backend_suite(cfg),
        outgoing_suite(cfg),
        rate_suite(),
    ]
}

/// Fails with exit status 4 if any suite failed.
pub fn cmd_validate(cfg: &RunConfig, out: &mut impl std::io::Write) -> Result<Vec<SuiteReport>, CliError> {
    let reports = run_all(cfg);
    writeln!(out, "{:<12} {:<4} {:>10}  detail", "suite", "ok", "measure")?;
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    let bad: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if bad.is_empty() {
        Ok(reports)
    } else {
        Err(CliError::Validation(bad.join(", ")))
    }
}
