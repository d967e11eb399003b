//! Outgoing fields from single-layer potentials, their far-field patterns,
//! and modal diagnostics on circles.
//!
//! On `|x| = r` outside the sources a field expands as
//! `u = Σ_n a_n(r) Y_n(φ)`, `Y_n = e^{inφ}/√(2π)`, with
//! `a_n(r) = α_n H_n^(1)(kr) + β_n H_n^(2)(kr)`. Outgoing fields have `β_n = 0`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{BoundaryCurve, CurveSampling, GeometryError, Vec2};
use crate::specfun::{fundamental_solution, hankel, HankelKind, SpecFunError, Wavenumber, MAX_ORDER};

pub const DEFAULT_ANGULAR_SAMPLES: usize = 512;
/// Largest relative fit residual accepted by [`verify_outgoing`].
pub const MAX_FIT_RESIDUAL: f64 = 1e-6;
const SINGULAR_2X2: f64 = 1e-13;
const NEGLIGIBLE_MODE: f64 = 1e-15;
/// Residuals of weak modes are measured against this fraction of the content.
const RESIDUAL_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WavefieldError {
    #[error("point at distance {distance} from the curve, need more than {limit}")]
    TooClose { distance: f64, limit: f64 },
    #[error("point ({0}, {1}) lies inside the source curve")]
    Inside(f64, f64),
    #[error("density has {got} values, expected {expected}")]
    DensityLength { got: usize, expected: usize },
    #[error("radius {radius} is not outside the source radius {source_radius}")]
    RadiusInsideSources { radius: f64, source_radius: f64 },
    #[error("need 0 < r1 < r2, got r1 = {0}, r2 = {1}")]
    InvalidRadii(f64, f64),
    #[error("{got} angular samples, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("need at least 8 far-field directions, got {0}")]
    TooFewDirections(usize),
    #[error("mode count {0} exceeds the supported order")]
    TooManyModes(usize),
    #[error("decomposition residual {0:e} is too large to judge outgoingness")]
    PoorFit(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Density on a uniform sampling of a curve, integrated against `Φ_k`.
#[derive(Debug, Clone)]
pub struct SingleLayer {
    curve: BoundaryCurve,
    samples: CurveSampling,
    density: Vec<Complex64>,
}

impl SingleLayer {
    /// `density[i]` is the value at the `i`-th of `density.len()` uniform samples.
    pub fn new(curve: &BoundaryCurve, density: Vec<Complex64>) -> Result<Self, WavefieldError> {
        let samples = curve.sample_uniform(density.len())?;
        Ok(Self {
            curve: curve.clone(),
            samples,
            density,
        })
    }

    /// Density given as a function of the curve parameter `t`.
    pub fn from_fn(
        curve: &BoundaryCurve,
        n: usize,
        density: impl Fn(f64) -> Complex64,
    ) -> Result<Self, WavefieldError> {
        let samples = curve.sample_uniform(n)?;
        let density = samples.params.iter().map(|&t| density(t)).collect();
        Ok(Self {
            curve: curve.clone(),
            samples,
            density,
        })
    }

    pub fn samples(&self) -> &CurveSampling {
        &self.samples
    }

    pub fn density(&self) -> &[Complex64] {
        &self.density
    }

    /// Radius of the smallest origin-centered disk holding the curve samples.
    pub fn source_radius(&self) -> f64 {
        self.samples.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

/// `(S_k g)(x)` by the trapezoid rule. `x` must be outside the curve and more
/// than two sample spacings away from it.
pub fn single_layer_field(k: Wavenumber, layer: &SingleLayer, x: Vec2) -> Result<Complex64, WavefieldError> {
    if layer.curve.contains(x) {
        return Err(WavefieldError::Inside(x.x, x.y));
    }
    let limit = 2.0 * layer.samples.max_spacing();
    let distance = layer.samples.distance_to(x);
    if distance <= limit {
        return Err(WavefieldError::TooClose { distance, limit });
    }
    let s = &layer.samples;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..s.len() {
        acc += fundamental_solution(k, x, s.points[i])? * (layer.density[i] * s.weights[i]);
    }
    Ok(acc)
}

/// Far-field pattern on a uniform set of directions `2πj/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    pub k: Wavenumber,
    pub angles: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FarFieldPattern {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `angle,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "angle,re,im")?;
        for (a, v) in self.angles.iter().zip(&self.values) {
            writeln!(out, "{a},{:e},{:e}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// `u^∞(x̂) = e^{iπ/4}/√(8πk) ∫ e^{-ik x̂·y} g(y) ds(y)` on `n` directions.
pub fn single_layer_farfield(
    k: Wavenumber,
    layer: &SingleLayer,
    n: usize,
) -> Result<FarFieldPattern, WavefieldError> {
    if n < 8 {
        return Err(WavefieldError::TooFewDirections(n));
    }
    let kv = k.value();
    let pre = Complex64::from_polar(1.0, PI / 4.0) / (8.0 * PI * kv).sqrt();
    let s = &layer.samples;
    let angles: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let values = angles
        .iter()
        .map(|&a| {
            let dir = Vec2::from_polar(1.0, a);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..s.len() {
                let phase = -Complex64::i() * kv * dir.dot(s.points[i]);
                acc += phase.exp() * (layer.density[i] * s.weights[i]);
            }
            pre * acc
        })
        .collect();
    Ok(FarFieldPattern { k, angles, values })
}

/// `H_n(k|x|) e^{inφ}/√(2π)` for either kind and any integer `n`.
pub fn cylindrical_wave(kind: HankelKind, n: i32, k: Wavenumber, x: Vec2) -> Result<Complex64, WavefieldError> {
    let h = hankel_signed(kind, n, k.value() * x.norm())?;
    Ok(h * Complex64::from_polar(1.0, n as f64 * x.angle()) / (2.0 * PI).sqrt())
}

fn hankel_signed(kind: HankelKind, n: i32, z: Complex64) -> Result<Complex64, SpecFunError> {
    let h = hankel(kind, n.unsigned_abs(), z)?.value;
    // H_{-n} = (-1)^n H_n
    Ok(if n < 0 && n % 2 != 0 { -h } else { h })
}

/// Radii and resolution for [`modal_decompose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalFit {
    pub r1: f64,
    pub r2: f64,
    pub n_modes: usize,
    pub samples: usize,
}

impl ModalFit {
    /// `r2 = 2 r1` and the default angular resolution.
    pub fn new(r1: f64, n_modes: usize) -> Self {
        Self {
            r1,
            r2: 2.0 * r1,
            n_modes,
            samples: DEFAULT_ANGULAR_SAMPLES,
        }
    }

    /// Radius used to check the fit.
    pub fn r3(&self) -> f64 {
        0.5 * (self.r1 + self.r2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub n: i32,
    /// `(α_n, β_n)`; `None` when the 2x2 system is near singular or the mode
    /// carries no content.
    pub coeffs: Option<(Complex64, Complex64)>,
    /// Misfit at the check radius relative to `max(|a_n(r3)|, 1e-6 max_m |a_m|)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalDecomposition {
    pub k: Wavenumber,
    pub r1: f64,
    pub r2: f64,
    pub modes: Vec<Mode>,
}

impl ModalDecomposition {
    pub fn mode(&self, n: i32) -> Option<&Mode> {
        self.modes.iter().find(|m| m.n == n)
    }

    pub fn alpha_max(&self) -> f64 {
        self.fitted().map(|(_, a, _)| a.norm()).fold(0.0, f64::max)
    }

    pub fn beta_max(&self) -> f64 {
        self.fitted().map(|(_, _, b)| b.norm()).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.modes
            .iter()
            .filter(|m| m.coeffs.is_some())
            .map(|m| m.residual)
            .fold(0.0, f64::max)
    }

    fn fitted(&self) -> impl Iterator<Item = (i32, Complex64, Complex64)> + '_ {
        self.modes.iter().filter_map(|m| m.coeffs.map(|(a, b)| (m.n, a, b)))
    }

    /// `n,alpha_re,alpha_im,beta_re,beta_im,residual`; flagged modes leave
    /// the coefficient fields empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,alpha_re,alpha_im,beta_re,beta_im,residual")?;
        for m in &self.modes {
            match m.coeffs {
                Some((a, b)) => writeln!(
                    out,
                    "{},{:e},{:e},{:e},{:e},{:e}",
                    m.n, a.re, a.im, b.re, b.im, m.residual
                )?,
                None => writeln!(out, "{},,,,,{:e}", m.n, m.residual)?,
            }
        }
        Ok(())
    }
}

/// Angular Fourier coefficients `a_n(r)` for `|n| <= n_modes`, index `n + n_modes`.
fn circle_coefficients<F>(field: &F, r: f64, n_modes: usize, samples: usize) -> Result<Vec<Complex64>, WavefieldError>
where
    F: Fn(Vec2) -> Result<Complex64, WavefieldError>,
{
    let values = (0..samples)
        .map(|j| field(Vec2::from_polar(r, 2.0 * PI * j as f64 / samples as f64)))
        .collect::<Result<Vec<_>, _>>()?;
    let scale = (2.0 * PI).sqrt() / samples as f64;
    let n = n_modes as i64;
    Ok((-n..=n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                // reduce the phase index exactly before converting to an angle
                let idx = (m * j as i64).rem_euclid(samples as i64);
                acc += v * Complex64::from_polar(1.0, -2.0 * PI * idx as f64 / samples as f64);
            }
            acc * scale
        })
        .collect())
}

/// Two-radius fit of `α_n, β_n` for `|n| <= n_modes`.
///
/// `source_radius` bounds the field's sources; both circles must lie outside it.
pub fn modal_decompose<F>(
    field: F,
    source_radius: f64,
    k: Wavenumber,
    fit: &ModalFit,
) -> Result<ModalDecomposition, WavefieldError>
where
    F: Fn(Vec2) -> Result<Complex64, WavefieldError>,
{
    let ModalFit {
        r1,
        r2,
        n_modes,
        samples,
    } = *fit;
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(WavefieldError::InvalidRadii(r1, r2));
    }
    if r1 <= source_radius {
        return Err(WavefieldError::RadiusInsideSources {
            radius: r1,
            source_radius,
        });
    }
    if n_modes > MAX_ORDER as usize {
        return Err(WavefieldError::TooManyModes(n_modes));
    }
    let need = (4 * n_modes).max(2 * n_modes + 1);
    if samples < need {
        return Err(WavefieldError::TooFewSamples { got: samples, need });
    }
    let r3 = fit.r3();
    let a1 = circle_coefficients(&field, r1, n_modes, samples)?;
    let a2 = circle_coefficients(&field, r2, n_modes, samples)?;
    let a3 = circle_coefficients(&field, r3, n_modes, samples)?;
    let content = a1.iter().chain(&a2).map(|v| v.norm()).fold(0.0, f64::max);
    let kv = k.value();
    let mut modes = Vec::with_capacity(a1.len());
    for (idx, n) in (-(n_modes as i32)..=n_modes as i32).enumerate() {
        let h = |kind, r: f64| hankel_signed(kind, n, kv * r);
        let (p1, q1) = (h(HankelKind::First, r1)?, h(HankelKind::Second, r1)?);
        let (p2, q2) = (h(HankelKind::First, r2)?, h(HankelKind::Second, r2)?);
        let negligible = a1[idx].norm().max(a2[idx].norm()) <= NEGLIGIBLE_MODE * content;
        // equilibrate columns so the singularity test is scale free
        let (sp, sq) = (p1.norm().max(p2.norm()), q1.norm().max(q2.norm()));
        let det = (p1 / sp) * (q2 / sq) - (q1 / sq) * (p2 / sp);
        if negligible || det.norm() < SINGULAR_2X2 || !det.re.is_finite() {
            modes.push(Mode {
                n,
                coeffs: None,
                residual: 0.0,
            });
            continue;
        }
        let alpha = (a1[idx] * (q2 / sq) - (q1 / sq) * a2[idx]) / det / sp;
        let beta = ((p1 / sp) * a2[idx] - a1[idx] * (p2 / sp)) / det / sq;
        let predicted = alpha * h(HankelKind::First, r3)? + beta * h(HankelKind::Second, r3)?;
        let floor = a3[idx].norm().max(RESIDUAL_FLOOR * content).max(f64::MIN_POSITIVE);
        modes.push(Mode {
            n,
            coeffs: Some((alpha, beta)),
            residual: (predicted - a3[idx]).norm() / floor,
        });
    }
    Ok(ModalDecomposition { k, r1, r2, modes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutgoingReport {
    pub outgoing: bool,
    /// `max |β_n| / max(max |α_n|, 1e-14)`.
    pub ratio: f64,
    pub offending: Vec<i32>,
}

/// Outgoing iff `max |β_n| <= tol * max(max |α_n|, 1e-14)`.
pub fn verify_outgoing(decomp: &ModalDecomposition, tol: f64) -> Result<OutgoingReport, WavefieldError> {
    let res = decomp.max_residual();
    if res > MAX_FIT_RESIDUAL {
        return Err(WavefieldError::PoorFit(res));
    }
    let scale = decomp.alpha_max().max(1e-14);
    let offending: Vec<i32> = decomp
        .fitted()
        .filter(|(_, _, b)| b.norm() > tol * scale)
        .map(|(n, _, _)| n)
        .collect();
    Ok(OutgoingReport {
        outgoing: offending.is_empty(),
        ratio: decomp.beta_max() / scale,
        offending,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RellichReport {
    pub radii: Vec<f64>,
    /// `m(r) = e^{2 Im(k) r} ∮_{|x|=r} |u|² ds`.
    pub weighted: Vec<f64>,
    /// `|m(r_{i+1}) - m(r_i)| / m(r_i)`, zero when `m(r_i) = 0`.
    pub relative_change: Vec<f64>,
    /// Every relative change at most `C / r` with `C` fixed by the first step.
    pub converging: bool,
}

/// Tabulates the weighted circle integrals for increasing radii outside
/// `source_radius`.
pub fn rellich_decay_check<F>(
    field: F,
    source_radius: f64,
    k: Wavenumber,
    radii: &[f64],
    samples: usize,
) -> Result<RellichReport, WavefieldError>
where
    F: Fn(Vec2) -> Result<Complex64, WavefieldError>,
{
    if let Some(&r) = radii.iter().find(|&&r| !(r > source_radius)) {
        return Err(WavefieldError::RadiusInsideSources {
            radius: r,
            source_radius,
        });
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WavefieldError::InvalidRadii(radii[0], radii[radii.len() - 1]));
    }
    if samples < 8 {
        return Err(WavefieldError::TooFewSamples { got: samples, need: 8 });
    }
    let mut weighted = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut sum = 0.0;
        for j in 0..samples {
            sum += field(Vec2::from_polar(r, 2.0 * PI * j as f64 / samples as f64))?.norm_sqr();
        }
        // fold the weight in before summing would overflow for large |Im k| r
        weighted.push(sum * (2.0 * PI * r / samples as f64) * (2.0 * k.im() * r).exp());
    }
    let relative_change: Vec<f64> = weighted
        .windows(2)
        .map(|w| if w[0] > 0.0 { (w[1] - w[0]).abs() / w[0] } else { 0.0 })
        .collect();
    let converging = match relative_change.first() {
        None => true,
        Some(&c0) => {
            let c = c0 * radii[0];
            relative_change
                .iter()
                .zip(radii)
                .all(|(&d, &r)| d <= 1.5 * c / r + 1e-12)
        }
    };
    Ok(RellichReport {
        radii: radii.to_vec(),
        weighted,
        relative_change,
        converging,
    })
}
