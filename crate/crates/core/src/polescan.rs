//! Wavenumber scans over a rectangle in the lower half plane, spike
//! detection and refinement, and an exact-pole oracle for the disk.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::exec::map_indexed;
use crate::geometry::{CurveSampling, Vec2};
use crate::interior::{Backend, BoundaryCondition, InteriorError, InteriorProblem, SolverSetup};
use crate::linalg::Svd;
use crate::nearfield::{self, cond_from, NearFieldError};
use crate::specfun::{hankel, HankelKind, InvalidWavenumber, SpecFunError, Wavenumber};

/// Default prominence threshold for [`detect_spikes`].
pub const DEFAULT_THRESHOLD: f64 = 5.0;
/// Deepest allowed [`refine`] recursion.
pub const MAX_REFINE_DEPTH: usize = 6;
/// Default highest order for [`disk_pole_oracle`].
pub const DEFAULT_ORACLE_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("invalid scan region: {0}")]
    InvalidRegion(&'static str),
    #[error("refinement depth {0} exceeds {MAX_REFINE_DEPTH}")]
    InvalidDepth(usize),
    #[error("regularization parameter must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("probe point ({0}, {1}) is not strictly inside the obstacle")]
    ProbeOutside(f64, f64),
    #[error("indicator is not finite")]
    NonFinite,
    #[error(transparent)]
    Wavenumber(#[from] InvalidWavenumber),
    #[error(transparent)]
    Interior(#[from] InteriorError),
    #[error(transparent)]
    NearField(#[from] NearFieldError),
}

impl From<crate::linalg::LinalgError> for ScanError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        ScanError::NearField(e.into())
    }
}

/// Rectangle `[re_min, re_max] x [im_min, im_max]` sampled on an
/// `n_re x n_im` grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl ScanRegion {
    pub fn new(
        re: (f64, f64),
        im: (f64, f64),
        n_re: usize,
        n_im: usize,
    ) -> Result<Self, ScanError> {
        let r = Self {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            n_re,
            n_im,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ScanError::InvalidRegion("bounds must be finite"));
        }
        if self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(ScanError::InvalidRegion("empty rectangle"));
        }
        if self.im_max > 0.0 {
            return Err(ScanError::InvalidRegion("region must lie in the closed lower half plane"));
        }
        if self.n_re < 2 || self.n_im < 2 {
            return Err(ScanError::InvalidRegion("grid needs at least 2 nodes per axis"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_re * self.n_im
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn re_step(&self) -> f64 {
        (self.re_max - self.re_min) / (self.n_re - 1) as f64
    }

    pub fn im_step(&self) -> f64 {
        (self.im_max - self.im_min) / (self.n_im - 1) as f64
    }

    /// Node at column `i` (real part) and row `j` (imaginary part, ascending).
    pub fn node_at(&self, i: usize, j: usize) -> Complex64 {
        let lerp = |lo: f64, hi: f64, t: usize, n: usize| {
            if t + 1 == n {
                hi
            } else {
                lo + (hi - lo) * t as f64 / (n - 1) as f64
            }
        };
        Complex64::new(
            lerp(self.re_min, self.re_max, i, self.n_re),
            lerp(self.im_min, self.im_max, j, self.n_im),
        )
    }

    /// Node with flat index `j * n_re + i`.
    pub fn node(&self, index: usize) -> Complex64 {
        self.node_at(index % self.n_re, index / self.n_re)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, k: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&k.re) && (self.im_min..=self.im_max).contains(&k.im)
    }

    fn clamp(&self, k: Complex64) -> Complex64 {
        Complex64::new(
            k.re.clamp(self.re_min, self.re_max),
            k.im.clamp(self.im_min, self.im_max),
        )
    }

    /// Distance from `k` to the rectangle's boundary.
    fn edge_distance(&self, k: Complex64) -> f64 {
        let dx = (k.re - self.re_min).abs().min((k.re - self.re_max).abs());
        let dy = (k.im - self.im_min).abs().min((k.im - self.im_max).abs());
        let inside_re = (self.re_min..=self.re_max).contains(&k.re);
        let inside_im = (self.im_min..=self.im_max).contains(&k.im);
        match (inside_re, inside_im) {
            (true, true) => dx.min(dy),
            (true, false) => dy,
            (false, true) => dx,
            (false, false) => dx.hypot(dy),
        }
    }

    fn expanded(&self, by: f64) -> Self {
        Self {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndicatorKind {
    /// `‖g‖₂` of the regularized density.
    Norm,
    /// Condition number of the unweighted near-field matrix.
    Cond,
}

impl IndicatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            IndicatorKind::Norm => "norm",
            IndicatorKind::Cond => "cond",
        }
    }
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndicatorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "norm" => Ok(IndicatorKind::Norm),
            "cond" => Ok(IndicatorKind::Cond),
            other => Err(format!("unknown indicator `{other}` (expected norm or cond)")),
        }
    }
}

/// How the Tikhonov parameter is chosen for a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPolicy {
    Fixed(f64),
    /// `α = δ σ_max(A)²` with `A` taken at the region center.
    Relative(f64),
}

impl Default for AlphaPolicy {
    fn default() -> Self {
        AlphaPolicy::Relative(1e-10)
    }
}

/// Everything a scan needs besides the region.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    /// Obstacle and boundary condition; its wavenumber is replaced per node.
    pub problem: InteriorProblem,
    pub backend: Backend,
    pub probe: CurveSampling,
    pub z: Vec2,
    pub indicator: IndicatorKind,
    pub alpha: AlphaPolicy,
}

/// Indicator value at one node and the interior solver's residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeValue {
    pub value: f64,
    pub residual: f64,
}

/// A [`ScanSpec`] with its k-independent setup built and `α` fixed.
#[derive(Debug, Clone)]
pub struct Scanner {
    spec: ScanSpec,
    setup: SolverSetup,
    alpha: f64,
}

impl Scanner {
    /// Validates the spec and resolves `α` at `reference` (usually the
    /// region center).
    pub fn new(spec: ScanSpec, reference: Complex64) -> Result<Self, ScanError> {
        let obstacle = spec.problem.obstacle();
        if let Some(p) = spec.probe.points.iter().find(|&&p| !obstacle.contains(p)) {
            return Err(ScanError::ProbeOutside(p.x, p.y));
        }
        nearfield::check_observer(obstacle, spec.z)?;
        let setup = SolverSetup::new(obstacle, &spec.backend)?;
        let mut scanner = Self {
            spec,
            setup,
            alpha: 1.0,
        };
        scanner.alpha = match scanner.spec.alpha {
            AlphaPolicy::Fixed(a) => a,
            AlphaPolicy::Relative(delta) => {
                let u = scanner.matrix(reference)?;
                delta * Svd::new(u.weighted())?.sigma_max().powi(2)
            }
        };
        if !(scanner.alpha > 0.0 && scanner.alpha.is_finite()) {
            return Err(ScanError::InvalidAlpha(scanner.alpha));
        }
        Ok(scanner)
    }

    pub fn spec(&self) -> &ScanSpec {
        &self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn backend_name(&self) -> &'static str {
        self.spec.backend.name()
    }

    fn matrix(&self, k: Complex64) -> Result<nearfield::NearFieldMatrix, ScanError> {
        let problem = self.spec.problem.with_k(Wavenumber::from_complex(k)?)?;
        Ok(nearfield::assemble_with(
            &self.setup,
            &problem,
            &self.spec.probe,
            self.spec.backend.name(),
        )?)
    }

    /// Indicator at a single wavenumber.
    pub fn evaluate(&self, k: Complex64) -> Result<NodeValue, ScanError> {
        let u = self.matrix(k)?;
        let value = match self.spec.indicator {
            IndicatorKind::Norm => {
                let a = u.weighted();
                let svd = Svd::new(a.clone())?;
                let phi = nearfield::rhs(u.k(), &self.spec.probe, self.spec.z, self.spec.problem.obstacle())?;
                let g = nearfield::tikhonov_with_svd(&svd, &a, &phi, self.alpha)?;
                nearfield::indicator_norm(&g)
            }
            IndicatorKind::Cond => cond_from(&Svd::new(u.entries().clone())?),
        };
        if !value.is_finite() && self.spec.indicator == IndicatorKind::Norm {
            return Err(ScanError::NonFinite);
        }
        Ok(NodeValue {
            value,
            residual: u.solver_residual(),
        })
    }

    /// Evaluates every node of `region`; failed nodes keep the sentinel 0.
    pub fn scan(&self, region: &ScanRegion, workers: usize) -> ScanResult {
        let nodes = map_indexed(region.len(), workers, |idx| self.evaluate(region.node(idx)));
        let mut values = Vec::with_capacity(nodes.len());
        let mut failures = Vec::new();
        let mut max_residual: f64 = 0.0;
        for (idx, node) in nodes.into_iter().enumerate() {
            match node {
                Ok(v) => {
                    values.push(v.value);
                    if v.residual.is_finite() {
                        max_residual = max_residual.max(v.residual);
                    }
                }
                Err(e) => {
                    values.push(0.0);
                    failures.push(NodeFailure {
                        index: idx,
                        message: e.to_string(),
                    });
                }
            }
        }
        ScanResult {
            region: *region,
            values,
            failures,
            indicator: self.spec.indicator,
            alpha: self.alpha,
            backend: self.spec.backend.name(),
            max_residual,
        }
    }
}

/// Builds a [`Scanner`] with `α` resolved at the region center and scans.
pub fn scan(region: &ScanRegion, spec: ScanSpec, workers: usize) -> Result<ScanResult, ScanError> {
    region.validate()?;
    let scanner = Scanner::new(spec, region.center())?;
    Ok(scanner.scan(region, workers))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeFailure {
    pub index: usize,
    pub message: String,
}

/// Indicator grid, row `j` (imaginary part ascending) times column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub region: ScanRegion,
    /// Flat values indexed `j * n_re + i`.
    pub values: Vec<f64>,
    pub failures: Vec<NodeFailure>,
    pub indicator: IndicatorKind,
    pub alpha: f64,
    pub backend: &'static str,
    pub max_residual: f64,
}

impl ScanResult {
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.region.n_re + i]
    }

    fn failed_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.values.len()];
        for f in &self.failures {
            mask[f.index] = true;
        }
        mask
    }

    /// Median over nodes that did not fail; `None` if all failed.
    pub fn median(&self) -> Option<f64> {
        let mask = self.failed_mask();
        let mut v: Vec<f64> = self
            .values
            .iter()
            .zip(&mask)
            .filter(|(_, &bad)| !bad)
            .map(|(&x, _)| x)
            .collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        Some(if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        })
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failures.len() as f64 / self.values.len().max(1) as f64
    }

    /// `# scan ...` header, optional extra comment lines, then `re,im,indicator`.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> io::Result<()> {
        let r = &self.region;
        writeln!(
            out,
            "# scan re_min={} re_max={} im_min={} im_max={} n_re={} n_im={} alpha={:e} indicator={}",
            r.re_min, r.re_max, r.im_min, r.im_max, r.n_re, r.n_im, self.alpha, self.indicator
        )?;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        for (idx, v) in self.values.iter().enumerate() {
            let k = r.node(idx);
            writeln!(out, "{},{},{:e}", k.re, k.im, v)?;
        }
        Ok(())
    }

    /// Plain 16-bit PGM of `ln(indicator)`, top row at `im_max`. Failed and
    /// zero nodes map to 0.
    pub fn write_pgm<W: Write>(&self, mut out: W, comments: &[String]) -> io::Result<()> {
        let r = &self.region;
        let logs: Vec<Option<f64>> = self
            .values
            .iter()
            .map(|&v| (v > 0.0 && v.is_finite()).then(|| v.ln()))
            .collect();
        let lo = logs.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let hi = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(out, "P2")?;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{} {}", r.n_re, r.n_im)?;
        writeln!(out, "65535")?;
        for j in (0..r.n_im).rev() {
            let row: Vec<String> = (0..r.n_re)
                .map(|i| {
                    let level = match logs[j * r.n_re + i] {
                        Some(l) if hi > lo => ((l - lo) / (hi - lo) * 65535.0).round() as u32,
                        Some(_) => 32768,
                        None => 0,
                    };
                    level.to_string()
                })
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Scan,
    Oracle,
}

/// A candidate pole.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleEstimate {
    pub location: Complex64,
    /// Indicator value for scan estimates, `|f|` at the zero for oracle ones.
    pub value: f64,
    /// Value over the grid median; 0 for oracle zeros.
    pub prominence: f64,
    pub depth: usize,
    pub method: EstimateMethod,
    /// Hankel order of an oracle zero.
    pub order: Option<usize>,
    /// Spike sits on the edge of its scan grid.
    pub on_boundary: bool,
    /// Refinement left the original cell neighborhood.
    pub drift: bool,
}

/// Strict 8-neighbor local maxima with value `>= threshold * median`, sorted
/// by value descending.
pub fn detect_spikes(result: &ScanResult, threshold: f64) -> Vec<PoleEstimate> {
    let Some(median) = result.median() else {
        return Vec::new();
    };
    let r = &result.region;
    let mask = result.failed_mask();
    let (n_re, n_im) = (r.n_re as isize, r.n_im as isize);
    let mut found = Vec::new();
    for j in 0..n_im {
        for i in 0..n_re {
            let idx = (j * n_re + i) as usize;
            let v = result.values[idx];
            if mask[idx] || v < threshold * median || v <= 0.0 {
                continue;
            }
            let mut is_max = true;
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (ii, jj) = (i + di, j + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= n_re || jj >= n_im {
                        continue;
                    }
                    if result.values[(jj * n_re + ii) as usize] >= v {
                        is_max = false;
                    }
                }
            }
            if is_max {
                found.push((
                    idx,
                    PoleEstimate {
                        location: r.node(idx),
                        value: v,
                        prominence: if median > 0.0 { v / median } else { f64::INFINITY },
                        depth: 0,
                        method: EstimateMethod::Scan,
                        order: None,
                        on_boundary: i == 0 || j == 0 || i == n_re - 1 || j == n_im - 1,
                        drift: false,
                    },
                ));
            }
        }
    }
    found.sort_by(|a, b| b.1.value.total_cmp(&a.1.value).then(a.0.cmp(&b.0)));
    found.into_iter().map(|(_, e)| e).collect()
}

/// Recursive 5x5 re-scan around `estimate`, starting on its cell neighborhood
/// (`± step` per axis) and shrinking the window 4x per level. Nodes are
/// clamped to `bounds`. `f` returns `None` for failed evaluations.
pub fn refine_with<F>(
    estimate: &PoleEstimate,
    step: (f64, f64),
    bounds: &ScanRegion,
    depth: usize,
    workers: usize,
    f: F,
) -> Result<PoleEstimate, ScanError>
where
    F: Fn(Complex64) -> Option<f64> + Sync + Send,
{
    if depth > MAX_REFINE_DEPTH {
        return Err(ScanError::InvalidDepth(depth));
    }
    let origin = estimate.location;
    let median = if estimate.prominence > 0.0 && estimate.prominence.is_finite() {
        Some(estimate.value / estimate.prominence)
    } else {
        None
    };
    let mut best = estimate.clone();
    let (mut h_re, mut h_im) = step;
    for level in 1..=depth {
        let center = best.location;
        let nodes: Vec<Complex64> = (0..25)
            .map(|t| {
                let (a, b) = ((t % 5) as f64 - 2.0, (t / 5) as f64 - 2.0);
                bounds.clamp(center + Complex64::new(a * h_re / 2.0, b * h_im / 2.0))
            })
            .collect();
        let values = map_indexed(nodes.len(), workers, |t| f(nodes[t]));
        let winner = values
            .iter()
            .enumerate()
            .filter_map(|(t, v)| v.map(|v| (t, v)))
            .fold(None, |acc: Option<(usize, f64)>, (t, v)| match acc {
                Some((_, bv)) if bv >= v => acc,
                _ => Some((t, v)),
            });
        if let Some((t, v)) = winner {
            best.location = nodes[t];
            best.value = v;
        }
        best.depth = estimate.depth + level;
        h_re /= 4.0;
        h_im /= 4.0;
    }
    if let Some(m) = median {
        best.prominence = best.value / m;
    }
    let d = best.location - origin;
    best.drift = estimate.drift || d.re.abs() > step.0 * (1.0 + 1e-12) || d.im.abs() > step.1 * (1.0 + 1e-12);
    Ok(best)
}

/// [`refine_with`] using the scanner's indicator and the spacing of `region`.
pub fn refine(
    estimate: &PoleEstimate,
    scanner: &Scanner,
    region: &ScanRegion,
    depth: usize,
    workers: usize,
) -> Result<PoleEstimate, ScanError> {
    refine_with(
        estimate,
        (region.re_step(), region.im_step()),
        region,
        depth,
        workers,
        |k| scanner.evaluate(k).ok().map(|v| v.value),
    )
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid oracle region: {0}")]
    InvalidRegion(&'static str),
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("contour passes within 1e-6 of a zero of order {0} after 3 retries")]
    ContourOnZero(usize),
    #[error("contour quadrature for order {0} did not settle on an integer")]
    Quadrature(usize),
    #[error("order {order}: argument principle counts {counted} zeros, Newton found {found}")]
    CountMismatch {
        order: usize,
        counted: usize,
        found: usize,
    },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

const ORACLE_NEAR: f64 = 1e-6;
const ORACLE_RETRIES: usize = 3;
const NEWTON_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

/// `f(k)`, `df/dk` and the scale that `|f|` is compared against.
fn oracle_fn(
    bc: BoundaryCondition,
    n: usize,
    radius: f64,
    k: Complex64,
) -> Result<(Complex64, Complex64, f64), SpecFunError> {
    let z = k * radius;
    let h = hankel(HankelKind::First, n as u32, z)?;
    Ok(match bc {
        BoundaryCondition::Dirichlet => (h.value, radius * h.derivative, h.derivative.norm()),
        BoundaryCondition::Neumann => {
            let nn = (n * n) as f64;
            let second = -h.derivative / z - (1.0 - nn / (z * z)) * h.value;
            (h.derivative, radius * second, second.norm())
        }
    })
}

fn contour_nodes(r: &ScanRegion, m: usize) -> Vec<(Complex64, Complex64)> {
    // (point, trapezoid weight times dk), counterclockwise
    let corners = [
        Complex64::new(r.re_min, r.im_min),
        Complex64::new(r.re_max, r.im_min),
        Complex64::new(r.re_max, r.im_max),
        Complex64::new(r.re_min, r.im_max),
    ];
    let mut out = Vec::with_capacity(4 * m);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let h = (b - a) / m as f64;
        for j in 0..m {
            // the corner weight h/2 from this edge plus h_prev/2 from the previous
            let w = if j == 0 {
                let (pa, pb) = (corners[(e + 3) % 4], a);
                0.5 * h + 0.5 * (pb - pa) / m as f64
            } else {
                h
            };
            out.push((a + h * j as f64, w));
        }
    }
    out
}

/// `(1/2πi) ∮ k^p f'/f dk` for `p = 0, 1`, plus the distance from the
/// contour to the nearest zero predicted by a Newton step from a node.
fn contour_moments(
    bc: BoundaryCondition,
    n: usize,
    radius: f64,
    region: &ScanRegion,
    m: usize,
) -> Result<(Complex64, Complex64, f64), SpecFunError> {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let (mut s0, mut s1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut nearest = f64::INFINITY;
    for (k, w) in contour_nodes(region, m) {
        let (f, df, _) = oracle_fn(bc, n, radius, k)?;
        let g = df / f;
        let step = f / df;
        if step.norm() < 4.0 * w.norm() {
            nearest = nearest.min(region.edge_distance(k - step));
        }
        s0 += g * w;
        s1 += k * g * w;
    }
    Ok((s0 / two_pi_i, s1 / two_pi_i, nearest))
}

enum Count {
    Zeros(usize, Complex64),
    OnZero,
}

fn count_zeros(
    bc: BoundaryCondition,
    n: usize,
    radius: f64,
    region: &ScanRegion,
) -> Result<Count, OracleError> {
    let mut prev: Option<Complex64> = None;
    let mut m = 64;
    while m <= 1 << 14 {
        let (c, s1, nearest) = contour_moments(bc, n, radius, region, m)?;
        if nearest < ORACLE_NEAR {
            return Ok(Count::OnZero);
        }
        if let Some(p) = prev {
            let rounded = c.re.round();
            // corners limit the trapezoid rule to O(h^2); an integer is all we need
            if rounded == p.re.round() && (c - rounded).norm() < 1e-3 && rounded >= 0.0 {
                let centroid = if rounded > 0.0 { s1 / rounded } else { region.center() };
                return Ok(Count::Zeros(rounded as usize, centroid));
            }
        }
        prev = Some(c);
        m *= 2;
    }
    Err(OracleError::Quadrature(n))
}

fn newton(
    bc: BoundaryCondition,
    n: usize,
    radius: f64,
    start: Complex64,
) -> Option<(Complex64, f64)> {
    let mut k = start;
    for _ in 0..NEWTON_ITERS {
        let (f, df, scale) = oracle_fn(bc, n, radius, k).ok()?;
        if f.norm() <= NEWTON_TOL * scale.max(1.0) {
            return Some((k, f.norm()));
        }
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() || k.im - step.im >= 0.0 {
            return None;
        }
        k -= step;
    }
    let (f, _, scale) = oracle_fn(bc, n, radius, k).ok()?;
    (f.norm() <= NEWTON_TOL * scale.max(1.0)).then_some((k, f.norm()))
}

/// Zeros of `k -> H_n^(1)(kR)` (Dirichlet) or its `k`-derivative (Neumann)
/// inside `region` for `n <= n_max`, certified by the argument principle and
/// polished by Newton's method. Sorted by order, then real part.
pub fn disk_pole_oracle(
    bc: BoundaryCondition,
    radius: f64,
    region: &ScanRegion,
    n_max: usize,
) -> Result<Vec<PoleEstimate>, OracleError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(OracleError::InvalidRadius(radius));
    }
    region
        .validate()
        .map_err(|_| OracleError::InvalidRegion("not a valid lower half plane rectangle"))?;
    if region.im_max >= 0.0 {
        return Err(OracleError::InvalidRegion("imaginary parts must be negative"));
    }
    let mut out = Vec::new();
    for n in 0..=n_max.min(crate::specfun::MAX_ORDER as usize) {
        let mut attempt = 0;
        let (contour, count, centroid) = loop {
            let nudged = region.expanded(1e-5 * attempt as f64);
            if nudged.im_max >= 0.0 {
                return Err(OracleError::InvalidRegion("nudged contour reaches the real axis"));
            }
            match count_zeros(bc, n, radius, &nudged)? {
                Count::Zeros(c, centroid) => break (nudged, c, centroid),
                Count::OnZero if attempt < ORACLE_RETRIES => attempt += 1,
                Count::OnZero => return Err(OracleError::ContourOnZero(n)),
            }
        };
        if count == 0 {
            continue;
        }
        let mut zeros: Vec<(Complex64, f64)> = Vec::new();
        let grid = 7;
        let starts = std::iter::once(centroid).chain((0..grid * grid).map(|t| {
            let fx = ((t % grid) as f64 + 0.5) / grid as f64;
            let fy = ((t / grid) as f64 + 0.5) / grid as f64;
            Complex64::new(
                contour.re_min + fx * (contour.re_max - contour.re_min),
                contour.im_min + fy * (contour.im_max - contour.im_min),
            )
        }));
        for s in starts {
            if zeros.len() == count {
                break;
            }
            if let Some((k, res)) = newton(bc, n, radius, s) {
                if contour.contains(k) && zeros.iter().all(|(q, _)| (q - k).norm() > 1e-8) {
                    zeros.push((k, res));
                }
            }
        }
        if zeros.len() != count {
            return Err(OracleError::CountMismatch {
                order: n,
                counted: count,
                found: zeros.len(),
            });
        }
        zeros.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        out.extend(zeros.into_iter().map(|(k, res)| PoleEstimate {
            location: k,
            value: res,
            prominence: 0.0,
            depth: 0,
            method: EstimateMethod::Oracle,
            order: Some(n),
            on_boundary: !region.contains(k),
            drift: false,
        }));
    }
    Ok(out)
}
