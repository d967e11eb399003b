//! Closed boundary curves (obstacle and probe), uniform sampling and
//! trapezoidal weights.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n)
    }

    /// Rotation by `+90°` `quarter_turns` times, exact for the axis swaps.
    fn rotate_quarters(self, quarter_turns: usize) -> Self {
        match quarter_turns % 4 {
            0 => self,
            1 => Self::new(-self.y, self.x),
            2 => Self::new(-self.x, -self.y),
            _ => Self::new(self.y, -self.x),
        }
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("corner radius {0} outside (0, 1/2)")]
    CornerRadius(f64),
    #[error("need at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("offset curve self-intersects")]
    SelfIntersecting,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// The square `(-1/2, 1/2)^2` with corners replaced by quarter circles.
    RoundedSquare { corner_radius: f64 },
    /// Normal displacement of a base curve.
    Offset { base: Box<BoundaryCurve>, distance: f64 },
}

/// A closed, counterclockwise, C^1 curve parameterized over `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    shape: CurveShape,
    center: Vec2,
}

/// Point, unit tangent direction, speed `|dp/dt|` and signed curvature.
#[derive(Debug, Clone, Copy)]
struct Frame {
    point: Vec2,
    unit_tangent: Vec2,
    speed: f64,
    curvature: f64,
}

fn positive(what: &'static str, value: f64) -> Result<f64, GeometryError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(GeometryError::NonPositive { what, value })
    }
}

pub fn make_circle(center: Vec2, radius: f64) -> Result<BoundaryCurve, GeometryError> {
    positive("radius", radius)?;
    Ok(BoundaryCurve {
        shape: CurveShape::Circle { radius },
        center,
    })
}

pub fn make_ellipse(a: f64, b: f64) -> Result<BoundaryCurve, GeometryError> {
    positive("semi-axis a", a)?;
    positive("semi-axis b", b)?;
    Ok(BoundaryCurve {
        shape: CurveShape::Ellipse { a, b },
        center: Vec2::ZERO,
    })
}

pub fn make_rounded_square(corner_radius: f64) -> Result<BoundaryCurve, GeometryError> {
    if !(corner_radius > 0.0 && corner_radius < 0.5) {
        return Err(GeometryError::CornerRadius(corner_radius));
    }
    Ok(BoundaryCurve {
        shape: CurveShape::RoundedSquare { corner_radius },
        center: Vec2::ZERO,
    })
}

/// Curve displaced by `distance` along `base`'s outward normal.
pub fn make_offset(base: &BoundaryCurve, distance: f64) -> BoundaryCurve {
    BoundaryCurve {
        shape: CurveShape::Offset {
            base: Box::new(base.clone()),
            distance,
        },
        center: Vec2::ZERO,
    }
}

impl BoundaryCurve {
    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    pub fn center(&self) -> Vec2 {
        match &self.shape {
            CurveShape::Offset { base, .. } => base.center(),
            _ => self.center,
        }
    }

    pub fn with_center(mut self, center: Vec2) -> Self {
        match &mut self.shape {
            CurveShape::Offset { base, .. } => **base = base.as_ref().clone().with_center(center),
            _ => self.center = center,
        }
        self
    }

    /// `Some(radius)` for a circle.
    pub fn circle_radius(&self) -> Option<f64> {
        match self.shape {
            CurveShape::Circle { radius } => Some(radius),
            _ => None,
        }
    }

    fn frame(&self, t: f64) -> Frame {
        match &self.shape {
            CurveShape::Circle { radius } => {
                let (s, c) = t.sin_cos();
                Frame {
                    point: self.center + Vec2::new(radius * c, radius * s),
                    unit_tangent: Vec2::new(-s, c),
                    speed: *radius,
                    curvature: 1.0 / radius,
                }
            }
            CurveShape::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                let d = Vec2::new(-a * s, b * c);
                let speed = d.norm();
                Frame {
                    point: self.center + Vec2::new(a * c, b * s),
                    unit_tangent: d * (1.0 / speed),
                    speed,
                    curvature: a * b / speed.powi(3),
                }
            }
            CurveShape::RoundedSquare { corner_radius } => {
                let r = *corner_radius;
                let half = 0.5 - r;
                let arc = FRAC_PI_2 * r;
                let quadrant = 2.0 * half + arc;
                let total = 4.0 * quadrant;
                let s = t.rem_euclid(TAU) / TAU * total;
                let q = ((s / quadrant) as usize).min(3);
                let sigma = s - q as f64 * quadrant;
                let (p, tan, kappa) = if sigma < half {
                    (Vec2::new(0.5, sigma), Vec2::new(0.0, 1.0), 0.0)
                } else if sigma < half + arc {
                    let th = (sigma - half) / r;
                    let (sn, cs) = th.sin_cos();
                    (
                        Vec2::new(half + r * cs, half + r * sn),
                        Vec2::new(-sn, cs),
                        1.0 / r,
                    )
                } else {
                    let along = sigma - half - arc;
                    (Vec2::new(half - along, 0.5), Vec2::new(-1.0, 0.0), 0.0)
                };
                Frame {
                    point: self.center + p.rotate_quarters(q),
                    unit_tangent: tan.rotate_quarters(q),
                    speed: total / TAU,
                    curvature: kappa,
                }
            }
            CurveShape::Offset { base, distance } => {
                let f = base.frame(t);
                let normal = Vec2::new(f.unit_tangent.y, -f.unit_tangent.x);
                let stretch = 1.0 + distance * f.curvature;
                Frame {
                    point: f.point + normal * *distance,
                    unit_tangent: f.unit_tangent,
                    speed: f.speed * stretch.abs(),
                    curvature: f.curvature / stretch,
                }
            }
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.frame(t).point
    }

    pub fn unit_tangent(&self, t: f64) -> Vec2 {
        self.frame(t).unit_tangent
    }

    /// Unit outward normal.
    pub fn normal(&self, t: f64) -> Vec2 {
        let tan = self.frame(t).unit_tangent;
        Vec2::new(tan.y, -tan.x)
    }

    /// `|dp/dt|`.
    pub fn speed(&self, t: f64) -> f64 {
        self.frame(t).speed
    }

    pub fn curvature(&self, t: f64) -> f64 {
        self.frame(t).curvature
    }

    pub fn perimeter(&self) -> f64 {
        match &self.shape {
            CurveShape::Circle { radius } => TAU * radius,
            CurveShape::Ellipse { .. } => {
                // periodic trapezoid, spectrally accurate for the analytic speed
                let n = 4096;
                (0..n).map(|i| self.speed(TAU * i as f64 / n as f64)).sum::<f64>() * TAU / n as f64
            }
            CurveShape::RoundedSquare { corner_radius } => {
                4.0 * (1.0 - 2.0 * corner_radius) + TAU * corner_radius
            }
            CurveShape::Offset { base, distance } => base.perimeter() + TAU * distance,
        }
    }

    /// Largest distance between two points of the curve.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            CurveShape::Circle { radius } => 2.0 * radius,
            CurveShape::Ellipse { a, b } => 2.0 * a.max(*b),
            CurveShape::RoundedSquare { corner_radius } => {
                2.0 * (std::f64::consts::SQRT_2 * (0.5 - corner_radius) + corner_radius)
            }
            CurveShape::Offset { base, distance } => base.diameter() + 2.0 * distance,
        }
    }

    /// Strict interior test.
    pub fn contains(&self, p: Vec2) -> bool {
        let q = p - self.center();
        match &self.shape {
            CurveShape::Circle { radius } => q.norm() < *radius,
            CurveShape::Ellipse { a, b } => (q.x / a).powi(2) + (q.y / b).powi(2) < 1.0,
            CurveShape::RoundedSquare { corner_radius } => {
                let r = *corner_radius;
                let (ax, ay) = (q.x.abs(), q.y.abs());
                if ax >= 0.5 || ay >= 0.5 {
                    return false;
                }
                let inner = 0.5 - r;
                if ax > inner && ay > inner {
                    (Vec2::new(ax - inner, ay - inner)).norm() < r
                } else {
                    true
                }
            }
            CurveShape::Offset { .. } => winding_contains(self, p),
        }
    }

    /// `N` points at equispaced parameters with trapezoidal weights
    /// `|speed(t_i)| 2pi/N`.
    pub fn sample_uniform(&self, n: usize) -> Result<CurveSampling, GeometryError> {
        if n < 4 {
            return Err(GeometryError::TooFewSamples(n));
        }
        let h = TAU / n as f64;
        let mut s = CurveSampling {
            params: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
        };
        for i in 0..n {
            let t = h * i as f64;
            let f = self.frame(t);
            s.params.push(t);
            s.points.push(f.point);
            s.normals.push(Vec2::new(f.unit_tangent.y, -f.unit_tangent.x));
            s.weights.push(f.speed * h);
        }
        Ok(s)
    }

    /// Samples at the midpoints between the `n` uniform parameters.
    pub fn sample_staggered(&self, n: usize) -> Result<CurveSampling, GeometryError> {
        let mut s = self.sample_uniform(n)?;
        let h = TAU / n as f64;
        for i in 0..n {
            let t = h * (i as f64 + 0.5);
            let f = self.frame(t);
            s.params[i] = t;
            s.points[i] = f.point;
            s.normals[i] = Vec2::new(f.unit_tangent.y, -f.unit_tangent.x);
            s.weights[i] = f.speed * h;
        }
        Ok(s)
    }
}

fn winding_contains(curve: &BoundaryCurve, p: Vec2) -> bool {
    let n = 1024;
    let mut winding = 0.0;
    let mut prev = curve.point(0.0) - p;
    for i in 1..=n {
        let cur = curve.point(TAU * i as f64 / n as f64) - p;
        winding += prev.cross(cur).atan2(prev.dot(cur));
        prev = cur;
    }
    winding.abs() > PI
}

/// Uniform samples of a curve with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSampling {
    pub params: Vec<f64>,
    pub points: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl CurveSampling {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Shoelace area of the sample polygon; positive for counterclockwise.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].cross(self.points[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    pub fn max_spacing(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| (self.points[(i + 1) % n] - self.points[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest distance from `p` to any sample point.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.points
            .iter()
            .map(|q| (*q - p).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0
}

/// Segment-intersection scan over a closed polyline.
pub fn polyline_self_intersects(points: &[Vec2]) -> bool {
    let n = points.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (points[j], points[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return true;
            }
        }
    }
    false
}
