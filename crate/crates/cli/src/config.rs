//! Run configuration: a flat `key = value` file with `#` comments.
//!
//! Keys (defaults in brackets):
//!
//! ```text
//! obstacle       = disk | ellipse | rounded_square
//! radius         = R                 disk radius [1]
//! center         = x,y               disk center [0,0]
//! semi_axes      = a,b               ellipse semi-axes
//! corner_radius  = r                 rounded square, 0 < r < 1/2
//! bc             = dirichlet | neumann
//! probe_radius   = r                 probe circle radius
//! probe_points   = N                 [40]
//! probe_center   = x,y               [0,0]
//! z              = x,y               right-hand-side source, outside the obstacle
//! region         = re_min,re_max,im_min,im_max
//! grid           = n_re,n_im
//! indicator      = norm | cond       [norm]
//! delta          = d                 alpha = d * sigma_max^2 at the region center [1e-10]
//! alpha          = a                 fixed alpha, excludes `delta`
//! backend        = analytic | mfs    [analytic]
//! mfs_sources    = M                 [96]
//! mfs_offset     = d                 [quarter of the obstacle diameter]
//! mfs_oversample = f                 [2]
//! mfs_rel_cut    = c                 [1e-12]
//! threshold      = t                 spike prominence threshold [5]
//! refine_depth   = n                 [3]
//! output         = DIR               [out]
//! workers        = n                 0 means all cores [0]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use polescan_core::geometry::{make_circle, make_ellipse, make_rounded_square, BoundaryCurve, CurveSampling, GeometryError, Vec2};
use polescan_core::interior::{Backend, BoundaryCondition, MfsParams};
use polescan_core::polescan::{AlphaPolicy, IndicatorKind, ScanRegion, DEFAULT_THRESHOLD, MAX_REFINE_DEPTH};

#[derive(Debug, Clone, PartialEq)]
pub enum ObstacleSpec {
    Disk { radius: f64, center: Vec2 },
    Ellipse { a: f64, b: f64 },
    RoundedSquare { corner_radius: f64 },
}

impl ObstacleSpec {
    pub fn curve(&self) -> Result<BoundaryCurve, GeometryError> {
        match *self {
            ObstacleSpec::Disk { radius, center } => make_circle(center, radius),
            ObstacleSpec::Ellipse { a, b } => make_ellipse(a, b),
            ObstacleSpec::RoundedSquare { corner_radius } => make_rounded_square(corner_radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub radius: f64,
    pub points: usize,
    pub center: Vec2,
}

impl ProbeSpec {
    pub fn sampling(&self) -> Result<CurveSampling, GeometryError> {
        make_circle(self.center, self.radius)?.sample_uniform(self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub obstacle: ObstacleSpec,
    pub bc: BoundaryCondition,
    pub probe: ProbeSpec,
    pub z: Vec2,
    pub region: ScanRegion,
    pub indicator: IndicatorKind,
    pub alpha: AlphaPolicy,
    pub backend: Backend,
    pub threshold: f64,
    pub refine_depth: usize,
    pub output: PathBuf,
    /// `None` means available parallelism.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}`: {message}")]
    Value { key: &'static str, message: String },
    #[error("`alpha` and `delta` are mutually exclusive")]
    AlphaAndDelta,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{0}")]
    Invalid(String),
}

const KEYS: &[&str] = &[
    "obstacle",
    "radius",
    "center",
    "semi_axes",
    "corner_radius",
    "bc",
    "probe_radius",
    "probe_points",
    "probe_center",
    "z",
    "region",
    "grid",
    "indicator",
    "delta",
    "alpha",
    "backend",
    "mfs_sources",
    "mfs_offset",
    "mfs_oversample",
    "mfs_rel_cut",
    "threshold",
    "refine_depth",
    "output",
    "workers",
];

struct Table(BTreeMap<String, String>);

impl Table {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: idx + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line: idx + 1 });
            }
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey(key.to_string()));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Duplicate {
                    line: idx + 1,
                    key: key.to_string(),
                });
            }
        }
        Ok(Table(map))
    }

    fn raw(&self, key: &'static str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn required(&self, key: &'static str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or(ConfigError::Missing(key))
    }

    fn get<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::Value {
                    key,
                    message: format!("cannot parse `{v}`"),
                })
            })
            .transpose()
    }

    fn floats(&self, key: &'static str, n: usize) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let parsed: Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match parsed {
            Ok(xs) if xs.len() == n => Ok(Some(xs)),
            _ => Err(ConfigError::Value {
                key,
                message: format!("expected {n} comma-separated numbers, got `{v}`"),
            }),
        }
    }

    fn point(&self, key: &'static str) -> Result<Option<Vec2>, ConfigError> {
        Ok(self.floats(key, 2)?.map(|v| Vec2::new(v[0], v[1])))
    }
}

fn positive(key: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::Value {
            key,
            message: format!("must be positive and finite, got {v}"),
        })
    }
}

pub fn parse_bc(s: &str) -> Option<BoundaryCondition> {
    match s {
        "dirichlet" => Some(BoundaryCondition::Dirichlet),
        "neumann" => Some(BoundaryCondition::Neumann),
        _ => None,
    }
}

fn bc_name(bc: BoundaryCondition) -> &'static str {
    match bc {
        BoundaryCondition::Dirichlet => "dirichlet",
        BoundaryCondition::Neumann => "neumann",
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let t = Table::parse(text)?;
        let obstacle = match t.required("obstacle")? {
            "disk" => ObstacleSpec::Disk {
                radius: positive("radius", t.get("radius")?.unwrap_or(1.0))?,
                center: t.point("center")?.unwrap_or(Vec2::ZERO),
            },
            "ellipse" => {
                let v = t.floats("semi_axes", 2)?.ok_or(ConfigError::Missing("semi_axes"))?;
                ObstacleSpec::Ellipse {
                    a: positive("semi_axes", v[0])?,
                    b: positive("semi_axes", v[1])?,
                }
            }
            "rounded_square" => ObstacleSpec::RoundedSquare {
                corner_radius: t.get("corner_radius")?.ok_or(ConfigError::Missing("corner_radius"))?,
            },
            other => {
                return Err(ConfigError::Value {
                    key: "obstacle",
                    message: format!("unknown obstacle `{other}`"),
                })
            }
        };
        let bc_raw = t.required("bc")?;
        let bc = parse_bc(bc_raw).ok_or_else(|| ConfigError::Value {
            key: "bc",
            message: format!("expected dirichlet or neumann, got `{bc_raw}`"),
        })?;
        let probe = ProbeSpec {
            radius: positive("probe_radius", t.get("probe_radius")?.ok_or(ConfigError::Missing("probe_radius"))?)?,
            points: t.get("probe_points")?.unwrap_or(40),
            center: t.point("probe_center")?.unwrap_or(Vec2::ZERO),
        };
        let z = t.point("z")?.ok_or(ConfigError::Missing("z"))?;
        let r = t.floats("region", 4)?.ok_or(ConfigError::Missing("region"))?;
        let grid_raw = t.required("grid")?;
        let grid: Vec<usize> = grid_raw
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()
            .ok()
            .filter(|g: &Vec<usize>| g.len() == 2)
            .ok_or_else(|| ConfigError::Value {
                key: "grid",
                message: format!("expected `n_re,n_im`, got `{grid_raw}`"),
            })?;
        let region = ScanRegion::new((r[0], r[1]), (r[2], r[3]), grid[0], grid[1])
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let indicator = match t.raw("indicator") {
            None => IndicatorKind::Norm,
            Some(s) => s.parse().map_err(|message| ConfigError::Value { key: "indicator", message })?,
        };
        let alpha = match (t.get::<f64>("alpha")?, t.get::<f64>("delta")?) {
            (Some(_), Some(_)) => return Err(ConfigError::AlphaAndDelta),
            (Some(a), None) => AlphaPolicy::Fixed(positive("alpha", a)?),
            (None, Some(d)) => AlphaPolicy::Relative(positive("delta", d)?),
            (None, None) => AlphaPolicy::default(),
        };
        let backend = match t.raw("backend").unwrap_or("analytic") {
            "analytic" => Backend::Analytic,
            "mfs" => {
                let d = MfsParams::default();
                Backend::Mfs(MfsParams {
                    sources: t.get("mfs_sources")?.unwrap_or(d.sources),
                    offset: t.get("mfs_offset")?.or(d.offset),
                    oversample: t.get("mfs_oversample")?.unwrap_or(d.oversample),
                    rel_cut: t.get("mfs_rel_cut")?.unwrap_or(d.rel_cut),
                })
            }
            other => {
                return Err(ConfigError::Value {
                    key: "backend",
                    message: format!("expected analytic or mfs, got `{other}`"),
                })
            }
        };
        if backend == Backend::Analytic {
            if let Some(k) = ["mfs_sources", "mfs_offset", "mfs_oversample", "mfs_rel_cut"]
                .into_iter()
                .find(|k| t.raw(k).is_some())
            {
                return Err(ConfigError::Invalid(format!("`{k}` needs `backend = mfs`")));
            }
        }
        let threshold = positive("threshold", t.get("threshold")?.unwrap_or(DEFAULT_THRESHOLD))?;
        let refine_depth = t.get("refine_depth")?.unwrap_or(3);
        if refine_depth > MAX_REFINE_DEPTH {
            return Err(ConfigError::Value {
                key: "refine_depth",
                message: format!("at most {MAX_REFINE_DEPTH}"),
            });
        }
        let workers = match t.get::<usize>("workers")? {
            None | Some(0) => None,
            Some(n) => Some(n),
        };
        let cfg = RunConfig {
            obstacle,
            bc,
            probe,
            z,
            region,
            indicator,
            alpha,
            backend,
            threshold,
            refine_depth,
            output: PathBuf::from(t.raw("output").unwrap_or("out")),
            workers,
        };
        cfg.check_geometry()?;
        Ok(cfg)
    }

    pub fn from_preset(name: &str) -> Result<Self, ConfigError> {
        let text = crate::presets::text(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?;
        Self::parse(text)
    }

    /// Probe curve strictly inside and `z` strictly outside the obstacle.
    fn check_geometry(&self) -> Result<(), ConfigError> {
        let curve = self.obstacle.curve().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let probe = self.probe.sampling().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let dense = make_circle(self.probe.center, self.probe.radius)
            .and_then(|c| c.sample_uniform(16 * self.probe.points.max(16)))
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(p) = probe.points.iter().chain(&dense.points).find(|&&p| !curve.contains(p)) {
            return Err(ConfigError::Invalid(format!(
                "probe curve leaves the obstacle near ({:.4}, {:.4})",
                p.x, p.y
            )));
        }
        if curve.contains(self.z) || curve.sample_uniform(1024).map(|s| s.distance_to(self.z)).unwrap_or(0.0) < 1e-9 {
            return Err(ConfigError::Invalid(format!(
                "z = ({}, {}) is not strictly outside the obstacle",
                self.z.x, self.z.y
            )));
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or_else(polescan_core::exec::default_workers)
    }

    /// Normalized `key = value` listing of everything that affects results.
    /// Output directory and worker count are left out.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.obstacle {
            ObstacleSpec::Disk { radius, center } => {
                put("obstacle", "disk".into());
                put("radius", format!("{radius:e}"));
                put("center", format!("{:e},{:e}", center.x, center.y));
            }
            ObstacleSpec::Ellipse { a, b } => {
                put("obstacle", "ellipse".into());
                put("semi_axes", format!("{a:e},{b:e}"));
            }
            ObstacleSpec::RoundedSquare { corner_radius } => {
                put("obstacle", "rounded_square".into());
                put("corner_radius", format!("{corner_radius:e}"));
            }
        }
        put("bc", bc_name(self.bc).into());
        put("probe_radius", format!("{:e}", self.probe.radius));
        put("probe_points", self.probe.points.to_string());
        put("probe_center", format!("{:e},{:e}", self.probe.center.x, self.probe.center.y));
        put("z", format!("{:e},{:e}", self.z.x, self.z.y));
        let r = &self.region;
        put("region", format!("{:e},{:e},{:e},{:e}", r.re_min, r.re_max, r.im_min, r.im_max));
        put("grid", format!("{},{}", r.n_re, r.n_im));
        put("indicator", self.indicator.to_string());
        match self.alpha {
            AlphaPolicy::Fixed(a) => put("alpha", format!("{a:e}")),
            AlphaPolicy::Relative(d) => put("delta", format!("{d:e}")),
        }
        match self.backend {
            Backend::Analytic => put("backend", "analytic".into()),
            Backend::Mfs(p) => {
                put("backend", "mfs".into());
                put("mfs_sources", p.sources.to_string());
                if let Some(o) = p.offset {
                    put("mfs_offset", format!("{o:e}"));
                }
                put("mfs_oversample", format!("{:e}", p.oversample));
                put("mfs_rel_cut", format!("{:e}", p.rel_cut));
            }
        }
        put("threshold", format!("{:e}", self.threshold));
        put("refine_depth", self.refine_depth.to_string());
        s
    }

    /// SHA-256 of [`RunConfig::canonical`], hex.
    pub fn hash(&self) -> String {
        crate::sha256_hex(&self.canonical())
    }
}
