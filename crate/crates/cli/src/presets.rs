//! Built-in run configurations for the standard disk, ellipse and rounded
//! square setups.

const DISK_D: &str = "\
obstacle = disk
radius = 1
bc = dirichlet
probe_radius = 0.7
probe_points = 40
z = 1,1
backend = analytic
delta = 1e-26
";

const ELLIPSE_D: &str = "\
obstacle = ellipse
semi_axes = 1.3,0.7
bc = dirichlet
probe_radius = 0.5
probe_points = 40
z = 1.4,1.0
backend = mfs
mfs_sources = 96
mfs_offset = 0.2
delta = 1e-26
";

const DISK_N: &str = "\
obstacle = disk
radius = 1
bc = neumann
probe_radius = 0.7
probe_points = 40
z = 0,1.5
backend = analytic
delta = 1e-26
";

const ELLIPSE_N: &str = "\
obstacle = ellipse
semi_axes = 1.3,0.7
bc = neumann
probe_radius = 0.5
probe_points = 40
backend = mfs
mfs_sources = 128
mfs_offset = 0.2
delta = 1e-26
";

const SQUARE: &str = "\
obstacle = rounded_square
corner_radius = 0.2
bc = dirichlet
probe_radius = 0.3
probe_points = 40
z = 1.0,0.4
backend = mfs
mfs_sources = 96
mfs_offset = 0.2
delta = 1e-26
region = 0.68,0.76,-2.20,-2.10
grid = 41,41
";

pub const NAMES: &[&str] = &[
    "example1",
    "example1a",
    "example1b",
    "example2",
    "example2a",
    "example2a-smoke",
    "example2b",
    "example3",
    "example3a",
    "example3b",
    "example4",
    "example4a",
    "example4b",
    "square-family",
];

/// Config text of a preset; `exampleN` is an alias of `exampleNa`.
pub fn text(name: &str) -> Option<&'static str> {
    use std::sync::OnceLock;
    static CACHE: OnceLock<Vec<(&'static str, String)>> = OnceLock::new();
    let table = CACHE.get_or_init(|| {
        let with = |base: &str, rest: &str| format!("{base}{rest}");
        let e1a = with(DISK_D, "region = 0.42,0.44,-1.29,-1.27\ngrid = 41,41\n");
        let e2a = with(ELLIPSE_D, "region = 0.40,0.48,-1.33,-1.26\ngrid = 161,161\n");
        let e3a = with(DISK_N, "region = 0.49,0.51,-0.65,-0.63\ngrid = 41,41\n");
        let e4a = with(ELLIPSE_N, "z = 0,1.5\nregion = 0.53,0.55,-0.57,-0.55\ngrid = 41,41\n");
        vec![
            ("example1", e1a.clone()),
            ("example1a", e1a),
            ("example1b", with(DISK_D, "region = 1.30,1.32,-1.69,-1.67\ngrid = 41,41\n")),
            ("example2", e2a.clone()),
            ("example2a", e2a),
            ("example2a-smoke", with(ELLIPSE_D, "region = 0.40,0.48,-1.33,-1.26\ngrid = 81,81\n")),
            ("example2b", with(ELLIPSE_D, "region = 1.28,1.36,-1.71,-1.63\ngrid = 161,161\n")),
            ("example3", e3a.clone()),
            ("example3a", e3a),
            ("example3b", with(DISK_N, "region = 1.42,1.44,-0.85,-0.83\ngrid = 41,41\n")),
            ("example4", e4a.clone()),
            ("example4a", e4a),
            // off the symmetry axis so odd modes are excited
            ("example4b", with(ELLIPSE_N, "z = 0.6,1.4\nregion = 1.44,1.46,-0.80,-0.78\ngrid = 41,41\n")),
            ("square-family", SQUARE.to_string()),
        ]
    });
    table.iter().find(|(n, _)| *n == name).map(|(_, t)| t.as_str())
}
