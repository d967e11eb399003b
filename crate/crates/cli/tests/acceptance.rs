//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits with status 1 on any failure when `POLESCAN_ACCEPTANCE_STRICT` is
//! set; otherwise the summary line is informational. `POLESCAN_ACCEPTANCE_ONLY`
//! takes a comma-separated list of criterion numbers.

#[path = "../../core/tests/common/dd_oracle.rs"]
mod dd_oracle;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use polescan_cli::config::RunConfig;
use polescan_cli::scan::{compute, ScanOutcome};
use polescan_cli::validate::{
    self, backend_difference, disk_mfs_params, farfield_rates, interior_cloud, outgoing_purity,
    reciprocity_asymmetry, wronskian_errors,
};
use polescan_core::interior::{Backend, BoundaryCondition, InteriorProblem};
use polescan_core::polescan::{disk_pole_oracle, PoleEstimate};
use polescan_core::specfun::{bessel_j, bessel_y, hankel, HankelKind, Wavenumber};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fmt_k(k: Complex64) -> String {
    format!("{:.5}{:+.5}i", k.re, k.im)
}

fn preset(name: &str) -> RunConfig {
    RunConfig::from_preset(name).unwrap_or_else(|e| panic!("preset {name}: {e}"))
}

fn run(name: &str, workers: usize) -> Result<ScanOutcome, String> {
    compute(&preset(name), workers).map_err(|e| format!("{name}: {e}"))
}

fn nearest(poles: &[PoleEstimate], target: Complex64) -> Option<&PoleEstimate> {
    poles
        .iter()
        .min_by(|a, b| (a.location - target).norm().total_cmp(&(b.location - target).norm()))
}

/// Oracle zero nearest `target` inside the preset's scan window.
fn oracle_zero(cfg: &RunConfig, target: Complex64) -> Result<Complex64, String> {
    let zeros = disk_pole_oracle(cfg.bc, 1.0, &cfg.region, 12).map_err(|e| e.to_string())?;
    nearest(&zeros, target)
        .map(|z| z.location)
        .ok_or_else(|| "oracle found no zero in the window".to_string())
}

/// Single spike in a disk window, refined and compared with the oracle.
fn disk_window(name: &str, target: Complex64, tol: f64, max_time: Option<Duration>) -> Result<Verdict, String> {
    let cfg = preset(name);
    let zero = oracle_zero(&cfg, target)?;
    let t = Instant::now();
    let out = run(name, 1)?;
    let elapsed = t.elapsed();
    if out.poles.len() != 1 {
        return Ok(verdict(false, format!("{name}: {} spikes, expected 1", out.poles.len())));
    }
    let d = (out.poles[0].location - zero).norm();
    let in_time = max_time.is_none_or(|m| elapsed <= m);
    Ok(verdict(
        d <= tol && in_time,
        format!(
            "{name}: spike {} oracle {} |d|={d:.1e} (tol {tol:e}), {:.1}s single-threaded",
            fmt_k(out.poles[0].location),
            fmt_k(zero),
            elapsed.as_secs_f64()
        ),
    ))
}

fn criterion_1() -> Result<Verdict, String> {
    disk_window("example1a", c(0.4295, -1.2814), 5e-3, Some(Duration::from_secs(120)))
}

fn criterion_2() -> Result<Verdict, String> {
    disk_window("example1b", c(1.3080, -1.6818), 5e-3, None)
}

fn criterion_3() -> Result<Verdict, String> {
    let a = disk_window("example3a", c(0.5018, -0.6442), 5e-3, None)?;
    let b = disk_window("example3b", c(1.4344, -0.8345), 5e-3, None)?;
    let zero = oracle_zero(&preset("example3a"), c(0.5018, -0.6442))?;
    Ok(verdict(
        a.passed && b.passed,
        format!(
            "{}; {}; first sound-hard pole {:.12}{:+.12}i",
            a.detail, b.detail, zero.re, zero.im
        ),
    ))
}

fn criterion_4() -> Result<Verdict, String> {
    let refs = [c(0.4586, -1.2774), c(0.4315, -1.3062)];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, limit) in [("example2a-smoke", 300u64), ("example2a", 1800)] {
        let workers = polescan_core::exec::default_workers();
        let t = Instant::now();
        let out = run(name, workers)?;
        let secs = t.elapsed().as_secs_f64();
        let mut matched = out.poles.len() == 2;
        let mut dists = Vec::new();
        for r in refs {
            let d = nearest(&out.poles, r).map_or(f64::INFINITY, |p| (p.location - r).norm());
            matched &= d <= 0.03;
            dists.push(format!("{d:.4}"));
        }
        // both references must pick distinct spikes
        if let [p, q] = out.poles.as_slice() {
            let a = (p.location - refs[0]).norm() + (q.location - refs[1]).norm();
            let b = (p.location - refs[1]).norm() + (q.location - refs[0]).norm();
            matched &= a.min(b) <= 0.06;
        }
        let in_time = secs <= limit as f64;
        // the smoke grid only has a time budget
        if name == "example2a" {
            ok &= matched && in_time;
        } else {
            ok &= in_time;
        }
        parts.push(format!(
            "{name}: {} spikes [{}] |d| to refs [{}], {:.0}s on {workers} worker(s) (limit {limit}s)",
            out.poles.len(),
            out.poles.iter().map(|p| fmt_k(p.location)).collect::<Vec<_>>().join(" "),
            dists.join(" "),
            secs
        ));
    }
    Ok(verdict(ok, parts.join("; ")))
}

/// Most prominent spike of a preset within `tol` of `target`.
fn top_spike(name: &str, target: Complex64, tol: f64) -> Result<Verdict, String> {
    let out = run(name, polescan_core::exec::default_workers())?;
    let Some(top) = out.poles.first() else {
        return Ok(verdict(false, format!("{name}: no spike")));
    };
    let d = (top.location - target).norm();
    Ok(verdict(
        d <= tol,
        format!(
            "{name}: {} spike(s), top {} prominence {:.1}, |d| to {} = {d:.4} (tol {tol})",
            out.poles.len(),
            fmt_k(top.location),
            top.prominence,
            fmt_k(target)
        ),
    ))
}

fn criterion_5() -> Result<Verdict, String> {
    let a = top_spike("example4a", c(0.5388, -0.5623), 0.02)?;
    let b = top_spike("example4b", c(1.4436, -0.7840), 0.02)?;
    Ok(verdict(a.passed && b.passed, format!("{}; {}", a.detail, b.detail)))
}

fn criterion_6() -> Result<Verdict, String> {
    top_spike("square-family", c(0.7210, -2.1537), 0.05)
}

fn random_z(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.random_range(0.1..20.0);
    let theta = rng.random_range(-PI * 0.999..PI * 0.999);
    Complex64::from_polar(r, theta)
}

fn criterion_7() -> Result<Verdict, String> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut samples = Vec::with_capacity(500);
    for _ in 0..500 {
        let z = random_z(&mut rng);
        let n = rng.random_range(0..=30u32);
        samples.push((n, z));
        let nn = n as usize;
        let e = |x: polescan_core::specfun::SpecFunError| x.to_string();
        let pairs = [
            (bessel_j(n, z).map_err(e)?.value, dd_oracle::bessel_j(nn, z)),
            (bessel_y(n, z).map_err(e)?.value, dd_oracle::bessel_y(nn, z)),
            (hankel(HankelKind::First, n, z).map_err(e)?.value, dd_oracle::hankel1(nn, z)),
            (hankel(HankelKind::Second, n, z).map_err(e)?.value, dd_oracle::hankel2(nn, z)),
        ];
        for (got, want) in pairs {
            worst = worst.max((got - want).norm() / want.norm());
        }
    }
    let (scaled, bare) = wronskian_errors(&samples).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    Ok(verdict(
        worst <= 1e-10 && bare <= 1e-11 && secs <= 60.0,
        format!(
            "oracle worst rel {worst:.1e} (tol 1e-10); Wronskian worst rel {bare:.1e} against the exact value, \
             {scaled:.1e} against the cancelled products (tol 1e-11); {secs:.1}s"
        ),
    ))
}

fn random_k_in(rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Complex64 {
    let r = &cfg.region;
    c(rng.random_range(r.re_min..=r.re_max), rng.random_range(r.im_min..=r.im_max))
}

fn criterion_8() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sets = Vec::new();
    for (names, tol) in [
        (&["example1a", "example1b", "example3a", "example3b"][..], 1e-10),
        (&["example2a", "example4a", "example4b", "square-family"][..], 1e-5),
    ] {
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            let cfg = preset(names[i % names.len()]);
            let k = random_k_in(&mut rng, &cfg);
            worst = worst.max(reciprocity_asymmetry(&cfg, &[k]).map_err(|e| e.to_string())?);
        }
        sets.push((worst, tol));
    }
    Ok(verdict(
        sets.iter().all(|(w, t)| w <= t),
        format!(
            "analytic max asymmetry {:.1e} (tol 1e-10), mfs {:.1e} (tol 1e-5), 10 k each",
            sets[0].0, sets[1].0
        ),
    ))
}

fn criterion_9() -> Result<Verdict, String> {
    let cfg = preset("example1a");
    let obstacle = cfg.obstacle.curve().map_err(|e| e.to_string())?;
    let cloud = interior_cloud(polescan_core::geometry::Vec2::ZERO, 0.8, 100);
    let probe = cfg.probe.sampling().map_err(|e| e.to_string())?;
    let ys: Vec<_> = probe.points.iter().step_by(8).copied().collect();
    let mfs = Backend::Mfs(disk_mfs_params(1.0));
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for k in [c(0.43, -1.28), c(1.31, -1.68), c(0.50, -0.64)] {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let kk = Wavenumber::from_complex(k).map_err(|e| e.to_string())?;
            let problem = InteriorProblem::new(obstacle.clone(), bc, kk).map_err(|e| e.to_string())?;
            let d = backend_difference(&problem, &Backend::Analytic, &mfs, &ys, &cloud).map_err(|e| e.to_string())?;
            worst = worst.max(d);
            parts.push(format!("{}/{bc}: {d:.1e}", fmt_k(k)));
        }
    }
    Ok(verdict(worst <= 1e-7, format!("{} (tol 1e-7)", parts.join(", "))))
}

fn criterion_10() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let ks: Vec<Complex64> = (0..20)
        .map(|_| c(rng.random_range(0.3..2.0), rng.random_range(-1.5..0.5)))
        .collect();
    let (ratio, detected) = outgoing_purity(&ks, 20).map_err(|e| e.to_string())?;
    Ok(verdict(
        ratio <= 1e-8 && detected,
        format!("20 fields, max |beta|/|alpha| = {ratio:.1e} (tol 1e-8), injected H2 at 1e-3 detected: {detected}"),
    ))
}

fn criterion_11() -> Result<Verdict, String> {
    let rates = farfield_rates(&validate::RATE_WAVENUMBERS, 20.0).map_err(|e| e.to_string())?;
    let ok = rates.iter().all(|q| (0.35..=0.65).contains(q));
    Ok(verdict(
        ok,
        format!(
            "remainder ratio r=20 -> 40: {}",
            rates.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn criterion_12() -> Result<Verdict, String> {
    let cfg = preset("example1a");
    let max = polescan_core::exec::default_workers();
    let mut outputs = Vec::new();
    for workers in [1, 4, max] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        polescan_cli::scan::cmd_scan(&cfg, dir.path(), workers).map_err(|e| e.to_string())?;
        let files: Vec<Vec<u8>> = ["scan.csv", "scan.pgm", "poles.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        outputs.push(files);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok(verdict(
        same,
        format!("scan.csv, scan.pgm, poles.csv identical for workers 1, 4, {max}: {same}"),
    ))
}

fn main() {
    let criteria: [(usize, fn() -> Result<Verdict, String>); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let only: Option<Vec<usize>> = std::env::var("POLESCAN_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    let mut ran = 0;
    for (id, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let v = f().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {id:>2}: {} ({:.1}s) {}",
            if v.passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {}/{ran} passed", ran - failed);
    if failed > 0 && std::env::var_os("POLESCAN_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
