//! `polescan scan`: grid evaluation, spike detection and refinement, and the
//! four output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use polescan_core::interior::InteriorProblem;
use polescan_core::polescan::{detect_spikes, refine, PoleEstimate, ScanResult, ScanSpec, Scanner};
use polescan_core::specfun::Wavenumber;

use crate::config::RunConfig;
use crate::{artifact_header, CliError};

/// Scans with more failed nodes than this fraction exit with status 3.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub result: ScanResult,
    pub poles: Vec<PoleEstimate>,
    pub elapsed: Duration,
    pub workers: usize,
}

impl ScanOutcome {
    pub fn partial(&self) -> bool {
        self.result.failure_fraction() > MAX_FAILURE_FRACTION
    }
}

/// Validates the config against the solver (MFS geometry, `α`) and
/// returns a ready scanner.
pub fn build_scanner(cfg: &RunConfig) -> Result<Scanner, CliError> {
    let config = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
    let obstacle = cfg.obstacle.curve().map_err(|e| config(&e))?;
    let center = cfg.region.center();
    let k = Wavenumber::from_complex(center).map_err(|e| config(&e))?;
    let problem = InteriorProblem::new(obstacle, cfg.bc, k).map_err(|e| config(&e))?;
    let spec = ScanSpec {
        problem,
        backend: cfg.backend,
        probe: cfg.probe.sampling().map_err(|e| config(&e))?,
        z: cfg.z,
        indicator: cfg.indicator,
        alpha: cfg.alpha,
    };
    Scanner::new(spec, center).map_err(|e| config(&e))
}

/// Scans, refines each spike and returns without writing anything.
pub fn compute(cfg: &RunConfig, workers: usize) -> Result<ScanOutcome, CliError> {
    let start = Instant::now();
    let scanner = build_scanner(cfg)?;
    let result = scanner.scan(&cfg.region, workers);
    let mut poles = Vec::new();
    for spike in detect_spikes(&result, cfg.threshold) {
        let refined = refine(&spike, &scanner, &cfg.region, cfg.refine_depth, workers)
            .map_err(|e| CliError::Other(e.to_string()))?;
        poles.push(refined);
    }
    Ok(ScanOutcome {
        result,
        poles,
        elapsed: start.elapsed(),
        workers,
    })
}

pub fn write_poles<W: Write>(mut out: W, header: &str, poles: &[PoleEstimate]) -> std::io::Result<()> {
    writeln!(out, "# {header}")?;
    writeln!(out, "re,im,value,prominence,depth,on_boundary,drift")?;
    for p in poles {
        writeln!(
            out,
            "{},{},{:e},{},{},{},{}",
            p.location.re, p.location.im, p.value, p.prominence, p.depth, p.on_boundary, p.drift
        )?;
    }
    Ok(())
}

fn write_meta<W: Write>(mut out: W, header: &str, outcome: &ScanOutcome) -> std::io::Result<()> {
    let r = &outcome.result;
    writeln!(out, "# {header}")?;
    writeln!(out, "alpha={:e}", r.alpha)?;
    writeln!(out, "backend={}", r.backend)?;
    writeln!(out, "grid={}x{}", r.region.n_re, r.region.n_im)?;
    writeln!(out, "elapsed_ms={}", outcome.elapsed.as_millis())?;
    writeln!(out, "workers={}", outcome.workers)?;
    writeln!(out, "indicator={}", r.indicator)?;
    writeln!(out, "max_solver_residual={:e}", r.max_residual)?;
    writeln!(out, "failed_nodes={}", r.failures.len())?;
    writeln!(out, "spikes={}", outcome.poles.len())?;
    for f in r.failures.iter().take(20) {
        writeln!(out, "failure node={} {}", f.index, f.message)?;
    }
    Ok(())
}

/// Writes `scan.csv`, `scan.pgm`, `poles.csv` and `meta.txt` into `dir`.
pub fn write_artifacts(cfg: &RunConfig, outcome: &ScanOutcome, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let header = artifact_header(&cfg.hash());
    let open = |name: &str| -> std::io::Result<BufWriter<File>> { Ok(BufWriter::new(File::create(dir.join(name))?)) };
    let comments = [header.clone()];
    let mut csv = open("scan.csv")?;
    outcome.result.write_csv(&mut csv, &comments)?;
    csv.flush()?;
    let mut pgm = open("scan.pgm")?;
    outcome.result.write_pgm(&mut pgm, &comments)?;
    pgm.flush()?;
    let mut poles = open("poles.csv")?;
    write_poles(&mut poles, &header, &outcome.poles)?;
    poles.flush()?;
    let mut meta = open("meta.txt")?;
    write_meta(&mut meta, &header, outcome)?;
    meta.flush()?;
    Ok(())
}

/// The full `scan` command. Artifacts are written even when too many nodes
/// failed; the error then carries exit status 3.
pub fn cmd_scan(cfg: &RunConfig, dir: &Path, workers: usize) -> Result<ScanOutcome, CliError> {
    let outcome = compute(cfg, workers)?;
    write_artifacts(cfg, &outcome, dir)?;
    if outcome.partial() {
        return Err(CliError::PartialFailure {
            failed: outcome.result.failures.len(),
            total: outcome.result.values.len(),
        });
    }
    Ok(outcome)
}
