//! `polescan oracle`: exact disk poles in a rectangle.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use polescan_core::interior::BoundaryCondition;
use polescan_core::polescan::{disk_pole_oracle, PoleEstimate, ScanRegion};

use crate::{artifact_header, sha256_hex, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRequest {
    pub bc: BoundaryCondition,
    pub radius: f64,
    /// `re_min, re_max, im_min, im_max`.
    pub region: [f64; 4],
    pub n_max: usize,
}

impl OracleRequest {
    fn canonical(&self) -> String {
        let [a, b, c, d] = self.region;
        format!(
            "oracle bc={:?} radius={:e} region={a:e},{b:e},{c:e},{d:e} nmax={}",
            self.bc, self.radius, self.n_max
        )
    }
}

pub fn parse_region(s: &str) -> Result<[f64; 4], CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("region `{s}`: expected four numbers")))?;
    v.try_into()
        .map_err(|_| CliError::Config(format!("region `{s}`: expected four numbers")))
}

pub fn compute(req: &OracleRequest) -> Result<Vec<PoleEstimate>, CliError> {
    let [a, b, c, d] = req.region;
    let region = ScanRegion::new((a, b), (c, d), 2, 2).map_err(|e| CliError::Config(e.to_string()))?;
    disk_pole_oracle(req.bc, req.radius, &region, req.n_max).map_err(|e| match e {
        polescan_core::polescan::OracleError::InvalidRegion(_) | polescan_core::polescan::OracleError::InvalidRadius(_) => {
            CliError::Config(e.to_string())
        }
        other => CliError::Other(other.to_string()),
    })
}

pub fn write_csv<W: Write>(mut out: W, req: &OracleRequest, zeros: &[PoleEstimate]) -> std::io::Result<()> {
    writeln!(out, "# {}", artifact_header(&sha256_hex(&req.canonical())))?;
    writeln!(out, "# {}", req.canonical())?;
    writeln!(out, "n,re,im,residual")?;
    for z in zeros {
        writeln!(
            out,
            "{},{},{},{:e}",
            z.order.unwrap_or(0),
            z.location.re,
            z.location.im,
            z.value
        )?;
    }
    Ok(())
}

/// Writes `oracle.csv` into `dir`.
pub fn cmd_oracle(req: &OracleRequest, dir: &Path) -> Result<Vec<PoleEstimate>, CliError> {
    let zeros = compute(req)?;
    fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join("oracle.csv"))?);
    write_csv(&mut out, req, &zeros)?;
    out.flush()?;
    Ok(zeros)
}
