use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polescan_cli::config::RunConfig;
use polescan_cli::oracle::{cmd_oracle, parse_region, OracleRequest};
use polescan_cli::scan::cmd_scan;
use polescan_cli::validate::cmd_validate;
use polescan_cli::CliError;
use polescan_core::interior::BoundaryCondition;
use polescan_core::polescan::DEFAULT_ORACLE_ORDER;

#[derive(Parser)]
#[command(name = "polescan", version, about = "Locate scattering poles of 2D obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Neumann,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a wavenumber rectangle and report indicator spikes.
    Scan {
        /// Run configuration file.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Built-in configuration instead of a file.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory, overriding the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, overriding the config's `workers`.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Exact poles of a disk from Hankel function zeros.
    Oracle {
        #[arg(long, value_enum)]
        bc: Bc,
        /// `re_min,re_max,im_min,im_max`.
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = DEFAULT_ORACLE_ORDER)]
        nmax: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the invariant suites and print a pass/fail table.
    Validate {
        #[arg(long, default_value = "example1a")]
        preset: String,
    },
    /// Print the text of a built-in configuration.
    Preset { name: Option<String> },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scan {
            config,
            preset,
            out,
            workers,
        } => {
            let cfg = match (config, preset) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    RunConfig::parse(&text)?
                }
                (None, Some(name)) => RunConfig::from_preset(&name)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let dir = out.unwrap_or_else(|| cfg.output.clone());
            let workers = workers.filter(|&w| w > 0).unwrap_or_else(|| cfg.workers());
            let outcome = cmd_scan(&cfg, &dir, workers)?;
            println!(
                "{} nodes in {} ms, {} spike(s); results in {}",
                outcome.result.values.len(),
                outcome.elapsed.as_millis(),
                outcome.poles.len(),
                dir.display()
            );
            for p in &outcome.poles {
                println!("  {:.6} {:+.6}i  prominence {:.1}", p.location.re, p.location.im, p.prominence);
            }
            Ok(())
        }
        Command::Oracle {
            bc,
            region,
            nmax,
            radius,
            out,
        } => {
            let req = OracleRequest {
                bc: match bc {
                    Bc::Dirichlet => BoundaryCondition::Dirichlet,
                    Bc::Neumann => BoundaryCondition::Neumann,
                },
                radius,
                region: parse_region(&region)?,
                n_max: nmax,
            };
            let zeros = cmd_oracle(&req, &out)?;
            for z in &zeros {
                println!(
                    "n={} {:.12} {:+.12}i  |f|={:.1e}",
                    z.order.unwrap_or(0),
                    z.location.re,
                    z.location.im,
                    z.value
                );
            }
            Ok(())
        }
        Command::Validate { preset } => {
            let cfg = RunConfig::from_preset(&preset)?;
            cmd_validate(&cfg, &mut std::io::stdout()).map(|_| ())
        }
        Command::Preset { name } => {
            match name {
                None => polescan_cli::presets::NAMES.iter().for_each(|n| println!("{n}")),
                Some(n) => print!(
                    "{}",
                    polescan_cli::presets::text(&n).ok_or_else(|| CliError::Config(format!("unknown preset `{n}`")))?
                ),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polescan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
