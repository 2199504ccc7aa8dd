//! `clausius`: deterministic figure datasets, a verification suite, and
//! trajectory runs for a damped-oscillator interferometer model.
//!
//! Exit codes: 0 on success, 1 when a verification check or a runtime step
//! fails, 2 for unusable invocations (bad flags, bad config).

mod config;
mod dataset;
mod figures;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use clausius::bath::WEAK_COUPLING_LIMIT;

use config::RunConfig;
use figures::FigureId;

#[derive(Parser)]
#[command(
    name = "clausius",
    version,
    about = "Figure datasets, verification checks, and trajectory runs for a \
             damped-oscillator interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one figure dataset as CSV
    Figure {
        /// Dataset layout to produce
        #[arg(value_enum)]
        id: FigureId,
        /// Flat key=value config file
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the verification suite: one line per check, exit 0 iff clean
    Verify {
        /// Flat key=value config file
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Integrate the split state on a dim-level ladder and tabulate it
    Evolve {
        /// Flat key=value config file
        #[arg(long)]
        config: Option<PathBuf>,
        /// Ladder dimension (3 through 64)
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Every config key doubled as a `--key value` flag. Values are passed as
/// text through the same parser as the config file, so flag and file
/// behavior cannot drift apart; flags win.
#[derive(Args, Default)]
#[command(next_help_heading = "Config overrides (same keys as the config file)")]
struct Overrides {
    /// Oscillator frequency, rad/s
    #[arg(long = "omega", value_name = "VALUE")]
    omega: Option<String>,
    /// Bath temperature in kelvin (exclusive with log10_omega_over_t)
    #[arg(long = "temperature", value_name = "VALUE")]
    temperature: Option<String>,
    /// Temperature exponent x; resolves T = omega / 10^x kelvin
    #[arg(long = "log10_omega_over_t", value_name = "VALUE")]
    log10_omega_over_t: Option<String>,
    /// Dimensionless system-bath coupling
    #[arg(long = "gamma0", value_name = "VALUE")]
    gamma0: Option<String>,
    /// Bath cutoff in units of omega
    #[arg(long = "cutoff_ratio", value_name = "VALUE")]
    cutoff_ratio: Option<String>,
    /// First-splitter transmission probability, strictly in (0, 1)
    #[arg(long = "c2_sq", value_name = "VALUE")]
    c2_sq: Option<String>,
    /// Interferometer phase, radians
    #[arg(long = "phi", value_name = "VALUE")]
    phi: Option<String>,
    /// Dimensionless detector path difference
    #[arg(long = "delta", value_name = "VALUE")]
    delta: Option<String>,
    /// Time axis start, seconds
    #[arg(long = "t_min", value_name = "VALUE")]
    t_min: Option<String>,
    /// Time axis end, seconds
    #[arg(long = "t_max", value_name = "VALUE")]
    t_max: Option<String>,
    /// Number of time-axis points
    #[arg(long = "time_points", value_name = "VALUE")]
    time_points: Option<String>,
    /// Time-axis spacing: log or linear
    #[arg(long = "spacing", value_name = "VALUE")]
    spacing: Option<String>,
    /// Momentum axis half-width in units of sqrt(omega)
    #[arg(long = "p_half_width", value_name = "VALUE")]
    p_half_width: Option<String>,
    /// Number of momentum-axis points
    #[arg(long = "p_points", value_name = "VALUE")]
    p_points: Option<String>,
    /// Comma-separated temperature-exponent list for multi-curve figures
    #[arg(long = "ratios", value_name = "VALUE")]
    ratios: Option<String>,
    /// Dense temperature-exponent axis start
    #[arg(long = "ratio_min", value_name = "VALUE")]
    ratio_min: Option<String>,
    /// Dense temperature-exponent axis end
    #[arg(long = "ratio_max", value_name = "VALUE")]
    ratio_max: Option<String>,
    /// Number of dense temperature-exponent points
    #[arg(long = "ratio_points", value_name = "VALUE")]
    ratio_points: Option<String>,
    /// Number of interior c2_sq grid points (endpoints excluded)
    #[arg(long = "c2_points", value_name = "VALUE")]
    c2_points: Option<String>,
    /// Kelvin axis start for temperature sweeps
    #[arg(long = "temp_min", value_name = "VALUE")]
    temp_min: Option<String>,
    /// Kelvin axis end for temperature sweeps
    #[arg(long = "temp_max", value_name = "VALUE")]
    temp_max: Option<String>,
    /// Number of kelvin-axis points
    #[arg(long = "temp_points", value_name = "VALUE")]
    temp_points: Option<String>,
    /// Append completed-decoherence (t = inf) rows to time sweeps
    #[arg(long = "include_stationary", value_name = "VALUE")]
    include_stationary: Option<String>,
    /// Output path (figure/evolve default filenames apply when absent)
    #[arg(long = "out", value_name = "VALUE")]
    out: Option<String>,
    /// Seed for the sampled verification checks
    #[arg(long = "seed", value_name = "VALUE")]
    seed: Option<String>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let pairs: [(&'static str, &Option<String>); 25] = [
            ("omega", &self.omega),
            ("temperature", &self.temperature),
            ("log10_omega_over_t", &self.log10_omega_over_t),
            ("gamma0", &self.gamma0),
            ("cutoff_ratio", &self.cutoff_ratio),
            ("c2_sq", &self.c2_sq),
            ("phi", &self.phi),
            ("delta", &self.delta),
            ("t_min", &self.t_min),
            ("t_max", &self.t_max),
            ("time_points", &self.time_points),
            ("spacing", &self.spacing),
            ("p_half_width", &self.p_half_width),
            ("p_points", &self.p_points),
            ("ratios", &self.ratios),
            ("ratio_min", &self.ratio_min),
            ("ratio_max", &self.ratio_max),
            ("ratio_points", &self.ratio_points),
            ("c2_points", &self.c2_points),
            ("temp_min", &self.temp_min),
            ("temp_max", &self.temp_max),
            ("temp_points", &self.temp_points),
            ("include_stationary", &self.include_stationary),
            ("out", &self.out),
            ("seed", &self.seed),
        ];
        for (key, value) in pairs {
            if let Some(value) = value {
                cfg.apply_pair(key, value)?;
            }
        }
        Ok(())
    }
}

fn load(config: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(config)?;
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    if cfg.gamma0 > WEAK_COUPLING_LIMIT {
        eprintln!(
            "warning: gamma0 = {} exceeds the weak-coupling regime ({WEAK_COUPLING_LIMIT}); \
             the second-order rates are unreliable",
            cfg.gamma0
        );
    }
    Ok(cfg)
}

const USAGE_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 1;

fn usage_error(err: anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    ExitCode::from(USAGE_ERROR)
}

fn runtime_error(err: anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    ExitCode::from(RUNTIME_ERROR)
}

fn write_table(data: &dataset::Dataset, path: &Path) -> ExitCode {
    match data.write(path) {
        Ok(()) => {
            eprintln!("wrote {} ({} rows)", path.display(), data.rows.len());
            ExitCode::SUCCESS
        }
        Err(err) => runtime_error(err),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Figure {
            id,
            config,
            overrides,
        } => {
            let cfg = match load(config.as_deref(), &overrides) {
                Ok(cfg) => cfg,
                Err(err) => return usage_error(err),
            };
            let data = match figures::generate(id, &cfg) {
                Ok(data) => data,
                Err(err) => return runtime_error(err),
            };
            let path = cfg
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(id.default_output()));
            write_table(&data, &path)
        }
        Command::Verify { config, overrides } => {
            let cfg = match load(config.as_deref(), &overrides) {
                Ok(cfg) => cfg,
                Err(err) => return usage_error(err),
            };
            let lines = verify::run_verify(&cfg);
            for line in &lines {
                match &line.note {
                    Some(note) => println!(
                        "{} {} {:.6e} ({note})",
                        line.name,
                        line.status.as_str(),
                        line.metric
                    ),
                    None => println!(
                        "{} {} {:.6e}",
                        line.name,
                        line.status.as_str(),
                        line.metric
                    ),
                }
            }
            let failed = verify::failures(&lines);
            let info = lines
                .iter()
                .filter(|l| l.status == verify::Status::Info)
                .count();
            println!(
                "verify: {} checks, {} failed, {} informational",
                lines.len(),
                failed,
                info
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(RUNTIME_ERROR)
            }
        }
        Command::Evolve {
            config,
            dim,
            overrides,
        } => {
            if !(3..=64).contains(&dim) {
                return usage_error(anyhow::anyhow!(
                    "--dim must lie between 3 and 64, got {dim}"
                ));
            }
            let cfg = match load(config.as_deref(), &overrides) {
                Ok(cfg) => cfg,
                Err(err) => return usage_error(err),
            };
            let data = match figures::evolve_dataset(&cfg, dim) {
                Ok(data) => data,
                Err(err) => return runtime_error(err),
            };
            let path = cfg
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("evolve.csv"));
            write_table(&data, &path)
        }
    }
}
