//! Flat `key = value` run configuration shared by every subcommand.
//!
//! Every key can come from a config file or from a `--key value` flag with
//! the same spelling; flags win. Unknown keys are rejected by name so typos
//! surface immediately instead of silently running on defaults.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use clausius::bath::{temperature_from_log_ratio, BathSpec};
use clausius::interferometer::InterferometerConfig;

/// Temperature exponent used when neither `temperature` nor
/// `log10_omega_over_t` is given: the room-temperature anchor of the
/// default oscillator (about 302 K at `omega = 1e12`).
pub const DEFAULT_LOG10_RATIO: f64 = 9.52;

/// How a `{min, max, points}` axis is filled in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

impl FromStr for Spacing {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Self::Log),
            "linear" => Ok(Self::Linear),
            other => bail!("key 'spacing': expected 'log' or 'linear', got '{other}'"),
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Log => "log",
            Self::Linear => "linear",
        })
    }
}

/// One fully resolved run: bath, splitter, and the sweep axes the figure
/// generators draw their grids from.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Oscillator frequency, rad/s.
    pub omega: f64,
    /// Bath temperature in kelvin. Exclusive with `log10_omega_over_t`.
    pub temperature: Option<f64>,
    /// `log10(omega / (k_B T / hbar))`-style exponent; `T = omega / 10^x`.
    pub log10_omega_over_t: Option<f64>,
    /// Dimensionless system-bath coupling.
    pub gamma0: f64,
    /// Bath cutoff in units of `omega`.
    pub cutoff_ratio: f64,
    /// Transmission probability of the first splitter, strictly in (0, 1).
    pub c2_sq: f64,
    /// Interferometer phase, radians.
    pub phi: f64,
    /// Dimensionless detector path difference.
    pub delta: f64,
    /// Time axis.
    pub t_min: f64,
    pub t_max: f64,
    pub time_points: usize,
    pub spacing: Spacing,
    /// Momentum axis half-width in units of `sqrt(omega)`.
    pub p_half_width: f64,
    pub p_points: usize,
    /// Discrete temperature-exponent list for multi-curve figures.
    pub ratios: Vec<f64>,
    /// Dense temperature-exponent axis for sheet figures.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_points: usize,
    /// Number of interior `c2_sq` grid points (endpoints excluded).
    pub c2_points: usize,
    /// Kelvin axis for temperature sweeps.
    pub temp_min: f64,
    pub temp_max: f64,
    pub temp_points: usize,
    /// Append completed-decoherence (`t = inf`) rows to time sweeps.
    pub include_stationary: bool,
    /// Output path; figure id supplies a default when absent.
    pub out: Option<PathBuf>,
    /// Seed for the sampled verification checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega: 1e12,
            temperature: None,
            log10_omega_over_t: None,
            gamma0: 1e-3,
            cutoff_ratio: 10.0,
            c2_sq: 0.5,
            phi: 0.0,
            delta: 6.0,
            t_min: 1e-9,
            t_max: 1e-7,
            time_points: 200,
            spacing: Spacing::Log,
            p_half_width: 4.0,
            p_points: 401,
            ratios: vec![DEFAULT_LOG10_RATIO],
            ratio_min: 8.0,
            ratio_max: 24.0,
            ratio_points: 60,
            c2_points: 60,
            temp_min: 1.0,
            temp_max: 300.0,
            temp_points: 300,
            include_stationary: false,
            out: None,
            seed: 7,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .with_context(|| format!("key '{key}': not a number: '{value}'"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .with_context(|| format!("key '{key}': not a nonnegative integer: '{value}'"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => bail!("key '{key}': expected 'true' or 'false', got '{other}'"),
    }
}

impl RunConfig {
    /// Defaults, then the file at `path` if given.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            cfg.apply_file(path)?;
        }
        Ok(cfg)
    }

    /// Fold a `key = value` file into this config. Lines that are empty or
    /// start with `#` are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file '{}'", path.display()))?;
        for (index, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').with_context(|| {
                format!(
                    "{}:{}: expected 'key = value', got '{line}'",
                    path.display(),
                    index + 1
                )
            })?;
            self.apply_pair(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), index + 1))?;
        }
        Ok(())
    }

    /// Set one key from its text form; the single entry point for both
    /// config files and flags, so they cannot drift apart.
    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "omega" => self.omega = parse_f64(key, value)?,
            "temperature" => self.temperature = Some(parse_f64(key, value)?),
            "log10_omega_over_t" => self.log10_omega_over_t = Some(parse_f64(key, value)?),
            "gamma0" => self.gamma0 = parse_f64(key, value)?,
            "cutoff_ratio" => self.cutoff_ratio = parse_f64(key, value)?,
            "c2_sq" => self.c2_sq = parse_f64(key, value)?,
            "phi" => self.phi = parse_f64(key, value)?,
            "delta" => self.delta = parse_f64(key, value)?,
            "t_min" => self.t_min = parse_f64(key, value)?,
            "t_max" => self.t_max = parse_f64(key, value)?,
            "time_points" => self.time_points = parse_usize(key, value)?,
            "spacing" => self.spacing = value.parse()?,
            "p_half_width" => self.p_half_width = parse_f64(key, value)?,
            "p_points" => self.p_points = parse_usize(key, value)?,
            "ratios" => {
                let mut ratios = Vec::new();
                for part in value.split(',') {
                    ratios.push(parse_f64(key, part.trim())?);
                }
                self.ratios = ratios;
            }
            "ratio_min" => self.ratio_min = parse_f64(key, value)?,
            "ratio_max" => self.ratio_max = parse_f64(key, value)?,
            "ratio_points" => self.ratio_points = parse_usize(key, value)?,
            "c2_points" => self.c2_points = parse_usize(key, value)?,
            "temp_min" => self.temp_min = parse_f64(key, value)?,
            "temp_max" => self.temp_max = parse_f64(key, value)?,
            "temp_points" => self.temp_points = parse_usize(key, value)?,
            "include_stationary" => self.include_stationary = parse_bool(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => {
                self.seed = value
                    .parse::<u64>()
                    .with_context(|| format!("key '{key}': not a nonnegative integer: '{value}'"))?
            }
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Reject configs no run can use, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        ensure!(
            !(self.temperature.is_some() && self.log10_omega_over_t.is_some()),
            "keys 'temperature' and 'log10_omega_over_t' are exclusive; set at most one"
        );
        if let Some(t) = self.temperature {
            ensure!(
                t > 0.0 && t.is_finite(),
                "key 'temperature': must be positive and finite, got {t}"
            );
        }
        if let Some(x) = self.log10_omega_over_t {
            ensure!(x.is_finite(), "key 'log10_omega_over_t': must be finite");
        }
        ensure!(
            self.omega > 0.0 && self.omega.is_finite(),
            "key 'omega': must be positive and finite, got {}",
            self.omega
        );
        ensure!(
            self.gamma0 > 0.0 && self.gamma0.is_finite(),
            "key 'gamma0': must be positive and finite, got {}",
            self.gamma0
        );
        ensure!(
            self.cutoff_ratio > 0.0 && self.cutoff_ratio.is_finite(),
            "key 'cutoff_ratio': must be positive and finite, got {}",
            self.cutoff_ratio
        );
        ensure!(
            self.c2_sq > 0.0 && self.c2_sq < 1.0,
            "key 'c2_sq': must lie strictly between 0 and 1 (single-branch runs \
             degenerate the entropy bookkeeping), got {}",
            self.c2_sq
        );
        ensure!(self.phi.is_finite(), "key 'phi': must be finite");
        ensure!(
            self.delta.is_finite() && self.delta > 0.0,
            "key 'delta': must be positive and finite, got {}",
            self.delta
        );
        ensure!(
            self.time_points >= 1,
            "key 'time_points': need at least one point"
        );
        ensure!(
            self.t_min >= 0.0 && self.t_min.is_finite(),
            "key 't_min': must be nonnegative and finite, got {}",
            self.t_min
        );
        if self.time_points > 1 {
            ensure!(
                self.t_max > self.t_min && self.t_max.is_finite(),
                "key 't_max': must exceed t_min, got {}",
                self.t_max
            );
        }
        if self.spacing == Spacing::Log && self.time_points > 1 {
            ensure!(
                self.t_min > 0.0,
                "key 't_min': log spacing needs t_min > 0 (use spacing = linear \
                 to include t = 0)"
            );
        }
        ensure!(
            self.p_points >= 2,
            "key 'p_points': need at least two points"
        );
        ensure!(
            self.p_half_width > 0.0 && self.p_half_width.is_finite(),
            "key 'p_half_width': must be positive and finite, got {}",
            self.p_half_width
        );
        ensure!(!self.ratios.is_empty(), "key 'ratios': list is empty");
        ensure!(
            self.ratios.iter().all(|r| r.is_finite()),
            "key 'ratios': entries must be finite"
        );
        ensure!(
            self.ratio_points >= 2,
            "key 'ratio_points': need at least two points"
        );
        ensure!(
            self.ratio_max > self.ratio_min
                && self.ratio_min.is_finite()
                && self.ratio_max.is_finite(),
            "key 'ratio_max': must exceed ratio_min"
        );
        ensure!(
            self.c2_points >= 1,
            "key 'c2_points': need at least one point"
        );
        ensure!(
            self.temp_min > 0.0 && self.temp_min.is_finite(),
            "key 'temp_min': must be positive and finite, got {}",
            self.temp_min
        );
        ensure!(
            self.temp_points >= 1,
            "key 'temp_points': need at least one point"
        );
        if self.temp_points > 1 {
            ensure!(
                self.temp_max > self.temp_min && self.temp_max.is_finite(),
                "key 'temp_max': must exceed temp_min, got {}",
                self.temp_max
            );
        }
        Ok(())
    }

    /// Bath temperature in kelvin after applying the exclusivity rule and
    /// the room-temperature default.
    pub fn resolved_temperature(&self) -> Result<f64> {
        if let Some(t) = self.temperature {
            return Ok(t);
        }
        let ratio = self.log10_omega_over_t.unwrap_or(DEFAULT_LOG10_RATIO);
        Ok(temperature_from_log_ratio(self.omega, ratio)?)
    }

    /// The bath this config names.
    pub fn bath(&self) -> Result<BathSpec> {
        self.bath_at_temperature(self.resolved_temperature()?)
    }

    /// Same bath but at the temperature exponent `ratio` (sweep axes).
    pub fn bath_at_ratio(&self, ratio: f64) -> Result<BathSpec> {
        self.bath_at_temperature(temperature_from_log_ratio(self.omega, ratio)?)
    }

    /// Same bath but at an explicit kelvin temperature (sweep axes).
    pub fn bath_at_temperature(&self, temperature: f64) -> Result<BathSpec> {
        Ok(BathSpec::new(
            self.gamma0,
            self.cutoff_ratio * self.omega,
            self.omega,
            temperature,
        )?)
    }

    /// The splitter this config names.
    pub fn interferometer(&self) -> Result<InterferometerConfig> {
        self.interferometer_at(self.c2_sq)
    }

    /// Same splitter but at transmission `c2_sq` (sweep axes).
    pub fn interferometer_at(&self, c2_sq: f64) -> Result<InterferometerConfig> {
        Ok(InterferometerConfig::from_c2_sq(c2_sq, self.phi)?.with_delta(self.delta)?)
    }

    /// The time axis.
    pub fn time_grid(&self) -> Vec<f64> {
        axis(self.t_min, self.t_max, self.time_points, self.spacing)
    }

    /// The detector momentum axis, `+/- p_half_width * sqrt(omega)`.
    pub fn momentum_grid(&self) -> Vec<f64> {
        let half = self.p_half_width * self.omega.sqrt();
        axis(-half, half, self.p_points, Spacing::Linear)
    }

    /// Interior transmission grid `k / (c2_points + 1)`, endpoints excluded.
    pub fn c2_grid(&self) -> Vec<f64> {
        (1..=self.c2_points)
            .map(|k| k as f64 / (self.c2_points + 1) as f64)
            .collect()
    }

    /// The dense temperature-exponent axis.
    pub fn ratio_grid(&self) -> Vec<f64> {
        axis(self.ratio_min, self.ratio_max, self.ratio_points, Spacing::Linear)
    }

    /// The kelvin axis.
    pub fn temperature_grid(&self) -> Vec<f64> {
        axis(self.temp_min, self.temp_max, self.temp_points, Spacing::Linear)
    }
}

fn axis(min: f64, max: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let steps = (points - 1) as f64;
    (0..points)
        .map(|k| {
            let s = k as f64 / steps;
            match spacing {
                Spacing::Linear => min + (max - min) * s,
                Spacing::Log => min * (max / min).powf(s),
            }
        })
        .collect()
}
