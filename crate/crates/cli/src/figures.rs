//! Dataset builders behind `clausius figure` and `clausius evolve`: each
//! figure id maps one config onto one deterministic table.

use anyhow::{ensure, Result};
use clap::ValueEnum;

use clausius::bath::{asymptotic_rates, HBAR, K_BOLTZMANN};
use clausius::coherence::{distillable_coherence, ergotropy_closed_form};
use clausius::dynamics::{evolve, LindbladGenerator};
use clausius::hilbert::{CMatrix, DensityMatrix};
use clausius::interferometer::{
    apply_bs3, closed_form_state, fringe_profile, initial_density, DecoherenceFactor,
};
use clausius::thermo::{clausius_function, f_infinity_dimensionless};

use crate::config::RunConfig;
use crate::dataset::{format_bool, format_number, Dataset};

/// Multiplier that brings the sub-zeptojoule extractable works onto an
/// order-one log axis in the work-sweep dataset.
pub const WORK_DISPLAY_SCALE: f64 = 1e31;

/// The six shipped dataset layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Detector fringes over time at one temperature: (t, p, pr).
    Fig2a,
    /// Same layout as fig2a; pair it with a cold-bath config.
    Fig2b,
    /// Clausius functional on a time grid per temperature exponent:
    /// (t, log10_ratio, f, violation).
    Fig3a,
    /// Completed-decoherence Clausius functional over the
    /// (log10_ratio, c2_sq) sheet: (log10_ratio, c2_sq, f_infinity).
    Fig3b,
    /// Distillable coherence on a time grid per temperature exponent:
    /// (t, log10_ratio, c_d).
    Fig4,
    /// Extractable work against bath temperature:
    /// (temperature, w, neg_log_scaled_w).
    Fig5,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
        }
    }

    /// Output filename used when neither the config nor `--out` names one.
    pub fn default_output(self) -> String {
        format!("{}.csv", self.name())
    }
}

/// Build the dataset for `id` from an already validated config.
pub fn generate(id: FigureId, cfg: &RunConfig) -> Result<Dataset> {
    match id {
        FigureId::Fig2a | FigureId::Fig2b => fringe_sweep(cfg),
        FigureId::Fig3a => clausius_sweep(cfg),
        FigureId::Fig3b => clausius_sheet(cfg),
        FigureId::Fig4 => coherence_sweep(cfg),
        FigureId::Fig5 => work_sweep(cfg),
    }
}

/// Detector-plane probability density over the time and momentum grids,
/// plus `t = inf` rows for the surviving fringes when requested.
fn fringe_sweep(cfg: &RunConfig) -> Result<Dataset> {
    let icfg = cfg.interferometer()?;
    let bath = cfg.bath()?;
    let rates = asymptotic_rates(&bath)?;
    let momenta = cfg.momentum_grid();

    let mut data = Dataset::new(vec!["t", "p", "pr"]);
    let mut block = |t: f64, eta: DecoherenceFactor| -> Result<()> {
        for &p in &momenta {
            let pr = fringe_profile(&icfg, eta, rates.nbar, bath.omega, p)?;
            data.push_row(vec![format_number(t), format_number(p), format_number(pr)]);
        }
        Ok(())
    };
    for &t in &cfg.time_grid() {
        block(t, DecoherenceFactor::from_rates(&rates, t)?)?;
    }
    if cfg.include_stationary {
        block(f64::INFINITY, DecoherenceFactor::complete())?;
    }
    Ok(data)
}

/// Clausius functional over the time grid, one curve per entry of `ratios`.
fn clausius_sweep(cfg: &RunConfig) -> Result<Dataset> {
    let icfg = cfg.interferometer()?;
    let mut data = Dataset::new(vec!["t", "log10_ratio", "f", "violation"]);
    for &ratio in &cfg.ratios {
        let bath = cfg.bath_at_ratio(ratio)?;
        let mut times = cfg.time_grid();
        if cfg.include_stationary {
            times.push(f64::INFINITY);
        }
        for &t in &times {
            let record = clausius_function(&icfg, &bath, t)?;
            data.push_row(vec![
                format_number(t),
                format_number(ratio),
                format_number(record.f_nats),
                format_bool(record.violation),
            ]);
        }
    }
    Ok(data)
}

/// Completed-decoherence Clausius functional over the dense
/// temperature-exponent x transmission sheet.
fn clausius_sheet(cfg: &RunConfig) -> Result<Dataset> {
    let c2s = cfg.c2_grid();
    let mut data = Dataset::new(vec!["log10_ratio", "c2_sq", "f_infinity"]);
    for &ratio in &cfg.ratio_grid() {
        let bath = cfg.bath_at_ratio(ratio)?;
        let x = HBAR * bath.omega / (K_BOLTZMANN * bath.temperature);
        for &c2_sq in &c2s {
            let icfg = cfg.interferometer_at(c2_sq)?;
            let f = f_infinity_dimensionless(&icfg, cfg.phi, x)?;
            data.push_row(vec![
                format_number(ratio),
                format_number(c2_sq),
                format_number(f),
            ]);
        }
    }
    Ok(data)
}

/// Distillable coherence of the evolving state over the time grid, one
/// curve per entry of `ratios`.
fn coherence_sweep(cfg: &RunConfig) -> Result<Dataset> {
    let icfg = cfg.interferometer()?;
    let mut data = Dataset::new(vec!["t", "log10_ratio", "c_d"]);
    for &ratio in &cfg.ratios {
        let bath = cfg.bath_at_ratio(ratio)?;
        for &t in &cfg.time_grid() {
            let c_d = distillable_coherence(&closed_form_state(&icfg, &bath, t)?)?;
            data.push_row(vec![
                format_number(t),
                format_number(ratio),
                format_number(c_d),
            ]);
        }
    }
    Ok(data)
}

/// Extractable work of the fully decohered run against bath temperature,
/// in joules and as `-ln(w * 1e31)` for the log axis.
fn work_sweep(cfg: &RunConfig) -> Result<Dataset> {
    let icfg = cfg.interferometer()?;
    let mut data = Dataset::new(vec!["temperature", "w", "neg_log_scaled_w"]);
    for &temperature in &cfg.temperature_grid() {
        let bath = cfg.bath_at_temperature(temperature)?;
        let w = ergotropy_closed_form(&icfg, &bath)?;
        data.push_row(vec![
            format_number(temperature),
            format_number(w),
            format_number(-(w * WORK_DISPLAY_SCALE).ln()),
        ]);
    }
    Ok(data)
}

/// Integrate the split state under the constant-rate generator on a
/// `dim`-level ladder and tabulate populations plus integrator
/// diagnostics. The configured time grid gains a leading `t = 0` row when
/// it does not already start there.
pub fn evolve_dataset(cfg: &RunConfig, dim: usize) -> Result<Dataset> {
    ensure!(
        (3..=64).contains(&dim),
        "evolve needs 3 <= dim <= 64, got {dim}"
    );
    let icfg = cfg.interferometer()?;
    let bath = cfg.bath()?;
    let rates = asymptotic_rates(&bath)?;
    let rho0 = embed(&apply_bs3(&initial_density(&icfg))?, dim)?;
    let generator = LindbladGenerator::markovian(dim, rates.relaxation, rates.nbar)?;

    let mut grid = cfg.time_grid();
    if grid[0] > 0.0 {
        grid.insert(0, 0.0);
    }
    let trajectory = evolve(&rho0, &generator, &grid)?;

    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|level| format!("p{level}")));
    header.extend(["offdiag_l1", "trace_drift", "min_eigenvalue"].map(String::from));
    let mut data = Dataset::new(header);
    for point in &trajectory.points {
        let mut row = vec![format_number(point.t)];
        row.extend(point.rho.populations().iter().map(|&p| format_number(p)));
        let mut offdiag = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    offdiag += point.rho.matrix()[(i, j)].norm();
                }
            }
        }
        row.push(format_number(offdiag));
        row.push(format_number(point.trace_drift));
        row.push(format_number(point.min_eigenvalue));
        data.push_row(row);
    }
    Ok(data)
}

/// Pad a state with empty levels up to `dim` (top-left block embedding).
fn embed(rho: &DensityMatrix, dim: usize) -> Result<DensityMatrix> {
    let small = rho.dim();
    ensure!(dim >= small, "cannot embed a {small}-level state in {dim}");
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..small {
        for j in 0..small {
            out[(i, j)] = rho.matrix()[(i, j)];
        }
    }
    Ok(DensityMatrix::new(out)?)
}
