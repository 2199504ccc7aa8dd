//! The verification suite behind `clausius verify`: every analytic oracle
//! and cross-route consistency check in the library, re-run end to end and
//! reported one line per check.
//!
//! Checks marked `info` document known tensions between alternative
//! computation routes; they are reported but never fail the run.

use anyhow::Result;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clausius::bath::{
    asymptotic_rates, dissipation_kernel, dissipation_kernel_quadrature, mean_occupation,
    time_dependent_coefficients, BathSpec,
};
use clausius::coherence::{
    coherence_postulate_suite, distillable_coherence, ergotropy, ergotropy_closed_form_units,
    in_ordering_regime, SuiteConfig,
};
use clausius::dynamics::{evolve, evolve_with_max_step, LindbladGenerator};
use clausius::hilbert::{
    eig_hermitian, random_density_matrix, von_neumann_entropy, CMatrix, DensityMatrix, C64,
};
use clausius::interferometer::{
    apply_bs3, closed_form_matrix, closed_form_state, fringe_profile, gaussian_envelope,
    initial_density, DecoherenceFactor, InterferometerConfig,
};
use clausius::thermo::{
    clausius_function, entropy_infinity_from_occupation, f_infinity_dimensionless,
    heat_closed_form, heat_from_quadratures, heat_from_state_trace, violation_crossover,
};

use crate::config::RunConfig;

// Pinned pass thresholds. These are part of the shipped contract: loosening
// one is an API change, not a tweak.
const ENDPOINT_TOL: f64 = 1e-12;
const ENTROPY_ORACLE_TOL: f64 = 1e-10;
const NONNEGATIVITY_GUARD: f64 = 1e-12;
const COLD_VIOLATION_FLOOR: f64 = 1e10;
const CROSSOVER_WINDOW: f64 = 0.05;
const ETA_VANISH_THRESHOLD: f64 = 1e-3;
const RESIDUAL_FRINGE_TOL: f64 = 1e-10;
const TWO_LEVEL_REL_TOL: f64 = 1e-6;
const TRACE_DRIFT_TOL: f64 = 1e-8;
const HALVING_TOL: f64 = 1e-8;
const ASYMPTOTIC_APPROACH_TOL: f64 = 0.02;
const KERNEL_REL_TOL: f64 = 1e-6;
const MONOTONE_GUARD: f64 = 1e-10;
const ORDER_GUARD: f64 = 1e-12;
const ERGOTROPY_REL_TOL: f64 = 1e-12;
const ORACLE_ABS_TOL: f64 = 1e-12;
const ORACLE_STATES: usize = 500;

/// Canonical oscillator and figure ratios the checks pin themselves to.
const OMEGA: f64 = 1e12;
const GAMMA0: f64 = 1e-3;
const CUTOFF_RATIO: f64 = 10.0;
const ROOM_RATIO: f64 = 9.52;
const COLD_RATIO: f64 = 23.0;
const FIGURE_RATIOS: [f64; 5] = [9.52, 10.2, 10.6, 10.9, 11.1];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Info => "info",
        }
    }
}

/// One report line: a named check, whether it held, and the measured
/// margin or metric it is judged on.
#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: &'static str,
    pub status: Status,
    pub metric: f64,
    /// Present only when a check aborted with an error.
    pub note: Option<String>,
}

/// A single check body: returns its status and the metric it is judged on.
type Check = fn(&RunConfig) -> Result<(Status, f64)>;

/// Run every check. Only the seed is taken from `cfg`; the physics
/// parameters are pinned so the report always states the same claims.
pub fn run_verify(cfg: &RunConfig) -> Vec<CheckLine> {
    let checks: [(&'static str, Check); 23] = [
        ("closed_form_t0_endpoint", check_t0_endpoint),
        ("stationary_entropy_oracle", check_stationary_entropy),
        ("clausius_room_nonnegative", check_room_nonnegative),
        ("clausius_cold_divergence", check_cold_divergence),
        ("clausius_crossover_location", check_crossover_location),
        ("clausius_crossover_monotone", check_crossover_monotone),
        ("fringe_room_eta_vanishes", check_room_eta),
        ("fringe_cold_residual_amplitude", check_cold_residual),
        ("fringe_normalization", check_fringe_normalization),
        ("two_level_steady_state", check_steady_state),
        ("two_level_coherence_decay", check_coherence_decay),
        ("trajectory_trace_drift", check_trace_drift),
        ("rk4_step_halving", check_step_halving),
        ("bath_asymptotic_approach", check_asymptotic_approach),
        ("bath_rates_positive", check_rates_positive),
        ("dissipation_kernel_quadrature", check_kernel_quadrature),
        ("coherence_monotone", check_coherence_monotone),
        ("coherence_temperature_order", check_temperature_order),
        ("coherence_postulates", check_postulates),
        ("ergotropy_closed_form_grid", check_ergotropy_grid),
        ("ergotropy_permutation_oracle", check_permutation_oracle),
        ("heat_route_consistency", check_heat_routes),
        ("heat_trace_route_ratio", check_trace_route),
    ];
    checks
        .iter()
        .map(|&(name, run)| match run(cfg) {
            Ok((status, metric)) => CheckLine {
                name,
                status,
                metric,
                note: None,
            },
            Err(err) => CheckLine {
                name,
                status: Status::Fail,
                metric: f64::NAN,
                note: Some(format!("{err:#}")),
            },
        })
        .collect()
}

/// Number of failing (non-info) lines.
pub fn failures(lines: &[CheckLine]) -> usize {
    lines.iter().filter(|l| l.status == Status::Fail).count()
}

fn pass_if(ok: bool, metric: f64) -> Result<(Status, f64)> {
    Ok((if ok { Status::Pass } else { Status::Fail }, metric))
}

fn balanced() -> InterferometerConfig {
    InterferometerConfig::from_c2_sq(0.5, 0.0).expect("balanced config is valid")
}

fn bath_at(ratio: f64) -> BathSpec {
    BathSpec::from_ratio(OMEGA, ratio, GAMMA0, CUTOFF_RATIO).expect("pinned bath is valid")
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn max_entry_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// The grid of splitter transmissions and occupations shared by the
/// entropy and ergotropy oracle checks.
fn transmission_occupation_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for k in 1..=9 {
        for nbar in [0.0, 0.5, 1.0, 5.0, 40.0] {
            grid.push((k as f64 / 10.0, nbar));
        }
    }
    grid
}

/// At full off-diagonal survival the closed form must coincide with the
/// splitter-conjugated input state, entry by entry.
fn check_t0_endpoint(_: &RunConfig) -> Result<(Status, f64)> {
    let complex_cfg = InterferometerConfig::new(
        C64::new(0.4, 0.3) * (std::f64::consts::FRAC_1_SQRT_2 / 0.5),
        C64::new(0.6, -0.2) * (std::f64::consts::FRAC_1_SQRT_2 / 0.4f64.sqrt()),
        1.2,
        6.0,
    )?;
    let configs = [
        balanced(),
        InterferometerConfig::from_c2_sq(0.6, 0.9)?,
        complex_cfg,
    ];
    let mut worst = 0.0f64;
    for cfg in &configs {
        for nbar in [0.0, 1.3] {
            let closed = closed_form_matrix(cfg, DecoherenceFactor::new(1.0)?, nbar)?;
            let conjugated = apply_bs3(&initial_density(cfg))?;
            worst = worst.max(max_entry_deviation(&closed, conjugated.matrix()));
        }
    }
    pass_if(worst <= ENDPOINT_TOL, worst)
}

/// Fully decohered entropy: eigendecomposition of the stationary matrix
/// against the closed-form expression.
fn check_stationary_entropy(_: &RunConfig) -> Result<(Status, f64)> {
    let mut worst = 0.0f64;
    for (c2_sq, nbar) in transmission_occupation_grid() {
        let cfg = InterferometerConfig::from_c2_sq(c2_sq, 0.4)?;
        let rho = DensityMatrix::new(closed_form_matrix(
            &cfg,
            DecoherenceFactor::complete(),
            nbar,
        )?)?;
        let direct = von_neumann_entropy(&rho)?;
        let closed = entropy_infinity_from_occupation(&cfg, nbar)?;
        worst = worst.max((direct - closed).abs());
    }
    pass_if(worst <= ENTROPY_ORACLE_TOL, worst)
}

/// At the room-temperature ratio the Clausius functional stays
/// nonnegative along the whole sweep, including completed decoherence.
fn check_room_nonnegative(_: &RunConfig) -> Result<(Status, f64)> {
    let cfg = balanced();
    let bath = bath_at(ROOM_RATIO);
    let mut min_f = f64::INFINITY;
    for t in log_grid(1e-9, 1e-7, 60).into_iter().chain([f64::INFINITY]) {
        min_f = min_f.min(clausius_function(&cfg, &bath, t)?.f_nats);
    }
    pass_if(min_f >= -NONNEGATIVITY_GUARD, min_f)
}

/// At the cold ratio the functional diverges far below zero.
fn check_cold_divergence(_: &RunConfig) -> Result<(Status, f64)> {
    let record = clausius_function(&balanced(), &bath_at(COLD_RATIO), f64::INFINITY)?;
    pass_if(record.f_nats < -COLD_VIOLATION_FLOOR, record.f_nats)
}

/// The violation onset sits near eight bits of entropy per absorbed
/// quantum of heat.
fn check_crossover_location(_: &RunConfig) -> Result<(Status, f64)> {
    let x_star = violation_crossover(&balanced(), OMEGA, 0.0)?;
    let reference = 8.0 * std::f64::consts::LN_2;
    pass_if((x_star / reference - 1.0).abs() <= CROSSOVER_WINDOW, x_star)
}

/// The completed-decoherence functional falls monotonically with the
/// frequency/temperature ratio.
fn check_crossover_monotone(_: &RunConfig) -> Result<(Status, f64)> {
    let cfg = balanced();
    let values: Vec<f64> = log_grid(0.05, 50.0, 50)
        .into_iter()
        .map(|x| f_infinity_dimensionless(&cfg, 0.0, x))
        .collect::<clausius::Result<_>>()?;
    let max_rise = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    pass_if(max_rise < 0.0, max_rise)
}

/// Room-temperature off-diagonal survival after 100 ns is far below the
/// visibility threshold: the fringe family has died.
fn check_room_eta(_: &RunConfig) -> Result<(Status, f64)> {
    let rates = asymptotic_rates(&bath_at(ROOM_RATIO))?;
    let eta = DecoherenceFactor::from_rates(&rates, 1e-7)?.value();
    pass_if(eta < ETA_VANISH_THRESHOLD, eta)
}

/// Cold bath, completed decoherence: the surviving fringe amplitude is
/// exactly the transmission over the thermal width.
fn check_cold_residual(_: &RunConfig) -> Result<(Status, f64)> {
    let cfg = balanced();
    let bath = bath_at(COLD_RATIO);
    let nbar = mean_occupation(bath.omega, bath.temperature)?;
    let d = cfg.delta() / OMEGA.sqrt();
    let p_star = std::f64::consts::FRAC_PI_2 / d;
    let pr = fringe_profile(&cfg, DecoherenceFactor::complete(), nbar, OMEGA, p_star)?;
    let amplitude = 1.0 - pr / gaussian_envelope(OMEGA, p_star);
    let expected = cfg.c2_sq() / (2.0 * nbar + 1.0);
    let deviation = (amplitude - expected).abs();
    pass_if(deviation <= RESIDUAL_FRINGE_TOL, deviation)
}

/// The detector density integrates to one at zero phase (up to the
/// envelope tail cut by the finite path difference).
fn check_fringe_normalization(_: &RunConfig) -> Result<(Status, f64)> {
    let cfg = balanced();
    let rates = asymptotic_rates(&bath_at(ROOM_RATIO))?;
    let eta = DecoherenceFactor::new(0.6)?;
    let half = 8.0 * OMEGA.sqrt();
    let panels = 2000;
    let h = 2.0 * half / panels as f64;
    let mut total = 0.0;
    for k in 0..=panels {
        let p = -half + k as f64 * h;
        let weight = if k == 0 || k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        total += weight * fringe_profile(&cfg, eta, rates.nbar, OMEGA, p)?;
    }
    total *= h / 3.0;
    let tolerance = 2.0 * (-cfg.delta() * cfg.delta() / 4.0).exp() + 1e-8;
    let deviation = (total - 1.0).abs();
    pass_if(deviation <= tolerance, deviation)
}

fn excited_two_level() -> DensityMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(1, 1)] = C64::new(1.0, 0.0);
    DensityMatrix::new(m).expect("projector is a state")
}

fn plus_two_level() -> DensityMatrix {
    let m = CMatrix::from_element(2, 2, C64::new(0.5, 0.0));
    DensityMatrix::new(m).expect("plus state is a state")
}

fn linear_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

/// Truncated two-level ladder relaxes to the analytic occupation.
fn check_steady_state(_: &RunConfig) -> Result<(Status, f64)> {
    let (relaxation, nbar) = (1.0, 0.7);
    let generator = LindbladGenerator::markovian(2, relaxation, nbar)?;
    let trajectory = evolve(&excited_two_level(), &generator, &linear_grid(10.0, 20))?;
    let target = nbar / (2.0 * nbar + 1.0);
    let got = trajectory.final_state().populations()[1];
    let rel = (got - target).abs() / target;
    pass_if(rel <= TWO_LEVEL_REL_TOL, rel)
}

/// Two-level coherence decays at half the population rate, matching the
/// analytic exponential along the whole trajectory.
fn check_coherence_decay(_: &RunConfig) -> Result<(Status, f64)> {
    let (relaxation, nbar) = (1.0, 0.7);
    let width = 2.0 * nbar + 1.0;
    let generator = LindbladGenerator::markovian(2, relaxation, nbar)?;
    let trajectory = evolve(&plus_two_level(), &generator, &linear_grid(1.0, 10))?;
    let mut worst = 0.0f64;
    for point in &trajectory.points {
        let expected = 0.5 * (-relaxation * width * point.t).exp();
        let got = point.rho.matrix()[(0, 1)].norm();
        worst = worst.max((got - expected).abs() / expected);
    }
    pass_if(worst <= TWO_LEVEL_REL_TOL, worst)
}

/// Integrator bookkeeping: trace drift along a representative trajectory.
fn check_trace_drift(_: &RunConfig) -> Result<(Status, f64)> {
    let generator = LindbladGenerator::markovian(2, 1.0, 0.7)?;
    let trajectory = evolve(&excited_two_level(), &generator, &linear_grid(10.0, 20))?;
    let worst = trajectory
        .points
        .iter()
        .map(|p| p.trace_drift)
        .fold(0.0, f64::max);
    pass_if(worst <= TRACE_DRIFT_TOL, worst)
}

/// Halving the step cap moves the final state by less than the
/// convergence budget: the integrator is in its asymptotic regime.
fn check_step_halving(_: &RunConfig) -> Result<(Status, f64)> {
    let generator = LindbladGenerator::markovian(2, 1.0, 0.7)?;
    let grid = linear_grid(1.0, 4);
    let coarse = evolve_with_max_step(&excited_two_level(), &generator, &grid, 5e-3)?;
    let fine = evolve_with_max_step(&excited_two_level(), &generator, &grid, 2.5e-3)?;
    let deviation = max_entry_deviation(
        coarse.final_state().matrix(),
        fine.final_state().matrix(),
    );
    pass_if(deviation <= HALVING_TOL, deviation)
}

/// Integrated bath coefficients reach their long-time limits by twenty
/// cutoff times.
fn check_asymptotic_approach(_: &RunConfig) -> Result<(Status, f64)> {
    let spec = bath_at(ROOM_RATIO);
    let t = 20.0 / spec.cutoff;
    let (delta_t, gamma_t) = time_dependent_coefficients(&spec, t)?;
    let rates = asymptotic_rates(&spec)?;
    let worst = (delta_t / rates.delta - 1.0)
        .abs()
        .max((gamma_t / rates.gamma - 1.0).abs());
    pass_if(worst <= ASYMPTOTIC_APPROACH_TOL, worst)
}

/// Positivity of the instantaneous relaxation channels on a sampled grid
/// spanning the cutoff transient through the stationary regime.
fn check_rates_positive(_: &RunConfig) -> Result<(Status, f64)> {
    let spec = bath_at(ROOM_RATIO);
    let mut min_rate = f64::INFINITY;
    for t in log_grid(1e-2 / spec.cutoff, 50.0 / spec.cutoff, 40) {
        let (delta_t, gamma_t) = time_dependent_coefficients(&spec, t)?;
        min_rate = min_rate.min(delta_t - gamma_t).min(delta_t + gamma_t);
    }
    pass_if(min_rate > 0.0, min_rate)
}

/// Adaptive quadrature of the dissipation kernel against its analytic
/// exponential form.
fn check_kernel_quadrature(_: &RunConfig) -> Result<(Status, f64)> {
    let spec = bath_at(ROOM_RATIO);
    let mut worst = 0.0f64;
    for scaled_tau in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let tau = scaled_tau / spec.cutoff;
        let integrated = dissipation_kernel_quadrature(&spec, tau)?;
        let analytic = dissipation_kernel(&spec, tau)?;
        worst = worst.max((integrated / analytic - 1.0).abs());
    }
    pass_if(worst <= KERNEL_REL_TOL, worst)
}

fn coherence_curves() -> Result<Vec<Vec<f64>>> {
    let cfg = InterferometerConfig::from_c2_sq(0.6, 0.0)?;
    let grid = log_grid(1e-9, 1e-7, 200);
    let mut curves = Vec::new();
    for ratio in FIGURE_RATIOS {
        let bath = bath_at(ratio);
        let mut curve = Vec::with_capacity(grid.len());
        for &t in &grid {
            curve.push(distillable_coherence(&closed_form_state(&cfg, &bath, t)?)?);
        }
        curves.push(curve);
    }
    Ok(curves)
}

/// Distillable coherence never grows along any of the figure-grid decay
/// curves.
fn check_coherence_monotone(_: &RunConfig) -> Result<(Status, f64)> {
    let mut max_rise = f64::NEG_INFINITY;
    for curve in coherence_curves()? {
        for w in curve.windows(2) {
            max_rise = max_rise.max(w[1] - w[0]);
        }
    }
    pass_if(max_rise <= MONOTONE_GUARD, max_rise)
}

/// At any shared time, the colder bath retains at least as much
/// coherence as the warmer one.
fn check_temperature_order(_: &RunConfig) -> Result<(Status, f64)> {
    let curves = coherence_curves()?;
    let mut min_margin = f64::INFINITY;
    for pair in curves.windows(2) {
        for (warm, cold) in pair[0].iter().zip(&pair[1]) {
            min_margin = min_margin.min(cold - warm);
        }
    }
    pass_if(min_margin >= -ORDER_GUARD, min_margin)
}

/// The sampled postulate audit of the coherence measure.
fn check_postulates(cfg: &RunConfig) -> Result<(Status, f64)> {
    let suite = SuiteConfig {
        samples: 200,
        dim: 3,
        seed: cfg.seed,
    };
    match coherence_postulate_suite(distillable_coherence, &suite) {
        // worst margin toward a violation across the five postulates; a
        // clean run sits at eigensolver-noise level
        Ok(report) => {
            let worst = (-report.min_value)
                .max(report.max_dephased_value.abs())
                .max(report.max_convexity_excess)
                .max(report.max_uniqueness_deviation)
                .max(report.max_additivity_deviation);
            Ok((Status::Pass, worst))
        }
        Err(clausius::Error::PostulateViolation { margin, .. }) => Ok((Status::Fail, margin)),
        Err(other) => Err(other.into()),
    }
}

/// Sort-based ergotropy of the decohered state against the closed form,
/// across the transmission/occupation grid inside the ordering regime.
fn check_ergotropy_grid(_: &RunConfig) -> Result<(Status, f64)> {
    let hamiltonian = clausius::coherence::default_hamiltonian(1.0)?;
    let mut worst = 0.0f64;
    for (c2_sq, nbar) in transmission_occupation_grid() {
        let cfg = InterferometerConfig::from_c2_sq(c2_sq, 0.0)?;
        if !in_ordering_regime(&cfg, nbar) {
            continue;
        }
        let rho = DensityMatrix::new(closed_form_matrix(
            &cfg,
            DecoherenceFactor::complete(),
            nbar,
        )?)?;
        let sorted = ergotropy(&rho, &hamiltonian)?;
        let closed = ergotropy_closed_form_units(&cfg, nbar)?;
        worst = worst.max((sorted - closed).abs() / closed);
    }
    pass_if(worst <= ERGOTROPY_REL_TOL, worst)
}

/// Sort-based ergotropy against the exhaustive six-permutation oracle on
/// seeded random three-level states.
fn check_permutation_oracle(cfg: &RunConfig) -> Result<(Status, f64)> {
    let hamiltonian = clausius::coherence::default_hamiltonian(1.0)?;
    let energies = [0.5, 1.5, 2.5];
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_STATES {
        let rho = random_density_matrix(&mut rng, 3)?;
        let sorted = ergotropy(&rho, &hamiltonian)?;
        let eigs = eig_hermitian(rho.matrix())?.eigenvalues;
        let input_energy = (rho.matrix() * hamiltonian.matrix()).trace().re;
        let brute = perms
            .iter()
            .map(|p| {
                let arranged: f64 = (0..3).map(|i| eigs[p[i]] * energies[i]).sum();
                input_energy - arranged
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((sorted - brute).abs());
    }
    pass_if(worst <= ORACLE_ABS_TOL, worst)
}

/// Informational: heat from finite-differencing the quadrature variances
/// against the closed form. The two routes share the printed variances,
/// so this measures integrator error only.
fn check_heat_routes(_: &RunConfig) -> Result<(Status, f64)> {
    let cfg = InterferometerConfig::from_c2_sq(0.5, 0.4)?;
    let bath = bath_at(ROOM_RATIO);
    let rates = asymptotic_rates(&bath)?;
    let span = 5.0 / (rates.relaxation * (2.0 * rates.nbar + 1.0));
    let n = 2048;
    let grid: Vec<f64> = (0..=n).map(|k| span * k as f64 / n as f64).collect();
    let cumulative = heat_from_quadratures(&cfg, &bath, &grid)?;
    let closed = heat_closed_form(&cfg, &bath, span)?;
    let rel = (cumulative.last().unwrap() - closed).abs() / closed.abs();
    Ok((Status::Info, rel))
}

/// Informational: the trace-route heat over the closed-form heat. The
/// truncated trace route disagrees with the closed form by a fixed factor
/// of -2; the report pins that ratio rather than hiding it.
fn check_trace_route(_: &RunConfig) -> Result<(Status, f64)> {
    let cfg = InterferometerConfig::from_c2_sq(0.5, 0.4)?;
    let bath = bath_at(ROOM_RATIO);
    let t = 2e-8;
    let ratio = heat_from_state_trace(&cfg, &bath, t)? / heat_closed_form(&cfg, &bath, t)?;
    Ok((Status::Info, ratio))
}
