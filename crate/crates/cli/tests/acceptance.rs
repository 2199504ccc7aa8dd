//! Release acceptance: ten end-to-end criteria, one test each. Every test
//! prints a `[criterion N] PASS` line with its measured margins (visible
//! under `--nocapture`); the tolerances pinned below are part of the
//! shipped contract.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clausius::bath::{
    asymptotic_rates, dissipation_kernel_quadrature, mean_occupation,
    time_dependent_coefficients, BathSpec,
};
use clausius::coherence::{
    coherence_postulate_suite, default_hamiltonian, distillable_coherence, ergotropy,
    ergotropy_closed_form_units, in_ordering_regime, SuiteConfig,
};
use clausius::dynamics::{evolve, evolve_with_max_step, LindbladGenerator};
use clausius::hilbert::{
    eig_hermitian, random_density_matrix, von_neumann_entropy, CMatrix, DensityMatrix, C64,
};
use clausius::interferometer::{
    apply_bs3, closed_form_matrix, closed_form_state, fringe_profile, gaussian_envelope,
    initial_density, stationary_state, DecoherenceFactor, InterferometerConfig,
};
use clausius::thermo::{
    clausius_function, entropy_infinity_from_occupation, f_infinity_dimensionless,
    violation_crossover,
};

// Numerical contract of the release. Loosening any of these is an API
// change, not a tweak.
const FLOAT_GUARD: f64 = 1e-12;
const COLD_MAGNITUDE_FLOOR: f64 = 1e10;
const CROSSOVER_WINDOW: f64 = 0.05;
const ENDPOINT_TOL: f64 = 1e-12;
const ENTROPY_TOL: f64 = 1e-10;
const ETA_THRESHOLD: f64 = 1e-3;
const RESIDUAL_TOL: f64 = 1e-10;
const MONOTONE_TOL: f64 = 1e-10;
const ORDER_TOL: f64 = 1e-12;
const ERGOTROPY_REL_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-12;
const ORACLE_STATES: usize = 500;
const DYNAMICS_REL_TOL: f64 = 1e-6;
const TRACE_DRIFT_TOL: f64 = 1e-8;
const HALVING_TOL: f64 = 1e-8;
const ASYMPTOTIC_TOL: f64 = 0.02;
const KERNEL_REL_TOL: f64 = 1e-6;
const POSTULATE_MARGIN: f64 = 1e-10;
const FAST_BUDGET: f64 = 1.0;
const VERIFY_BUDGET: f64 = 30.0;

const OMEGA: f64 = 1e12;
const ROOM_RATIO: f64 = 9.52;
const COLD_RATIO: f64 = 23.0;
const FIGURE_RATIOS: [f64; 5] = [9.52, 10.2, 10.6, 10.9, 11.1];

fn balanced() -> InterferometerConfig {
    InterferometerConfig::from_c2_sq(0.5, 0.0).unwrap()
}

fn bath(ratio: f64) -> BathSpec {
    BathSpec::from_ratio(OMEGA, ratio, 1e-3, 10.0).unwrap()
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

/// Defaults: the Clausius functional stays nonnegative at the
/// room-temperature ratio and diverges far below zero at the cold one.
#[test]
fn criterion_01_clausius_violation_reproduction() {
    let start = Instant::now();
    let cfg = balanced();

    let room = bath(ROOM_RATIO);
    let mut min_f = f64::INFINITY;
    for t in log_grid(1e-9, 1e-7, 60).into_iter().chain([f64::INFINITY]) {
        min_f = min_f.min(clausius_function(&cfg, &room, t).unwrap().f_nats);
    }
    assert!(min_f >= -FLOAT_GUARD, "F dipped to {min_f:.3e} at ratio 9.52");

    let cold_f = clausius_function(&cfg, &bath(COLD_RATIO), f64::INFINITY)
        .unwrap()
        .f_nats;
    assert!(cold_f < 0.0, "no violation at ratio 23: F = {cold_f:.3e}");
    assert!(
        cold_f.abs() > COLD_MAGNITUDE_FLOOR,
        "violation too small: |F| = {:.3e}",
        cold_f.abs()
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < FAST_BUDGET, "took {elapsed:.2} s");
    println!(
        "[criterion 1] PASS - min F(t) at ratio 9.52 = {min_f:.3e} nats; \
         F(inf) at ratio 23 = {cold_f:.3e} nats; {elapsed:.3} s"
    );
}

/// The violation onset for the balanced zero-phase run sits within 5% of
/// eight ln 2, and the completed-decoherence functional is monotone in
/// the frequency/temperature ratio.
#[test]
fn criterion_02_crossover_existence() {
    let start = Instant::now();
    let cfg = balanced();

    let x_star = violation_crossover(&cfg, OMEGA, 0.0).unwrap();
    let reference = 8.0 * std::f64::consts::LN_2;
    let offset = (x_star / reference - 1.0).abs();
    assert!(
        offset <= CROSSOVER_WINDOW,
        "x* = {x_star:.4} is {:.1}% from 8 ln 2",
        100.0 * offset
    );

    let values: Vec<f64> = log_grid(0.05, 50.0, 50)
        .into_iter()
        .map(|x| f_infinity_dimensionless(&cfg, 0.0, x).unwrap())
        .collect();
    for (i, w) in values.windows(2).enumerate() {
        assert!(
            w[1] < w[0],
            "F(inf) rose between scan points {i} and {}",
            i + 1
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < FAST_BUDGET, "took {elapsed:.2} s");
    println!(
        "[criterion 2] PASS - x* = {x_star:.4} ({pct:.2}% from 8 ln 2), \
         monotone on a 50-point scan; {elapsed:.3} s",
        pct = 100.0 * offset
    );
}

/// The closed-form state matches its two analytic endpoints: the
/// splitter-conjugated input at t = 0 and the printed stationary state
/// (with its entropy) at completed decoherence.
#[test]
fn criterion_03_closed_form_endpoints() {
    // t = 0: entrywise against the conjugated pure state
    let complex_cfg = InterferometerConfig::new(
        C64::new(0.4, 0.3) * (std::f64::consts::FRAC_1_SQRT_2 / 0.5),
        C64::new(0.6, -0.2) * (std::f64::consts::FRAC_1_SQRT_2 / 0.4f64.sqrt()),
        1.2,
        6.0,
    )
    .unwrap();
    let mut t0_dev = 0.0f64;
    for cfg in [
        balanced(),
        InterferometerConfig::from_c2_sq(0.6, 0.9).unwrap(),
        complex_cfg,
    ] {
        for nbar in [0.0, 1.3] {
            let closed = closed_form_matrix(&cfg, DecoherenceFactor::new(1.0).unwrap(), nbar)
                .unwrap();
            let conjugated = apply_bs3(&initial_density(&cfg)).unwrap();
            t0_dev = t0_dev.max(max_entry_deviation(&closed, conjugated.matrix()));
        }
    }
    assert!(t0_dev <= ENDPOINT_TOL, "t = 0 deviation {t0_dev:.3e}");

    // t -> inf: the exact stationary matrix, built by hand
    let (c2_sq, phi, nbar) = (0.6, 0.7, 1.3);
    let cfg = InterferometerConfig::from_c2_sq(c2_sq, phi).unwrap();
    let got = stationary_state(&cfg, nbar).unwrap();
    let mut expected = CMatrix::zeros(3, 3);
    expected[(0, 0)] = C64::new(1.0 - c2_sq, 0.0);
    expected[(1, 1)] = C64::new(0.5 * c2_sq, 0.0);
    expected[(2, 2)] = C64::new(0.5 * c2_sq, 0.0);
    expected[(1, 2)] = C64::new(0.0, -c2_sq / (2.0 * (2.0 * nbar + 1.0)));
    expected[(2, 1)] = expected[(1, 2)].conj();
    let inf_dev = max_entry_deviation(got.matrix(), &expected);
    assert!(inf_dev <= ENDPOINT_TOL, "stationary deviation {inf_dev:.3e}");

    // stationary entropy across the transmission/occupation grid
    let mut entropy_dev = 0.0f64;
    for k in 1..=9 {
        let cfg = InterferometerConfig::from_c2_sq(k as f64 / 10.0, 0.4).unwrap();
        for nbar in [0.0, 0.5, 1.0, 5.0, 40.0] {
            let direct = von_neumann_entropy(&stationary_state(&cfg, nbar).unwrap()).unwrap();
            let closed = entropy_infinity_from_occupation(&cfg, nbar).unwrap();
            entropy_dev = entropy_dev.max((direct - closed).abs());
        }
    }
    assert!(
        entropy_dev <= ENTROPY_TOL,
        "entropy oracle deviation {entropy_dev:.3e}"
    );
    println!(
        "[criterion 3] PASS - t=0 entrywise {t0_dev:.2e}, stationary entrywise \
         {inf_dev:.2e}, entropy oracle {entropy_dev:.2e} over the 9x5 grid"
    );
}

/// Fringe decay: after 100 ns at the room ratio the off-diagonal survival
/// factor scaling every interference term is below 1e-3, while the cold
/// completed-decoherence pattern keeps a residual fringe of amplitude
/// exactly the transmission over the thermal width.
#[test]
fn criterion_04_fringe_decay() {
    let rates = asymptotic_rates(&bath(ROOM_RATIO)).unwrap();
    let eta = DecoherenceFactor::from_rates(&rates, 1e-7).unwrap().value();
    assert!(
        eta < ETA_THRESHOLD,
        "survival factor still {eta:.3e} at t = 1e-7 s"
    );

    let cfg = balanced();
    let cold = bath(COLD_RATIO);
    let nbar = mean_occupation(cold.omega, cold.temperature).unwrap();
    let p_star = std::f64::consts::FRAC_PI_2 * OMEGA.sqrt() / cfg.delta();
    let pr = fringe_profile(&cfg, DecoherenceFactor::complete(), nbar, OMEGA, p_star).unwrap();
    let amplitude = 1.0 - pr / gaussian_envelope(OMEGA, p_star);
    let expected = cfg.c2_sq() / (2.0 * nbar + 1.0);
    let residual_dev = (amplitude - expected).abs();
    assert!(
        residual_dev <= RESIDUAL_TOL,
        "residual amplitude {amplitude:.12} vs {expected:.12}"
    );
    println!(
        "[criterion 4] PASS - room survival factor eta(1e-7 s) = {eta:.3e} < 1e-3; \
         cold residual fringe amplitude {amplitude:.6} matches to {residual_dev:.2e}"
    );
}

/// Distillable coherence decays monotonically at each figure temperature
/// and is ordered by temperature at every shared time.
#[test]
fn criterion_05_coherence_monotonicity() {
    let cfg = InterferometerConfig::from_c2_sq(0.6, 0.0).unwrap();
    let grid = log_grid(1e-9, 1e-7, 200);
    let curves: Vec<Vec<f64>> = FIGURE_RATIOS
        .iter()
        .map(|&ratio| {
            let b = bath(ratio);
            grid.iter()
                .map(|&t| distillable_coherence(&closed_form_state(&cfg, &b, t).unwrap()).unwrap())
                .collect()
        })
        .collect();

    let mut max_rise = f64::NEG_INFINITY;
    for curve in &curves {
        for w in curve.windows(2) {
            max_rise = max_rise.max(w[1] - w[0]);
        }
    }
    assert!(max_rise <= MONOTONE_TOL, "coherence rose by {max_rise:.3e}");

    let mut min_margin = f64::INFINITY;
    for pair in curves.windows(2) {
        for (warm, cold) in pair[0].iter().zip(&pair[1]) {
            min_margin = min_margin.min(cold - warm);
        }
    }
    assert!(
        min_margin >= -ORDER_TOL,
        "colder curve fell below warmer by {:.3e}",
        -min_margin
    );
    println!(
        "[criterion 5] PASS - 5 x 200-point curves nonincreasing (max rise \
         {max_rise:.2e}) and temperature-ordered (min margin {min_margin:.2e})"
    );
}

/// Sort-based ergotropy equals the closed form across the ordering-regime
/// grid and the exhaustive permutation oracle on random states.
#[test]
fn criterion_06_ergotropy_closed_form() {
    let hamiltonian = default_hamiltonian(1.0).unwrap();

    let mut grid_dev = 0.0f64;
    let mut grid_points = 0;
    for k in 1..=9 {
        let cfg = InterferometerConfig::from_c2_sq(k as f64 / 10.0, 0.0).unwrap();
        for nbar in [0.0, 0.5, 1.0, 5.0, 40.0] {
            if !in_ordering_regime(&cfg, nbar) {
                continue;
            }
            grid_points += 1;
            let sorted = ergotropy(&stationary_state(&cfg, nbar).unwrap(), &hamiltonian).unwrap();
            let closed = ergotropy_closed_form_units(&cfg, nbar).unwrap();
            grid_dev = grid_dev.max((sorted - closed).abs() / closed);
        }
    }
    assert!(
        grid_dev <= ERGOTROPY_REL_TOL,
        "closed-form deviation {grid_dev:.3e} over {grid_points} points"
    );

    let energies = [0.5, 1.5, 2.5];
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut oracle_dev = 0.0f64;
    for _ in 0..ORACLE_STATES {
        let rho = random_density_matrix(&mut rng, 3).unwrap();
        let sorted = ergotropy(&rho, &hamiltonian).unwrap();
        let eigs = eig_hermitian(rho.matrix()).unwrap().eigenvalues;
        let input_energy = (rho.matrix() * hamiltonian.matrix()).trace().re;
        let brute = perms
            .iter()
            .map(|p| input_energy - (0..3).map(|i| eigs[p[i]] * energies[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        oracle_dev = oracle_dev.max((sorted - brute).abs());
    }
    assert!(
        oracle_dev <= ORACLE_TOL,
        "permutation oracle deviation {oracle_dev:.3e}"
    );
    println!(
        "[criterion 6] PASS - closed form to {grid_dev:.2e} over {grid_points} \
         ordering-regime points; {ORACLE_STATES}-state permutation oracle to {oracle_dev:.2e}"
    );
}

/// The integrator reproduces the analytic two-level relaxation: steady
/// occupation, coherence decay rate, trace preservation, and step-halving
/// convergence.
#[test]
fn criterion_07_dynamics_oracle() {
    let (relaxation, nbar) = (1.0, 0.7);
    let width = 2.0 * nbar + 1.0;
    let generator = LindbladGenerator::markovian(2, relaxation, nbar).unwrap();

    let mut excited = CMatrix::zeros(2, 2);
    excited[(1, 1)] = C64::new(1.0, 0.0);
    let excited = DensityMatrix::new(excited).unwrap();
    let plus = DensityMatrix::new(CMatrix::from_element(2, 2, C64::new(0.5, 0.0))).unwrap();

    let long_grid: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
    let trajectory = evolve(&excited, &generator, &long_grid).unwrap();
    let target = nbar / width;
    let steady_rel = (trajectory.final_state().populations()[1] - target).abs() / target;
    assert!(steady_rel <= DYNAMICS_REL_TOL, "steady state off by {steady_rel:.3e}");

    let drift = trajectory
        .points
        .iter()
        .map(|p| p.trace_drift)
        .fold(0.0, f64::max);
    assert!(drift <= TRACE_DRIFT_TOL, "trace drift {drift:.3e}");

    let short_grid: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    let trajectory = evolve(&plus, &generator, &short_grid).unwrap();
    let mut decay_rel = 0.0f64;
    for point in &trajectory.points {
        let expected = 0.5 * (-relaxation * width * point.t).exp();
        let got = point.rho.matrix()[(0, 1)].norm();
        decay_rel = decay_rel.max((got - expected).abs() / expected);
    }
    assert!(decay_rel <= DYNAMICS_REL_TOL, "coherence decay off by {decay_rel:.3e}");

    let grid: Vec<f64> = (0..=4).map(|k| 0.25 * k as f64).collect();
    let coarse = evolve_with_max_step(&excited, &generator, &grid, 5e-3).unwrap();
    let fine = evolve_with_max_step(&excited, &generator, &grid, 2.5e-3).unwrap();
    let halving = max_entry_deviation(
        coarse.final_state().matrix(),
        fine.final_state().matrix(),
    );
    assert!(halving <= HALVING_TOL, "halving deviation {halving:.3e}");
    println!(
        "[criterion 7] PASS - steady state {steady_rel:.2e}, coherence decay \
         {decay_rel:.2e}, trace drift {drift:.2e}, step halving {halving:.2e}"
    );
}

/// Integrated bath coefficients reach the printed asymptotics, stay
/// jointly positive across the sampled transient, and the dissipation
/// kernel quadrature matches its analytic exponential.
#[test]
fn criterion_08_bath_coefficients() {
    let spec = bath(ROOM_RATIO);
    let rates = asymptotic_rates(&spec).unwrap();

    let t_late = 20.0 / spec.cutoff;
    let (delta_late, gamma_late) = time_dependent_coefficients(&spec, t_late).unwrap();
    let approach = (delta_late / rates.delta - 1.0)
        .abs()
        .max((gamma_late / rates.gamma - 1.0).abs());
    assert!(approach <= ASYMPTOTIC_TOL, "asymptotics off by {approach:.3e}");

    let mut min_rate = f64::INFINITY;
    for t in log_grid(1e-2 / spec.cutoff, 50.0 / spec.cutoff, 40) {
        let (delta_t, gamma_t) = time_dependent_coefficients(&spec, t).unwrap();
        min_rate = min_rate.min(delta_t - gamma_t).min(delta_t + gamma_t);
    }
    assert!(min_rate > 0.0, "rate combination dipped to {min_rate:.3e}");

    let mut kernel_rel = 0.0f64;
    for scaled_tau in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let tau = scaled_tau / spec.cutoff;
        let integrated = dissipation_kernel_quadrature(&spec, tau).unwrap();
        let analytic = spec.gamma0 * spec.cutoff * spec.cutoff * (-spec.cutoff * tau).exp();
        kernel_rel = kernel_rel.max((integrated / analytic - 1.0).abs());
    }
    assert!(kernel_rel <= KERNEL_REL_TOL, "kernel quadrature off by {kernel_rel:.3e}");
    println!(
        "[criterion 8] PASS - asymptotics reached to {approach:.2e} at 20 cutoff \
         times, rates positive (min {min_rate:.2e}), kernel quadrature to {kernel_rel:.2e}"
    );
}

/// The coherence measure passes the sampled postulate audit with margins
/// inside the contract bound.
#[test]
fn criterion_09_coherence_postulates() {
    let report = coherence_postulate_suite(
        distillable_coherence,
        &SuiteConfig {
            samples: 200,
            dim: 3,
            seed: 7,
        },
    )
    .unwrap();
    assert_eq!(report.samples, 200);
    assert!(report.min_value >= -POSTULATE_MARGIN);
    assert!(report.max_dephased_value.abs() <= POSTULATE_MARGIN);
    assert!(report.max_convexity_excess <= POSTULATE_MARGIN);
    assert!(report.max_uniqueness_deviation <= POSTULATE_MARGIN);
    assert!(report.max_additivity_deviation <= POSTULATE_MARGIN);
    let worst = (-report.min_value)
        .max(report.max_dephased_value.abs())
        .max(report.max_convexity_excess)
        .max(report.max_uniqueness_deviation)
        .max(report.max_additivity_deviation);
    println!(
        "[criterion 9] PASS - five postulates over 200 seeded states, worst \
         margin {worst:.2e}"
    );
}

/// The shipped binary is deterministic (byte-identical figure reruns) and
/// the verification suite exits clean inside its time budget.
#[test]
fn criterion_10_determinism_and_verify() {
    let binary = env!("CARGO_BIN_EXE_clausius");
    let repo_configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let scratch = std::env::temp_dir().join(format!("clausius-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&scratch).unwrap();

    let mut identical_figures = 0;
    for figure in ["fig4", "fig3b"] {
        let config = repo_configs.join(format!("{figure}.conf"));
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = scratch.join(format!("{figure}-run{run}.csv"));
            let status = Command::new(binary)
                .args(["figure", figure, "--config"])
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .status()
                .unwrap();
            assert!(status.success(), "{figure} run {run} exited {status}");
            outputs.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{figure} reruns differ");
        assert!(!outputs[0].is_empty());
        identical_figures += 1;
    }

    let start = Instant::now();
    let output = Command::new(binary).arg("verify").output().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        output.status.success(),
        "verify failed:\n{}",
        String::from_utf8_lossy(&output.stdout)
    );
    assert!(elapsed < VERIFY_BUDGET, "verify took {elapsed:.1} s");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("verify: ")));
    assert!(!stdout.contains(" fail "), "verify reported a failure:\n{stdout}");

    std::fs::remove_dir_all(&scratch).ok();
    println!(
        "[criterion 10] PASS - {identical_figures} figures byte-identical across \
         reruns; verify exited 0 in {elapsed:.2} s"
    );
}
