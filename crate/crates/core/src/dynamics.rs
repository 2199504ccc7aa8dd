//! Lindblad generators for a damped oscillator mode on a truncated Fock
//! space, and a fixed-step trace-preserving integrator for density matrices.
//!
//! Two generator flavors share one dissipator structure:
//!
//! ```text
//! d rho/dt = d_down (2 a rho a+ - a+a rho - rho a+a)
//!          + d_up   (2 a+ rho a - aa+ rho - rho aa+)
//! ```
//!
//! The stationary flavor uses `d_down = G (nbar + 1)`, `d_up = G nbar`; the
//! secular flavor takes time-dependent coefficients `(Delta(t), gamma(t))`
//! and uses `d_down = (Delta + gamma)/2`, `d_up = (Delta - gamma)/2`. With
//! the identifications `Delta = G (2 nbar + 1)`, `gamma = G`, the two
//! coincide.
//!
//! Operator products are the products of the truncated ladder matrices, so
//! the top level closes the chain: diagonal dynamics satisfy detailed balance
//! with ratio `nbar / (nbar + 1)` at every link, including the last.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{ladder_operators, CMatrix, DensityMatrix};

/// Fraction of the fastest-rate time `1 / rate_scale` used as the RK4 step
/// cap; keeps local truncation error orders below the stated budgets.
pub const STEP_FRACTION: f64 = 0.01;
/// Trace drift (|Tr rho - 1|) accepted at an output point before the
/// integration is declared failed.
pub const TRACE_DRIFT_BUDGET: f64 = 1e-8;
/// Most negative eigenvalue accepted along a trajectory.
pub const EIGENVALUE_BUDGET: f64 = -1e-6;

type Coefficients = dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync;

enum Mode {
    /// Constant rates: dissipator prefactor and thermal occupation.
    Stationary { relaxation: f64, nbar: f64 },
    /// Time-dependent `(Delta(t), gamma(t))` with a caller-provided rate
    /// scale for step control.
    Secular {
        coefficients: Box<Coefficients>,
        rate_scale: f64,
    },
}

/// Dissipator of a damped oscillator mode with cached truncated operators.
///
/// Immutable after construction; evaluating the right-hand side never
/// mutates, so one generator may drive many trajectories.
pub struct LindbladGenerator {
    dim: usize,
    mode: Mode,
    a: CMatrix,
    adag: CMatrix,
    /// a+ a (number operator; exact on the truncated space)
    lower_weight: CMatrix,
    /// a a+ as a truncated product (top level reads 0, closing the chain)
    raise_weight: CMatrix,
}

impl LindbladGenerator {
    /// Constant-rate generator with dissipator prefactor `relaxation` and
    /// mean occupation `nbar`.
    pub fn markovian(dim: usize, relaxation: f64, nbar: f64) -> Result<Self> {
        if !(relaxation >= 0.0 && relaxation.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "relaxation",
                value: relaxation,
                reason: "dissipator rate must be nonnegative and finite",
            });
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "nbar",
                value: nbar,
                reason: "occupation must be nonnegative and finite",
            });
        }
        Self::with_mode(dim, Mode::Stationary { relaxation, nbar })
    }

    /// Generator driven by time-dependent coefficients `t -> (Delta, gamma)`.
    ///
    /// `rate_scale` bounds the integrator step (use the asymptotic
    /// `Delta + gamma` or any safe upper bound on the coefficients; 0 means
    /// no rate-based cap).
    pub fn secular<F>(dim: usize, rate_scale: f64, coefficients: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<(f64, f64)> + Send + Sync + 'static,
    {
        if !(rate_scale >= 0.0 && rate_scale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rate_scale",
                value: rate_scale,
                reason: "step-control rate must be nonnegative and finite",
            });
        }
        Self::with_mode(
            dim,
            Mode::Secular {
                coefficients: Box::new(coefficients),
                rate_scale,
            },
        )
    }

    fn with_mode(dim: usize, mode: Mode) -> Result<Self> {
        let (a, adag) = ladder_operators(dim)?;
        let a = a.into_matrix();
        let adag = adag.into_matrix();
        let lower_weight = &adag * &a;
        let raise_weight = &a * &adag;
        Ok(Self {
            dim,
            mode,
            a,
            adag,
            lower_weight,
            raise_weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Step cap implied by the generator's fastest rate (`inf` when rates
    /// vanish).
    pub fn max_step(&self) -> f64 {
        let rate = match &self.mode {
            Mode::Stationary { relaxation, nbar } => relaxation * (2.0 * nbar + 1.0),
            Mode::Secular { rate_scale, .. } => *rate_scale,
        };
        if rate > 0.0 {
            STEP_FRACTION / rate
        } else {
            f64::INFINITY
        }
    }

    /// Right-hand side at time `t` (the time only matters in secular mode).
    pub fn rhs(&self, rho: &CMatrix, t: f64) -> Result<CMatrix> {
        let (down, up) = match &self.mode {
            Mode::Stationary { relaxation, nbar } => {
                (relaxation * (nbar + 1.0), relaxation * nbar)
            }
            Mode::Secular { coefficients, .. } => {
                let (delta, gamma) = coefficients(t)?;
                (0.5 * (delta + gamma), 0.5 * (delta - gamma))
            }
        };
        self.dissipator(rho, down, up)
    }

    fn dissipator(&self, rho: &CMatrix, down: f64, up: f64) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                left: rho.nrows(),
                right: self.dim,
            });
        }
        let c_down = Complex::new(down, 0.0);
        let c_up = Complex::new(up, 0.0);
        let two = Complex::new(2.0, 0.0);

        let sandwich_down = &self.a * rho * &self.adag;
        let sandwich_up = &self.adag * rho * &self.a;
        let anti_down = &self.lower_weight * rho + rho * &self.lower_weight;
        let anti_up = &self.raise_weight * rho + rho * &self.raise_weight;

        Ok((sandwich_down * two - anti_down) * c_down + (sandwich_up * two - anti_up) * c_up)
    }
}

/// Right-hand side of the constant-rate master equation. Errors on a secular
/// generator: the caller asked for rates the generator does not hold.
pub fn markovian_rhs(gen: &LindbladGenerator, rho: &CMatrix) -> Result<CMatrix> {
    match gen.mode {
        Mode::Stationary { .. } => gen.rhs(rho, 0.0),
        Mode::Secular { .. } => Err(Error::InvalidParameter {
            name: "generator",
            value: f64::NAN,
            reason: "stationary right-hand side requested from a secular generator",
        }),
    }
}

/// Right-hand side of the secular master equation at time `t`. Errors on a
/// constant-rate generator.
pub fn secular_rhs(gen: &LindbladGenerator, rho: &CMatrix, t: f64) -> Result<CMatrix> {
    match gen.mode {
        Mode::Secular { .. } => gen.rhs(rho, t),
        Mode::Stationary { .. } => Err(Error::InvalidParameter {
            name: "generator",
            value: f64::NAN,
            reason: "secular right-hand side requested from a stationary generator",
        }),
    }
}

/// One recorded instant of an evolution.
#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub rho: DensityMatrix,
    /// |Tr rho - 1| before renormalization at this output point.
    pub trace_drift: f64,
    pub min_eigenvalue: f64,
}

/// Ordered output of [`evolve`]: strictly increasing times, each state
/// re-Hermitized and renormalized within the stated budgets.
#[derive(Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        &self
            .points
            .last()
            .expect("trajectories contain at least the initial point")
            .rho
    }
}

/// Integrate `d rho/dt = L(rho)` over `t_grid` (which must start at 0 and
/// increase strictly), recording the state at every grid point.
///
/// Classic fixed-step RK4 between grid points with step
/// `<= min(grid spacing, 0.01 / rate)`; fixed stepping keeps runs
/// bit-reproducible. After every step the state is symmetrized; at output
/// points it is renormalized if the trace drift is within 1e-8 (error
/// otherwise) and rejected if an eigenvalue falls below -1e-6.
pub fn evolve(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    t_grid: &[f64],
) -> Result<Trajectory> {
    evolve_with_max_step(rho0, gen, t_grid, gen.max_step())
}

/// [`evolve`] with an explicit step cap (used for convergence studies).
pub fn evolve_with_max_step(
    rho0: &DensityMatrix,
    gen: &LindbladGenerator,
    t_grid: &[f64],
    max_step: f64,
) -> Result<Trajectory> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: gen.dim(),
        });
    }
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            value: t_grid.first().copied().unwrap_or(f64::NAN),
            reason: "time grid must start at exactly 0",
        });
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            value: f64::NAN,
            reason: "time grid must increase strictly",
        });
    }
    if !(max_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "max_step",
            value: max_step,
            reason: "step cap must be positive",
        });
    }

    let mut rho = rho0.matrix().clone();
    let mut points = Vec::with_capacity(t_grid.len());
    points.push(TrajectoryPoint {
        t: 0.0,
        rho: rho0.clone(),
        trace_drift: 0.0,
        min_eigenvalue: min_eigenvalue(&rho),
    });

    for window in t_grid.windows(2) {
        let (t_from, t_to) = (window[0], window[1]);
        let span = t_to - t_from;
        let substeps = if max_step.is_finite() {
            (span / max_step).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = span / substeps as f64;
        for k in 0..substeps {
            let t = t_from + k as f64 * h;
            rho = rk4_step(gen, &rho, t, h)?;
            hermitize(&mut rho);
        }

        let trace = rho.trace();
        let drift = (trace.re - 1.0).abs().max(trace.im.abs());
        if !(drift < TRACE_DRIFT_BUDGET) {
            return Err(Error::IntegrationFailure {
                t: t_to,
                reason: "trace drift exceeded its budget",
                metric: drift,
            });
        }
        rho /= Complex::new(trace.re, 0.0);

        let min_eig = min_eigenvalue(&rho);
        if min_eig < EIGENVALUE_BUDGET {
            return Err(Error::IntegrationFailure {
                t: t_to,
                reason: "state developed a negative eigenvalue beyond its budget",
                metric: min_eig,
            });
        }

        points.push(TrajectoryPoint {
            t: t_to,
            rho: DensityMatrix::from_evolution(rho.clone(), EIGENVALUE_BUDGET)?,
            trace_drift: drift,
            min_eigenvalue: min_eig,
        });
    }

    Ok(Trajectory { points })
}

fn rk4_step(gen: &LindbladGenerator, rho: &CMatrix, t: f64, h: f64) -> Result<CMatrix> {
    let ch = |x: f64| Complex::new(x, 0.0);
    let k1 = gen.rhs(rho, t)?;
    let k2 = gen.rhs(&(rho + &k1 * ch(0.5 * h)), t + 0.5 * h)?;
    let k3 = gen.rhs(&(rho + &k2 * ch(0.5 * h)), t + 0.5 * h)?;
    let k4 = gen.rhs(&(rho + &k3 * ch(h)), t + h)?;
    Ok(rho + (k1 + k2 * ch(2.0) + k3 * ch(2.0) + k4) * ch(h / 6.0))
}

fn hermitize(rho: &mut CMatrix) {
    let sym = (&*rho + rho.adjoint()) * Complex::new(0.5, 0.0);
    *rho = sym;
}

fn min_eigenvalue(rho: &CMatrix) -> f64 {
    rho.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{random_density_matrix, CVector};
    use nalgebra::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn excited_two_level() -> DensityMatrix {
        let v = CVector::from_vec(vec![z(0.0, 0.0), z(1.0, 0.0)]);
        DensityMatrix::from_pure(&v).unwrap()
    }

    fn plus_two_level() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![z(s, 0.0), z(s, 0.0)]);
        DensityMatrix::from_pure(&v).unwrap()
    }

    fn linear_grid(t_end: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
    }

    #[test]
    fn rhs_annihilates_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for dim in [2usize, 4, 6] {
            let gen = LindbladGenerator::markovian(dim, 1.3, 0.8).unwrap();
            let sec = LindbladGenerator::secular(dim, 1.0, |_| Ok((2.0, 0.7))).unwrap();
            for _ in 0..20 {
                // random Hermitian, not necessarily positive
                let rho = random_density_matrix(&mut rng, dim).unwrap();
                let shifted = rho.matrix()
                    - CMatrix::identity(dim, dim) * z(0.3 / dim as f64, 0.0);
                for rhs in [
                    gen.rhs(&shifted, 0.0).unwrap(),
                    sec.rhs(&shifted, 0.4).unwrap(),
                ] {
                    let tr = rhs.trace();
                    assert!(tr.norm() < 1e-12, "trace leak {:.2e}", tr.norm());
                }
            }
        }
    }

    #[test]
    fn vacuum_is_stationary_at_zero_temperature() {
        let gen = LindbladGenerator::markovian(4, 2.0, 0.0).unwrap();
        let mut ground = CMatrix::zeros(4, 4);
        ground[(0, 0)] = z(1.0, 0.0);
        let rhs = markovian_rhs(&gen, &ground).unwrap();
        assert!(rhs.iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn two_level_rate_equation_structure() {
        // d rho_11/dt = -2 G (nbar+1) rho_11 + 2 G nbar rho_00
        let relaxation = 0.9;
        let nbar = 0.6;
        let gen = LindbladGenerator::markovian(2, relaxation, nbar).unwrap();
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = z(0.3, 0.0);
        rho[(1, 1)] = z(0.7, 0.0);
        let rhs = markovian_rhs(&gen, &rho).unwrap();
        let expected = -2.0 * relaxation * (nbar + 1.0) * 0.7 + 2.0 * relaxation * nbar * 0.3;
        assert!((rhs[(1, 1)].re - expected).abs() < 1e-14);
        assert!((rhs[(0, 0)].re + expected).abs() < 1e-14);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let stationary = LindbladGenerator::markovian(2, 1.0, 0.0).unwrap();
        let secular = LindbladGenerator::secular(2, 1.0, |_| Ok((1.0, 1.0))).unwrap();
        let rho = CMatrix::identity(2, 2) * z(0.5, 0.0);
        assert!(markovian_rhs(&stationary, &rho).is_ok());
        assert!(markovian_rhs(&secular, &rho).is_err());
        assert!(secular_rhs(&secular, &rho, 0.0).is_ok());
        assert!(secular_rhs(&stationary, &rho, 0.0).is_err());
        // dimension mismatch
        let big = CMatrix::identity(3, 3) * z(1.0 / 3.0, 0.0);
        assert!(stationary.rhs(&big, 0.0).is_err());
    }

    #[test]
    fn secular_with_constant_coefficients_matches_stationary() {
        let relaxation = 1.1;
        let nbar = 0.4;
        let delta = relaxation * (2.0 * nbar + 1.0);
        let gamma = relaxation;
        let stationary = LindbladGenerator::markovian(5, relaxation, nbar).unwrap();
        let secular = LindbladGenerator::secular(5, delta, move |_| Ok((delta, gamma))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let rho = random_density_matrix(&mut rng, 5).unwrap();
        let lhs = stationary.rhs(rho.matrix(), 0.0).unwrap();
        let rhs = secular.rhs(rho.matrix(), 12.3).unwrap();
        let dev = (&lhs - &rhs).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-14);
    }

    #[test]
    fn two_level_population_and_coherence_oracles() {
        let relaxation = 1.0;
        let nbar = 0.7;
        let width = 2.0 * nbar + 1.0;
        let gen = LindbladGenerator::markovian(2, relaxation, nbar).unwrap();

        // populations: rho_11(t) = s + (1 - s) e^(-2 G (2 nbar + 1) t)
        let grid = linear_grid(1.0, 10);
        let traj = evolve(&excited_two_level(), &gen, &grid).unwrap();
        let stationary = nbar / width;
        for point in &traj.points {
            let expected = stationary + (1.0 - stationary) * (-2.0 * relaxation * width * point.t).exp();
            let got = point.rho.matrix()[(1, 1)].re;
            assert!(
                (got - expected).abs() < 1e-6 * expected,
                "t={}: got {got:.9}, want {expected:.9}",
                point.t
            );
        }

        // coherences: |rho_01(t)| = 0.5 e^(-G (2 nbar + 1) t)
        let traj = evolve(&plus_two_level(), &gen, &grid).unwrap();
        for point in &traj.points {
            let expected = 0.5 * (-relaxation * width * point.t).exp();
            let got = point.rho.matrix()[(0, 1)].norm();
            assert!(
                (got - expected).abs() < 1e-6 * expected,
                "t={}: got {got:.9}, want {expected:.9}",
                point.t
            );
        }
    }

    #[test]
    fn two_level_steady_state() {
        let nbar = 1.3;
        let gen = LindbladGenerator::markovian(2, 1.0, nbar).unwrap();
        let t_end = 10.0;
        let traj = evolve(&excited_two_level(), &gen, &linear_grid(t_end, 4)).unwrap();
        let got = traj.final_state().matrix()[(1, 1)].re;
        assert!((got - nbar / (2.0 * nbar + 1.0)).abs() < 1e-8);
    }

    #[test]
    fn stationary_diagonal_is_gibbs() {
        // detailed balance on the truncated chain fixes every population
        // ratio at nbar/(nbar+1)
        let nbar = 1.0;
        let dim = 6;
        let gen = LindbladGenerator::markovian(dim, 1.0, nbar).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho0 = random_density_matrix(&mut rng, dim).unwrap();
        let traj = evolve(&rho0, &gen, &linear_grid(8.0, 8)).unwrap();
        let pops = traj.final_state().populations();
        let ratio = nbar / (nbar + 1.0);
        for n in 0..dim - 1 {
            let got = pops[n + 1] / pops[n];
            assert!(
                (got - ratio).abs() < 1e-6,
                "level {n}: ratio {got:.8} vs {ratio:.8}"
            );
        }
    }

    #[test]
    fn null_generator_freezes_the_state() {
        let gen = LindbladGenerator::markovian(3, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho0 = random_density_matrix(&mut rng, 3).unwrap();
        let traj = evolve(&rho0, &gen, &[0.0, 0.5, 1.0]).unwrap();
        for point in &traj.points {
            let dev = (point.rho.matrix() - rho0.matrix())
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-15);
        }
    }

    #[test]
    fn step_halving_is_converged() {
        let gen = LindbladGenerator::markovian(4, 1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let rho0 = random_density_matrix(&mut rng, 4).unwrap();
        let grid = linear_grid(2.0, 4);
        let coarse = evolve_with_max_step(&rho0, &gen, &grid, 5e-3).unwrap();
        let fine = evolve_with_max_step(&rho0, &gen, &grid, 2.5e-3).unwrap();
        let dev = (coarse.final_state().matrix() - fine.final_state().matrix())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-8, "halving changed the final state by {dev:.2e}");
    }

    #[test]
    fn secular_toy_coefficients_match_exponent_oracle() {
        // Delta(t) = gamma(t) = a (1 - cos b t) has an elementary integral;
        // with equal coefficients the upward channel closes and
        // rho_01(t) = rho_01(0) exp(-int Delta), rho_11(t) = rho_11(0) exp(-2 int Delta)
        let a = 1.7;
        let b = 3.0;
        let gen =
            LindbladGenerator::secular(2, 2.0 * a, move |t| Ok((a * (1.0 - (b * t).cos()), a * (1.0 - (b * t).cos()))))
                .unwrap();
        let mut rho0 = CMatrix::zeros(2, 2);
        rho0[(0, 0)] = z(0.4, 0.0);
        rho0[(1, 1)] = z(0.6, 0.0);
        rho0[(0, 1)] = z(0.35, 0.1);
        rho0[(1, 0)] = z(0.35, -0.1);
        let rho0 = DensityMatrix::new(rho0).unwrap();
        let grid = linear_grid(1.5, 6);
        let traj = evolve(&rho0, &gen, &grid).unwrap();
        for point in &traj.points {
            let integral = a * (point.t - (b * point.t).sin() / b);
            let want_01 = z(0.35, 0.1) * z((-integral).exp(), 0.0);
            let got_01 = point.rho.matrix()[(0, 1)];
            assert!((got_01 - want_01).norm() < 1e-7);
            let want_11 = 0.6 * (-2.0 * integral).exp();
            assert!((point.rho.matrix()[(1, 1)].re - want_11).abs() < 1e-7);
        }
    }

    #[test]
    fn trajectory_diagnostics_and_validation() {
        let gen = LindbladGenerator::markovian(3, 1.0, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let rho0 = random_density_matrix(&mut rng, 3).unwrap();
        let traj = evolve(&rho0, &gen, &linear_grid(1.0, 5)).unwrap();
        assert_eq!(traj.points.len(), 6);
        for w in traj.points.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        for point in &traj.points {
            assert!(point.trace_drift < TRACE_DRIFT_BUDGET);
            assert!(point.min_eigenvalue > EIGENVALUE_BUDGET);
        }

        // grid validation
        assert!(evolve(&rho0, &gen, &[0.1, 0.2]).is_err());
        assert!(evolve(&rho0, &gen, &[0.0, 0.2, 0.2]).is_err());
        assert!(evolve(&rho0, &gen, &[]).is_err());
        let wrong_dim = random_density_matrix(&mut rng, 4).unwrap();
        assert!(evolve(&wrong_dim, &gen, &[0.0, 1.0]).is_err());
    }
}
