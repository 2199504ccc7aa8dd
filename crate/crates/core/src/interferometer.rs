//! Three-branch interferometer algebra: energy-raising gates, the output
//! beamsplitter, the closed-form time-dependent state of the configuration
//! whose two transmitted branches thermalize, and the momentum-space fringe
//! profile at the detectors.
//!
//! Basis convention: after the input splitter and the gates the three
//! occupied branch states are relabeled `|0>`, `|1>`, `|2>`, so every
//! operator here is 3x3 (the gates themselves act on the 4-level space they
//! are defined in).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Complex;

use crate::bath::{asymptotic_rates, BathSpec, RateSet};
use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, DensityMatrix, OperatorMatrix, C64};

/// Default dimensionless path difference (`delta = d sqrt(omega)`): enough
/// fringes inside the Gaussian envelope to resolve the pattern by eye.
pub const DELTA_DEFAULT: f64 = 6.0;
/// Amplitudes must satisfy |C1|^2 + |C2|^2 = 1 within this tolerance.
pub const AMPLITUDE_NORM_TOL: f64 = 1e-12;
/// Eigenvalues of the closed-form state below this are reported as a model
/// inconsistency rather than clamped.
pub const PSD_REPORT_FLOOR: f64 = -1e-10;

/// Splitter amplitudes and geometry of one interferometer run.
///
/// `c1` is the reflected amplitude at the input splitter, `c2` the
/// transmitted one, `phi` the controllable phase on the middle branch, and
/// `delta` the dimensionless optical path difference entering the fringe
/// pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferometerConfig {
    c1: C64,
    c2: C64,
    phi: f64,
    delta: f64,
}

impl InterferometerConfig {
    pub fn new(c1: C64, c2: C64, phi: f64, delta: f64) -> Result<Self> {
        for (name, value) in [("phi", phi), ("delta", delta)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        if !(c1.re.is_finite() && c1.im.is_finite() && c2.re.is_finite() && c2.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                value: f64::NAN,
                reason: "amplitudes must be finite",
            });
        }
        let norm = c1.norm_sqr() + c2.norm_sqr();
        if (norm - 1.0).abs() > AMPLITUDE_NORM_TOL {
            return Err(Error::InvalidState {
                reason: "splitter amplitudes are not normalized",
                metric: (norm - 1.0).abs(),
            });
        }
        Ok(Self { c1, c2, phi, delta })
    }

    /// Real-amplitude config with transmission probability `c2_sq` and the
    /// default path difference.
    pub fn from_c2_sq(c2_sq: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c2_sq) {
            return Err(Error::InvalidParameter {
                name: "c2_sq",
                value: c2_sq,
                reason: "transmission probability must lie in [0, 1]",
            });
        }
        Self::new(
            Complex::new((1.0 - c2_sq).sqrt(), 0.0),
            Complex::new(c2_sq.sqrt(), 0.0),
            phi,
            DELTA_DEFAULT,
        )
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.c1, self.c2, self.phi, delta)
    }

    pub fn c1(&self) -> C64 {
        self.c1
    }

    pub fn c2(&self) -> C64 {
        self.c2
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c1_sq(&self) -> f64 {
        self.c1.norm_sqr()
    }

    pub fn c2_sq(&self) -> f64 {
        self.c2.norm_sqr()
    }

    /// Modulus of `C1 C2*` (fringe contrast prefactor).
    pub fn z(&self) -> f64 {
        (self.c1 * self.c2.conj()).norm()
    }

    /// Argument of `C1 C2*`; zero for degenerate (single-branch) configs.
    pub fn theta(&self) -> f64 {
        let w = self.c1 * self.c2.conj();
        if w.norm() == 0.0 {
            0.0
        } else {
            w.arg()
        }
    }
}

/// Off-diagonal survival factor `exp(-G t (2 nbar + 1))`, in `[0, 1]`.
///
/// Mathematically the factor never reaches zero at finite time, but the
/// completed-decoherence limit (`t = inf`) is representable and useful, so
/// zero is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceFactor {
    eta: f64,
}

impl DecoherenceFactor {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "decoherence factor must lie in [0, 1]",
            });
        }
        Ok(Self { eta })
    }

    /// Factor after evolving for `t` (seconds; `inf` allowed) under the
    /// given stationary rates.
    pub fn from_rates(rates: &RateSet, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                reason: "time must be nonnegative",
            });
        }
        Ok(Self {
            eta: (-rates.relaxation * t * (2.0 * rates.nbar + 1.0)).exp(),
        })
    }

    /// The completed-decoherence limit, `eta = 0`.
    pub fn complete() -> Self {
        Self { eta: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.eta
    }
}

/// The two printed 4x4 energy-raising gates: the first swaps levels 1 and 2,
/// the second levels 1 and 3. Both are self-inverse permutations.
pub fn gates_u1_u2() -> (OperatorMatrix, OperatorMatrix) {
    let mut u1 = CMatrix::zeros(4, 4);
    let mut u2 = CMatrix::zeros(4, 4);
    let one = Complex::new(1.0, 0.0);
    for (m, pairs) in [(&mut u1, (1usize, 2usize)), (&mut u2, (1, 3))] {
        m[(0, 0)] = one;
        m[(pairs.0, pairs.1)] = one;
        m[(pairs.1, pairs.0)] = one;
        for k in 0..4 {
            if k != 0 && k != pairs.0 && k != pairs.1 {
                m[(k, k)] = one;
            }
        }
    }
    (
        OperatorMatrix::new(u1).expect("permutation matrices are valid operators"),
        OperatorMatrix::new(u2).expect("permutation matrices are valid operators"),
    )
}

/// State of the system just before bath contact, in the relabeled branch
/// basis: `(C1, C2 e^{i phi}/sqrt 2, i C2/sqrt 2)`.
pub fn initial_state(cfg: &InterferometerConfig) -> CVector {
    let phase = Complex::new(0.0, cfg.phi).exp();
    CVector::from_vec(vec![
        cfg.c1,
        cfg.c2 * phase * Complex::new(FRAC_1_SQRT_2, 0.0),
        C64::i() * cfg.c2 * Complex::new(FRAC_1_SQRT_2, 0.0),
    ])
}

/// Pure-state projector onto [`initial_state`].
pub fn initial_density(cfg: &InterferometerConfig) -> DensityMatrix {
    DensityMatrix::from_pure(&initial_state(cfg))
        .expect("a valid config produces a normalized branch state")
}

/// The output 50:50 splitter acting on the two transmitted branches
/// (identity on the reflected one): `diag-block(1, [[1, i], [i, 1]]/sqrt 2)`.
pub fn splitter_bs3() -> OperatorMatrix {
    let s = Complex::new(FRAC_1_SQRT_2, 0.0);
    let is = C64::i() * s;
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let v = CMatrix::from_row_slice(3, 3, &[one, zero, zero, zero, s, is, zero, is, s]);
    OperatorMatrix::new(v).expect("the splitter is a fixed valid operator")
}

/// Conjugate a 3x3 state by the output splitter: `V rho V^dagger`.
pub fn apply_bs3(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 3 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 3,
        });
    }
    let v = splitter_bs3();
    let out = v.matrix() * rho.matrix() * v.matrix().adjoint();
    DensityMatrix::new(out)
}

/// The closed-form density matrix of the partially-thermalized run, as a raw
/// matrix (Hermitian with unit trace by construction; positivity is *not*
/// checked here — see [`closed_form_state`]).
///
/// Entry pattern, with `eta` the decoherence factor and `k = 1/(2 nbar + 1)`:
/// the reflected population `|C1|^2` is frozen; branch cross terms decay as
/// `eta^{1/2}`; the transmitted populations breathe as `1 -+ eta cos phi`;
/// and the transmitted cross term combines a fringe part `eta sin phi / 2`
/// with a bath-built imaginary part `(eta^2 - 1) k / 2`.
pub fn closed_form_matrix(
    cfg: &InterferometerConfig,
    eta: DecoherenceFactor,
    nbar: f64,
) -> Result<CMatrix> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "nbar",
            value: nbar,
            reason: "occupation must be nonnegative and finite",
        });
    }
    let e = eta.value();
    let root = e.sqrt();
    let cross = cfg.c1 * cfg.c2.conj();
    let c2_sq = cfg.c2_sq();
    let phase_m = Complex::new(0.0, -cfg.phi).exp();
    let one = Complex::new(1.0, 0.0);
    let half_root = Complex::new(0.5 * root, 0.0);

    let m01 = cross * half_root * (phase_m - one);
    let m02 = -C64::i() * cross * half_root * (phase_m + one);
    let m12 = Complex::new(
        0.5 * c2_sq * e * cfg.phi.sin(),
        c2_sq * (e * e - 1.0) / (2.0 * (2.0 * nbar + 1.0)),
    );

    let mut m = CMatrix::zeros(3, 3);
    m[(0, 0)] = Complex::new(cfg.c1_sq(), 0.0);
    m[(1, 1)] = Complex::new(0.5 * c2_sq * (1.0 - e * cfg.phi.cos()), 0.0);
    m[(2, 2)] = Complex::new(0.5 * c2_sq * (1.0 + e * cfg.phi.cos()), 0.0);
    m[(0, 1)] = m01;
    m[(1, 0)] = m01.conj();
    m[(0, 2)] = m02;
    m[(2, 0)] = m02.conj();
    m[(1, 2)] = m12;
    m[(2, 1)] = m12.conj();
    Ok(m)
}

/// [`closed_form_matrix`] validated as a state.
///
/// The closed form is not positive semidefinite for every parameter choice
/// (cold baths push an eigenvalue negative at intermediate times); such
/// points are reported as [`Error::ModelInconsistency`] carrying the
/// offending eigenvalue, never silently clamped. `t` is only used to label
/// that report.
pub fn closed_form_state_at(
    cfg: &InterferometerConfig,
    eta: DecoherenceFactor,
    nbar: f64,
    t: f64,
) -> Result<DensityMatrix> {
    let m = closed_form_matrix(cfg, eta, nbar)?;
    let min_eig = m
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < PSD_REPORT_FLOOR {
        return Err(Error::ModelInconsistency {
            t,
            min_eigenvalue: min_eig,
        });
    }
    DensityMatrix::new(m)
}

/// Closed-form state after evolving for `t` seconds against `bath`
/// (stationary rates; `t = inf` gives the fully decohered state).
pub fn closed_form_state(
    cfg: &InterferometerConfig,
    bath: &BathSpec,
    t: f64,
) -> Result<DensityMatrix> {
    let rates = asymptotic_rates(bath)?;
    let eta = DecoherenceFactor::from_rates(&rates, t)?;
    closed_form_state_at(cfg, eta, rates.nbar, t)
}

/// The completed-decoherence state: branch cross terms gone, transmitted
/// populations equalized, and a residual bath-built coherence
/// `-+ i |C2|^2 / (2 (2 nbar + 1))` between the transmitted branches.
pub fn stationary_state(cfg: &InterferometerConfig, nbar: f64) -> Result<DensityMatrix> {
    closed_form_state_at(cfg, DecoherenceFactor::complete(), nbar, f64::INFINITY)
}

/// Fringe bracket coefficients `(B_cos, B_sin)` multiplying
/// `cos(P d / 2)` and `sin(P d / 2)` in the detector pattern.
pub fn fringe_brackets(cfg: &InterferometerConfig) -> (f64, f64) {
    let th = cfg.theta();
    let rel = cfg.phi - th;
    let common = th.sin() - th.cos();
    (common + rel.cos() - rel.sin(), common + rel.sin() - rel.cos())
}

/// Ground-envelope momentum density `sqrt(1/(omega pi)) exp(-P^2/omega)`.
pub fn gaussian_envelope(omega: f64, p: f64) -> f64 {
    (1.0 / (omega * PI)).sqrt() * (-p * p / omega).exp()
}

/// Detector-plane probability density at momentum `p`, given the decoherence
/// factor and occupation directly.
///
/// The pattern is the Gaussian envelope times
/// `1 + Z eta^{1/2} (B_cos cos(Pd/2) + B_sin sin(Pd/2))
///    + |C2|^2 (eta sin phi cos(Pd) + (eta^2 - 1)/(2 nbar + 1) sin(Pd))`
/// with `d = delta / sqrt(omega)`. The `Z`-terms and the `sin phi` term are
/// the decohering fringes; the `(eta^2 - 1)` term is the bath-built fringe
/// that survives `eta -> 0` when the bath is cold.
pub fn fringe_profile(
    cfg: &InterferometerConfig,
    eta: DecoherenceFactor,
    nbar: f64,
    omega: f64,
    p: f64,
) -> Result<f64> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "nbar",
            value: nbar,
            reason: "occupation must be nonnegative and finite",
        });
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "oscillator frequency must be positive and finite",
        });
    }
    let e = eta.value();
    let d = cfg.delta / omega.sqrt();
    let (b_cos, b_sin) = fringe_brackets(cfg);
    let half = 0.5 * p * d;
    let full = p * d;
    let bracket = 1.0
        + cfg.z() * e.sqrt() * (half.cos() * b_cos + half.sin() * b_sin)
        + cfg.c2_sq()
            * (e * cfg.phi.sin() * full.cos() + (e * e - 1.0) / (2.0 * nbar + 1.0) * full.sin());
    Ok(gaussian_envelope(omega, p) * bracket)
}

/// Detector-plane probability density after evolving for `t` seconds
/// against `bath`.
pub fn interference_pattern(
    cfg: &InterferometerConfig,
    bath: &BathSpec,
    t: f64,
    p: f64,
) -> Result<f64> {
    let rates = asymptotic_rates(bath)?;
    let eta = DecoherenceFactor::from_rates(&rates, t)?;
    fringe_profile(cfg, eta, rates.nbar, bath.omega, p)
}
