//! Thermal-bath physics for a damped oscillator: Ohmic spectral density with a
//! Lorentz-Drude cutoff, noise and dissipation kernels, the time-dependent
//! damping/diffusion coefficients built from them, their long-time asymptotic
//! rates, and temperature conversions.
//!
//! Conventions: all frequencies are angular (rad/s), temperatures are kelvin,
//! and the dimensionless group `hbar * omega / (k_B * T)` is the only way
//! temperature enters the physics.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;

/// Reduced Planck constant, J s (CODATA).
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant, J/K (CODATA).
pub const K_BOLTZMANN: f64 = 1.380649e-23;

/// The two dimensional constants the library depends on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// J s
    pub hbar: f64,
    /// J/K
    pub k_boltzmann: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            k_boltzmann: K_BOLTZMANN,
        }
    }
}

/// Above this coupling the second-order (weak-coupling) treatment behind the
/// rate formulas stops being trustworthy; see [`BathSpec::is_weak_coupling`].
pub const WEAK_COUPLING_LIMIT: f64 = 0.1;

/// An Ohmic bath with Lorentz-Drude cutoff attached to one oscillator mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    /// Dimensionless system-bath coupling.
    pub gamma0: f64,
    /// Drude cutoff frequency, rad/s.
    pub cutoff: f64,
    /// System oscillator frequency, rad/s.
    pub omega: f64,
    /// Bath temperature, kelvin.
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(gamma0: f64, cutoff: f64, omega: f64, temperature: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma0",
                value: gamma0,
                reason: "coupling must be positive and finite",
            });
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                value: cutoff,
                reason: "cutoff frequency must be positive and finite",
            });
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
                reason: "oscillator frequency must be positive and finite",
            });
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                value: temperature,
                reason: "temperature must be nonnegative and finite",
            });
        }
        Ok(Self {
            gamma0,
            cutoff,
            omega,
            temperature,
        })
    }

    /// Build a spec from the logarithmic frequency/temperature ratio used on
    /// sweep axes: `temperature = omega / 10^log10_ratio` and
    /// `cutoff = cutoff_ratio * omega`.
    pub fn from_ratio(
        omega: f64,
        log10_ratio: f64,
        gamma0: f64,
        cutoff_ratio: f64,
    ) -> Result<Self> {
        if !log10_ratio.is_finite() {
            return Err(Error::InvalidParameter {
                name: "log10_ratio",
                value: log10_ratio,
                reason: "ratio exponent must be finite",
            });
        }
        let temperature = temperature_from_log_ratio(omega, log10_ratio)?;
        Self::new(gamma0, cutoff_ratio * omega, omega, temperature)
    }

    /// Cutoff in units of the oscillator frequency.
    pub fn cutoff_ratio(&self) -> f64 {
        self.cutoff / self.omega
    }

    /// Whether the coupling is small enough for the second-order rate
    /// formulas. Callers should warn (not fail) when this is false.
    pub fn is_weak_coupling(&self) -> bool {
        self.gamma0 <= WEAK_COUPLING_LIMIT
    }

    /// Thermal frequency k_B T / hbar, rad/s.
    fn thermal_frequency(&self) -> f64 {
        K_BOLTZMANN * self.temperature / HBAR
    }
}

/// Long-time limits of the bath coefficients for one spec.
///
/// `gamma` and `relaxation` carry the same number; `gamma` is the long-time
/// damping coefficient, `relaxation` the prefactor of the stationary
/// dissipator. Both are exposed so call sites read in the role they mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSet {
    /// Diffusion coefficient limit, s^-1. Always >= `gamma`.
    pub delta: f64,
    /// Damping coefficient limit, s^-1.
    pub gamma: f64,
    /// Dissipator rate prefactor, s^-1 (numerically equal to `gamma`).
    pub relaxation: f64,
    /// Thermal mean occupation of the oscillator mode.
    pub nbar: f64,
}

/// Ohmic-Lorentz-Drude spectral density
/// `J(w) = (2 gamma0 w / pi) * cutoff^2 / (cutoff^2 + w^2)`.
///
/// Peaks at `w = cutoff` and falls off as `2 gamma0 cutoff^2 / (pi w)`.
pub fn spectral_density(spec: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "spectral density is defined for nonnegative frequencies",
        });
    }
    let l2 = spec.cutoff * spec.cutoff;
    Ok(2.0 * spec.gamma0 * omega / PI * l2 / (l2 + omega * omega))
}

/// Dissipation kernel: the sine transform of the spectral density, which for
/// the Drude form has the closed expression
/// `gamma0 * cutoff^2 * exp(-cutoff * tau)`. The closed form is the
/// implementation; [`dissipation_kernel_quadrature`] is the slow cross-check.
pub fn dissipation_kernel(spec: &BathSpec, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "dissipation kernel requires a positive time lag",
        });
    }
    Ok(spec.gamma0 * spec.cutoff * spec.cutoff * (-spec.cutoff * tau).exp())
}

/// Dissipation kernel evaluated the slow way, as the oscillatory integral
/// `integral_0^inf J(w) sin(w tau) dw`. Exists to validate
/// [`dissipation_kernel`]; agreement is ~1e-8 relative.
pub fn dissipation_kernel_quadrature(spec: &BathSpec, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "dissipation kernel requires a positive time lag",
        });
    }
    let g0 = spec.gamma0;
    let l = spec.cutoff;
    let l2 = l * l;
    let f = move |w: f64| 2.0 * g0 * w / PI * l2 / (l2 + w * w) * (w * tau).sin();
    let scale = g0 * l2;
    // half-period segments up to the monotone part of the envelope, then the
    // accelerated alternating tail
    segmented_semi_infinite(&f, tau, 1.0, 3.0 * l, 1e-12 * scale)
}

/// Noise kernel: the cosine transform of `J(w) * coth(hbar w / 2 k_B T)`.
///
/// `temperature` may differ from the one in `spec` (limits are often probed at
/// several temperatures against one bath). Negative temperatures are
/// rejected; zero takes the ground-state branch (coth -> 1).
///
/// The integrand falls off only as 1/w, so the transform is evaluated with a
/// frequency cutoff `50 * max(cutoff, k_B T / hbar)` when `tau` is small
/// enough that the integrand barely oscillates (including `tau = 0`, where
/// the integral grows logarithmically with the cutoff and the cutoff is part
/// of the definition). Away from that regime the oscillation tames the tail
/// and the full transform is computed: half-period segments plus an
/// accelerated alternating series, with analytic continuations taking over
/// where quadrature would need excessive subdivision (see
/// `noise_kernel_value`).
pub fn noise_kernel(spec: &BathSpec, tau: f64, temperature: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "noise kernel requires a nonnegative time lag",
        });
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            reason: "temperature must be nonnegative and finite",
        });
    }
    noise_kernel_value(spec.gamma0, spec.cutoff, K_BOLTZMANN * temperature / HBAR, tau)
}

/// Time-dependent damping/diffusion coefficient pair
/// `(Delta(t), gamma(t))`:
///
/// ```text
/// Delta(t) = gamma0 * integral_0^t kappa(tau) cos(Omega tau) dtau
/// gamma(t) = gamma0 * integral_0^t mu(tau)    sin(Omega tau) dtau
/// ```
///
/// with `kappa` the noise kernel and `mu` the dissipation kernel. The
/// `gamma0` prefactor makes both converge to the second-order asymptotic
/// rates of [`asymptotic_rates`] as `t -> inf`.
pub fn time_dependent_coefficients(spec: &BathSpec, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "coefficients are defined for nonnegative times",
        });
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let delta = delta_time_dependent(spec, t)?;
    let gamma = gamma_time_dependent(spec, t)?;
    Ok((delta, gamma))
}

/// Long-time limits of the coefficient pair, the mode occupation, and the
/// dissipator rate, all to second order in the coupling:
///
/// ```text
/// gamma = relaxation = gamma0^2 * Omega * r^2 / (1 + r^2),   r = cutoff / Omega
/// delta = gamma * coth(hbar Omega / 2 k_B T)
/// nbar  = 1 / (exp(hbar Omega / k_B T) - 1)
/// ```
pub fn asymptotic_rates(spec: &BathSpec) -> Result<RateSet> {
    let r = spec.cutoff_ratio();
    let base = spec.gamma0 * spec.gamma0 * spec.omega * r * r / (1.0 + r * r);
    let coth = thermal_coth(spec.omega, spec.temperature);
    let nbar = mean_occupation(spec.omega, spec.temperature)?;
    Ok(RateSet {
        delta: base * coth,
        gamma: base,
        relaxation: base,
        nbar,
    })
}

/// Thermal mean occupation `1 / (exp(hbar omega / k_B T) - 1)`.
///
/// Zero temperature is an explicit branch (returns 0), and the exponential is
/// evaluated through `exp_m1`, so neither end of the temperature axis
/// overflows.
pub fn mean_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "occupation requires a positive mode frequency",
        });
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            reason: "temperature must be nonnegative and finite",
        });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Temperature on a `log10(omega / T)` sweep axis: `T = omega / 10^ratio`.
pub fn temperature_from_log_ratio(omega: f64, log10_ratio: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "ratio axis requires a positive mode frequency",
        });
    }
    Ok(omega / 10f64.powf(log10_ratio))
}

/// `coth(hbar omega / (2 k_B T))`, with a series branch for small arguments
/// and an exact 1 at `T = 0`.
pub fn thermal_coth(omega: f64, temperature: f64) -> f64 {
    debug_assert!(omega > 0.0 && temperature >= 0.0);
    if temperature == 0.0 {
        return 1.0;
    }
    coth(0.5 * HBAR * omega / (K_BOLTZMANN * temperature))
}

fn coth(y: f64) -> f64 {
    debug_assert!(y > 0.0);
    if y < 1e-4 {
        1.0 / y + y / 3.0 - y * y * y / 45.0
    } else if y > 20.0 {
        1.0
    } else {
        1.0 / y.tanh()
    }
}

/// `w * coth(w / (2 w_thermal))` without the 0 * inf indeterminacy at the
/// origin; `w_thermal = k_B T / hbar`, and `w_thermal = 0` means `T = 0`.
fn omega_coth(w: f64, w_thermal: f64) -> f64 {
    if w_thermal == 0.0 {
        return w;
    }
    let y = 0.5 * w / w_thermal;
    if y < 1e-4 {
        2.0 * w_thermal * (1.0 + y * y / 3.0 - y * y * y * y / 45.0)
    } else {
        w * coth(y)
    }
}

/// Noise-kernel integrand `J(w) coth(hbar w / 2 k_B T)`, finite at the
/// origin.
fn noise_integrand(gamma0: f64, cutoff: f64, w_thermal: f64, w: f64) -> f64 {
    let l2 = cutoff * cutoff;
    2.0 * gamma0 / PI * l2 / (l2 + w * w) * omega_coth(w, w_thermal)
}

/// Dispatch for the noise kernel over its quadrature and analytic regimes.
///
/// Regimes, in order:
/// - `tau = 0`: positive integrand on `[0, w_max]`, plain adaptive panel
///   refinement (the hard cutoff is part of the kernel's definition here).
/// - near-zero temperature (`w_thermal <= 1e-4 cutoff`): quadrature while the
///   Drude exponential is alive (`cutoff * tau <= 80`), then the integration-
///   by-parts asymptote `-(2 gamma0 / pi tau^2)(1 + 6/(cutoff tau)^2 + ...)`.
/// - warm, both the Drude pole and the slowest thermal (Matsubara) pole dead:
///   exactly the regime where every term carries at least e^-80, returns 0.
/// - few oscillations across the cutoff window: adaptive quadrature on
///   `[0, w_max]` with the hard cutoff.
/// - moderate segment count: half-period segments + accelerated alternating
///   tail (the workhorse quadrature path).
/// - otherwise: pole expansion of the transform (Drude residue plus thermal
///   poles at `2 pi k k_B T / hbar`), which is cheap precisely where the
///   segment count would explode.
fn noise_kernel_value(gamma0: f64, cutoff: f64, w_thermal: f64, tau: f64) -> Result<f64> {
    let w_max = 50.0 * cutoff.max(w_thermal);
    let g = move |w: f64| noise_integrand(gamma0, cutoff, w_thermal, w);
    // magnitude probe for absolute tolerances
    let g_ref = g(cutoff).max(g(w_thermal.max(1e-3 * cutoff)));
    let kappa_ref = g_ref * cutoff.max(w_thermal);

    if tau == 0.0 {
        return quad::integrate(&g, 0.0, w_max, 1e-10 * kappa_ref, 1e-8);
    }

    let cold = w_thermal <= 1e-4 * cutoff;
    if cold {
        if cutoff * tau <= 80.0 {
            return noise_kernel_quadrature(gamma0, cutoff, w_thermal, tau, w_max, kappa_ref);
        }
        let u = 1.0 / (cutoff * tau);
        let u2 = u * u;
        return Ok(-2.0 * gamma0 / (PI * tau * tau) * (1.0 + 6.0 * u2 + 120.0 * u2 * u2));
    }

    let nu1 = 2.0 * PI * w_thermal;
    if cutoff * tau > 80.0 && nu1 * tau > 80.0 {
        // every pole of the transform contributes at most e^-80 of its scale
        return Ok(0.0);
    }
    let segment_estimate = 3.0 * cutoff.max(w_thermal) * tau / PI;
    if tau * w_max < 4.0 * PI || segment_estimate <= 600.0 {
        return noise_kernel_quadrature(gamma0, cutoff, w_thermal, tau, w_max, kappa_ref);
    }
    noise_kernel_poles(gamma0, cutoff, w_thermal, tau)
}

/// Quadrature path: literal cutoff when the integrand barely oscillates, else
/// half-period segments with the accelerated tail.
fn noise_kernel_quadrature(
    gamma0: f64,
    cutoff: f64,
    w_thermal: f64,
    tau: f64,
    w_max: f64,
    kappa_ref: f64,
) -> Result<f64> {
    let f = move |w: f64| noise_integrand(gamma0, cutoff, w_thermal, w) * (w * tau).cos();
    if tau * w_max < 4.0 * PI {
        return quad::integrate(&f, 0.0, w_max, 1e-10 * kappa_ref, 1e-8);
    }
    let w_mono = 3.0 * cutoff.max(w_thermal);
    segmented_semi_infinite(&f, tau, 0.5, w_mono, 1e-12 * kappa_ref)
}

/// Pole expansion of the noise kernel for `T > 0`, `tau > 0`:
///
/// ```text
/// kappa(tau) = gamma0 cutoff^2 cot(hbar cutoff / 2 k_B T) e^(-cutoff tau)
///            - (4 gamma0 k_B T / hbar) sum_k nu_k e^(-nu_k tau) cutoff^2 / (cutoff^2 - nu_k^2)
/// ```
///
/// with `nu_k = 2 pi k k_B T / hbar`. Terms are summed until `nu_k tau > 80`.
/// When the cutoff sits numerically on a thermal pole the two diverging terms
/// cancel; the argument is nudged by 1e-8 relative to stay off the exact
/// degeneracy (error far below every tolerance in this crate).
fn noise_kernel_poles(gamma0: f64, cutoff: f64, w_thermal: f64, tau: f64) -> Result<f64> {
    debug_assert!(w_thermal > 0.0 && tau > 0.0);
    let nu1 = 2.0 * PI * w_thermal;
    let mut u = PI * cutoff / nu1;
    if u.sin().abs() < 1e-8 {
        u += 1e-8 * u.max(1.0);
    }
    let drude = if cutoff * tau > 700.0 {
        0.0
    } else {
        gamma0 * cutoff * cutoff * (u.cos() / u.sin()) * (-cutoff * tau).exp()
    };

    let k_max = (80.0 / (nu1 * tau)).ceil();
    if !(k_max <= 1e7) {
        return Err(Error::NumericalFailure {
            context: "noise-kernel pole expansion needs too many terms",
            estimate: k_max,
            error: nu1 * tau,
        });
    }
    let l2 = cutoff * cutoff;
    let mut thermal = 0.0;
    let mut k = 1.0_f64;
    while k <= k_max {
        let nu = k * nu1;
        thermal += nu * (-nu * tau).exp() * l2 / (l2 - nu * nu);
        k += 1.0;
    }
    Ok(drude - 4.0 * gamma0 * w_thermal * thermal)
}

/// Integral of an oscillatory transform over `[0, inf)`: one segment per
/// half-period of the trigonometric factor out to `w_mono` (beyond the
/// integrand's envelope structure), then the accelerated alternating tail.
/// `offset` places the segment boundaries on the zeros: 0.5 for cosine,
/// 1.0 for sine.
fn segmented_semi_infinite<F: Fn(f64) -> f64>(
    f: &F,
    tau: f64,
    offset: f64,
    w_mono: f64,
    seg_abs_tol: f64,
) -> Result<f64> {
    let half = PI / tau;
    let mut sum = 0.0;
    let mut prev = 0.0;
    let mut k = 0usize;
    loop {
        let b = (k as f64 + offset) * half;
        sum += quad::integrate_with_budget(f, prev, b, seg_abs_tol, 1e-9, 48)?;
        if b >= w_mono {
            let (tail, _err) = quad::oscillatory_tail(f, b, half)?;
            return Ok(sum + tail);
        }
        prev = b;
        k += 1;
        if k > 20_000 {
            return Err(Error::NumericalFailure {
                context: "oscillatory transform needed too many half-period segments",
                estimate: sum,
                error: k as f64,
            });
        }
    }
}

/// Sum of adaptive integrals over half-period slices of `[0, t_end]`; used
/// when one adaptive pass would need too many panels.
fn segmented_time_integral<F: Fn(f64) -> f64>(
    f: &F,
    t_end: f64,
    omega: f64,
    seg_abs_tol: f64,
) -> Result<f64> {
    let half = PI / omega;
    let mut sum = 0.0;
    let mut prev = 0.0;
    let mut k = 0usize;
    loop {
        let b = (k as f64 + 0.5) * half;
        if b >= t_end {
            sum += quad::integrate_with_budget(f, prev, t_end, seg_abs_tol, 1e-9, 48)?;
            return Ok(sum);
        }
        sum += quad::integrate_with_budget(f, prev, b, seg_abs_tol, 1e-9, 48)?;
        prev = b;
        k += 1;
        if k > 40_000 {
            return Err(Error::NumericalFailure {
                context: "time integral needed too many half-period segments",
                estimate: sum,
                error: k as f64,
            });
        }
    }
}

/// `Delta(t)`: cosine-weighted time integral of the noise kernel, with the
/// second-order coupling prefactor.
fn delta_time_dependent(spec: &BathSpec, t: f64) -> Result<f64> {
    let g0 = spec.gamma0;
    let omega = spec.omega;
    let cutoff = spec.cutoff;
    let w_thermal = spec.thermal_frequency();
    let f = move |tau: f64| {
        g0 * noise_kernel_value(g0, cutoff, w_thermal, tau)
            .expect("noise kernel inside its validated domain")
            * (omega * tau).cos()
    };
    let r = spec.cutoff_ratio();
    let scale =
        g0 * g0 * omega * r * r / (1.0 + r * r) * thermal_coth(omega, spec.temperature);

    let half_osc = omega * t / PI;
    if half_osc <= 220.0 {
        return quad::integrate(&f, 0.0, t, 1e-10 * scale, 1e-8);
    }

    // Long times: integrate the structured part segment by segment, then trade
    // the rest against accelerated tails: the kernel's envelope is monotone
    // once the Drude exponential and the slowest thermal pole have decayed.
    let cold = w_thermal <= 1e-4 * cutoff;
    let settle = if cold {
        80.0 / cutoff
    } else {
        (80.0 / cutoff).max(25.0 / (2.0 * PI * w_thermal))
    };
    let half_t = PI / omega;
    let seg_tol = 1e-12 * scale;
    if settle * 1.5 >= t {
        return segmented_time_integral(&f, t, omega, seg_tol);
    }
    let m = ((settle / half_t) - 0.5).ceil().max(0.0);
    let s_star = (m + 0.5) * half_t;
    let head = segmented_time_integral(&f, s_star, omega, seg_tol)?;
    let (tail_all, _) = quad::oscillatory_tail(&f, s_star, half_t)?;
    let mt = ((t / half_t) - 0.5).ceil();
    let t_star = (mt + 0.5) * half_t;
    let sliver = if t_star > t {
        quad::integrate_with_budget(&f, t, t_star, seg_tol, 1e-9, 64)?
    } else {
        0.0
    };
    let (tail_beyond, _) = quad::oscillatory_tail(&f, t_star.max(s_star), half_t)?;
    Ok(head + tail_all - sliver - tail_beyond)
}

/// `gamma(t)`: sine-weighted time integral of the dissipation kernel, with
/// the second-order coupling prefactor.
fn gamma_time_dependent(spec: &BathSpec, t: f64) -> Result<f64> {
    let g0 = spec.gamma0;
    let omega = spec.omega;
    let cutoff = spec.cutoff;
    let f =
        move |tau: f64| g0 * g0 * cutoff * cutoff * (-cutoff * tau).exp() * (omega * tau).sin();
    let r = spec.cutoff_ratio();
    let scale = g0 * g0 * omega * r * r / (1.0 + r * r);
    // beyond 80 cutoff-times the kernel is e^-80 of its scale
    let t_eff = t.min(80.0 / cutoff);
    let half_osc = omega * t_eff / PI;
    if half_osc <= 220.0 {
        quad::integrate(&f, 0.0, t_eff, 1e-10 * scale, 1e-9)
    } else {
        segmented_time_integral(&f, t_eff, omega, 1e-12 * scale)
    }
}
