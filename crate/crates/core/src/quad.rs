//! One-dimensional quadrature: an adaptive integrator built on the 15-point
//! Gauss-Kronrod rule, plus an accelerated summation scheme for slowly
//! converging oscillatory tails on semi-infinite ranges.

use crate::error::{Error, Result};

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (positive half, outermost
/// first; the rule is symmetric about zero).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Weights of the embedded 7-point Gauss rule.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Weights of the 15-point Kronrod rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One application of the 15-point Kronrod rule with the 7-point Gauss
/// embedding. Returns the Kronrod estimate and a conservative error estimate
/// following the usual (200 |K - G| / resasc)^1.5 rescaling.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            // odd Kronrod indices coincide with the Gauss nodes
            res_gauss += WG[j / 2] * fsum;
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = raw_err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    (res_kronrod * half, err, res_abs)
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

/// Adaptive integration of `f` over the finite interval [a, b].
///
/// The worst panel is bisected until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`. Fails with a diagnostic if the panel
/// budget is exhausted first.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    integrate_with_budget(&f, a, b, abs_tol, rel_tol, 512)
}

pub(crate) fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, error, resabs) = gk15(f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value,
        error,
        resabs,
    }];

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let total_resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        // Requested accuracy below the rounding floor of the rule: the error
        // estimate cannot shrink further, so the result is as good as it gets.
        if total_err <= 100.0 * f64::EPSILON * total_resabs {
            return Ok(total);
        }
        if panels.len() >= max_panels {
            return Err(Error::NumericalFailure {
                context: "adaptive quadrature exhausted its panel budget",
                estimate: total,
                error: total_err,
            });
        }

        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .expect("panel list is never empty");
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer splittable in f64; accept what we have
            panels.push(worst);
            let total: f64 = panels.iter().map(|p| p.value).sum();
            return Ok(total);
        }
        let (v1, e1, r1) = gk15(f, worst.a, mid);
        let (v2, e2, r2) = gk15(f, mid, worst.b);
        panels.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            resabs: r1,
        });
        panels.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            resabs: r2,
        });
    }
}

/// Integral of an oscillatory function from `start` to +infinity.
///
/// `f` must oscillate with sign alternating between consecutive segments of
/// width `half_period` beyond `start`, with an eventually monotone envelope
/// (e.g. sin or cos times a decaying amplitude). Consecutive half-period
/// segment integrals then form an alternating series; the iterated-mean
/// (Euler) transformation of its partial sums converges quickly even when the
/// raw series converges only conditionally.
///
/// Returns the tail estimate together with an error estimate taken from the
/// last averaging stage.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    half_period: f64,
) -> Result<(f64, f64)> {
    const SEGMENTS: usize = 32;
    if !(half_period > 0.0) || !start.is_finite() {
        return Err(Error::NumericalFailure {
            context: "oscillatory tail requires a positive half-period and finite start",
            estimate: 0.0,
            error: f64::NAN,
        });
    }

    let mut segments = [0.0_f64; SEGMENTS];
    for (k, slot) in segments.iter_mut().enumerate() {
        let a = start + k as f64 * half_period;
        let b = a + half_period;
        let (v, _, _) = gk15(&f, a, b);
        *slot = v;
    }

    // Iterated averaging (Euler transformation) of the partial sums; run the
    // triangle on all segments and on all-but-one, and use the difference
    // between the two accelerated values as the error estimate.
    let accelerate = |n: usize| -> f64 {
        let mut p = [0.0_f64; SEGMENTS];
        let mut sum = 0.0;
        for k in 0..n {
            sum += segments[k];
            p[k] = sum;
        }
        let mut len = n;
        while len > 1 {
            for j in 0..len - 1 {
                p[j] = 0.5 * (p[j] + p[j + 1]);
            }
            len -= 1;
        }
        p[0]
    };

    let estimate = accelerate(SEGMENTS);
    let err = (estimate - accelerate(SEGMENTS - 1)).abs();
    Ok((estimate, err))
}
