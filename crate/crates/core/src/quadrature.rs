//! Adaptive quadrature and guarded series summation.
//!
//! The integrator is a globally adaptive Gauss–Kronrod 7/15 scheme: the
//! interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|value|)`. Semi-infinite ranges are
//! mapped onto [0, 1) with x = a + t/(1 − t).

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSettings {
    pub fn with_tolerance(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSettings {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::config("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::config("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSettings {
    pub tail_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        SeriesSettings {
            tail_tol: 1e-8,
            max_terms: 2_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

/// Upper end of the integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

impl From<f64> for Upper {
    fn from(b: f64) -> Self {
        if b == f64::INFINITY {
            Upper::Infinity
        } else {
            Upper::Finite(b)
        }
    }
}

// Kronrod 15-point abscissae and weights; every other abscissa (odd index)
// is also a 7-point Gauss node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && round_off > error {
        error = round_off;
    }
    Segment { a, b, value, error }
}

fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Integral> {
    settings.validate()?;
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let mut segments = vec![gauss_kronrod_15(&mut f, a, b)];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let tolerance = settings.abs_tol.max(settings.rel_tol * value.abs());
        if error <= tolerance {
            return Ok(Integral {
                value,
                error_estimate: error,
                subdivisions: segments.len(),
            });
        }
        if segments.len() >= settings.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                partial: value,
                error_estimate: error,
                subdivisions: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
                if s.error > best.1 {
                    (i, s.error)
                } else {
                    best
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // Interval exhausted at machine precision.
            return Err(Error::QuadratureNotConverged {
                partial: value,
                error_estimate: error,
                subdivisions: segments.len() + 1,
            });
        }
        segments.push(gauss_kronrod_15(&mut f, seg.a, mid));
        segments.push(gauss_kronrod_15(&mut f, mid, seg.b));
    }
}

/// Integrates `f` over [a, b] or [a, ∞).
///
/// For a semi-infinite range the caller guarantees `f` decays; the integrand
/// is evaluated through x = a + t/(1 − t) on t ∈ [0, 1).
pub fn integrate<F, U>(f: F, a: f64, b: U, settings: &QuadratureSettings) -> Result<Integral>
where
    F: Fn(f64) -> f64,
    U: Into<Upper>,
{
    match b.into() {
        Upper::Finite(b) => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::domain("integration bounds must be finite or +inf"));
            }
            adaptive(&f, a, b, settings)
        }
        Upper::Infinity => {
            if !a.is_finite() {
                return Err(Error::domain("lower integration bound must be finite"));
            }
            let mapped = |t: f64| {
                let one_minus = 1.0 - t;
                if one_minus <= 0.0 {
                    return 0.0;
                }
                let x = a + t / one_minus;
                let fx = f(x);
                if fx == 0.0 {
                    0.0
                } else {
                    fx / (one_minus * one_minus)
                }
            };
            adaptive(mapped, 0.0, 1.0, settings)
        }
    }
}

/// Point beyond which exp(−π·coeff·(x² − lower²)) has fallen below e^{−40}.
///
/// Every coverage integrand carries such a Gaussian factor; integrating up to
/// this cutoff loses less than e^{−40} of the mass.
pub fn gaussian_cutoff(lower: f64, coeff: f64) -> f64 {
    const DECAY: f64 = 40.0;
    (lower * lower + DECAY / (PI * coeff)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms_used: usize,
    /// `max_terms` was reached before the tail bound fell below `tail_tol`.
    pub truncated: bool,
}

impl SeriesSum {
    /// Converts a truncated sum into an error carrying the partial value.
    pub fn into_result(self) -> Result<f64> {
        if self.truncated {
            Err(Error::SeriesTruncated {
                partial: self.value,
                terms: self.terms_used,
            })
        } else {
            Ok(self.value)
        }
    }
}

/// Sums non-negative, eventually decreasing terms `term(0) + term(1) + …`.
///
/// Stops once the geometric tail bound `t_n / (1 − t_n/t_{n−1})` drops below
/// `tail_tol`, or as soon as a term is exactly zero.
pub fn sum_series<F: FnMut(usize) -> f64>(mut term: F, settings: &SeriesSettings) -> SeriesSum {
    try_sum_series::<_, std::convert::Infallible>(|n| Ok(term(n)), settings)
        .unwrap_or_else(|never| match never {})
}

/// [`sum_series`] for terms whose evaluation can fail.
pub fn try_sum_series<F, E>(mut term: F, settings: &SeriesSettings) -> Result<SeriesSum, E>
where
    F: FnMut(usize) -> Result<f64, E>,
{
    let mut total = 0.0;
    let mut previous: Option<f64> = None;
    for n in 0..settings.max_terms {
        let t = term(n)?;
        total += t;
        if t == 0.0 {
            return Ok(SeriesSum {
                value: total,
                terms_used: n + 1,
                truncated: false,
            });
        }
        if let Some(prev) = previous {
            let ratio = t / prev;
            if ratio < 1.0 && t / (1.0 - ratio) < settings.tail_tol {
                return Ok(SeriesSum {
                    value: total,
                    terms_used: n + 1,
                    truncated: false,
                });
            }
        }
        previous = Some(t);
    }
    Ok(SeriesSum {
        value: total,
        terms_used: settings.max_terms,
        truncated: true,
    })
}
