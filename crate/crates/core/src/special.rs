//! Interference integral ρ(x, α) and cell-load distributions.

use std::f64::consts::FRAC_PI_2;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSettings};

/// Gamma fit of the normalized Voronoi cell area: shape q, rate b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellAreaModel {
    pub q: f64,
    pub b: f64,
}

impl CellAreaModel {
    pub const STANDARD: CellAreaModel = CellAreaModel { q: 3.61, b: 3.61 };
}

impl Default for CellAreaModel {
    fn default() -> Self {
        Self::STANDARD
    }
}

const CELL: CellAreaModel = CellAreaModel::STANDARD;

/// ρ(x, α) = x^{2/α} ∫_{x^{−2/α}}^∞ du / (1 + u^{α/2}).
///
/// Uses the arctan closed form for α = 4 and [`rho_quadrature`] otherwise.
pub fn rho(x: f64, alpha: f64) -> Result<f64> {
    check_rho_args(x, alpha)?;
    if alpha == 4.0 {
        Ok(rho_alpha4(x))
    } else {
        rho_quadrature(x, alpha)
    }
}

/// Closed form for α = 4: √x·(π/2 − arctan(1/√x)).
pub fn rho_alpha4(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let s = x.sqrt();
    s * (FRAC_PI_2 - (1.0 / s).atan())
}

/// Generic ρ by quadrature, valid for any α > 2.
///
/// With u = 1/t and then t = w^{1/(p−1)}, p = α/2, the tail integral becomes
/// ρ = x^{2/α}/(p − 1) · ∫₀^{x^{1−2/α}} dw / (1 + w^{p/(p−1)}), whose
/// integrand is bounded and smooth. The range is split at powers of two so
/// each piece sees at most a factor-two change in the algebraic decay.
pub fn rho_quadrature(x: f64, alpha: f64) -> Result<f64> {
    check_rho_args(x, alpha)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let p = alpha / 2.0;
    let k = p / (p - 1.0);
    let upper = x.powf(1.0 - 2.0 / alpha);
    let settings = QuadratureSettings::with_tolerance(1e-13, 1e-300);
    let f = |w: f64| 1.0 / (1.0 + w.powf(k));

    let mut total = 0.0;
    let mut lo = 0.0;
    let mut hi = upper.min(1.0);
    loop {
        total += integrate(f, lo, hi, &settings)?.value;
        if hi >= upper {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(upper);
    }
    Ok(x.powf(2.0 / alpha) * total / (p - 1.0))
}

fn check_rho_args(x: f64, alpha: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("rho requires alpha > 2, got {alpha}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("rho requires x >= 0, got {x}")));
    }
    Ok(())
}

fn load_ratio(lambda_users: f64, lambda_eq: f64) -> Option<f64> {
    (lambda_users >= 0.0 && lambda_eq > 0.0 && lambda_users.is_finite())
        .then(|| lambda_users / lambda_eq)
}

/// P[N = n] users in a randomly chosen cell of a tier with equivalent density
/// `lambda_eq`, under the Gamma cell-area approximation. Computed in log
/// space; returns NaN for invalid densities.
pub fn pmf_users_random_cell(n: u64, lambda_users: f64, lambda_eq: f64) -> f64 {
    let Some(c) = load_ratio(lambda_users, lambda_eq) else {
        return f64::NAN;
    };
    let (q, b) = (CELL.q, CELL.b);
    let nf = n as f64;
    let count_term = if n == 0 { 0.0 } else { nf * c.ln() };
    (q * b.ln() + ln_gamma(nf + q) - ln_gamma(nf + 1.0) - ln_gamma(q) + count_term
        - (nf + q) * (c + b).ln())
    .exp()
}

/// P[N = n] other users sharing the typical user's cell (size-biased cell).
pub fn pmf_users_sharing_cell(n: u64, lambda_users: f64, lambda_eq: f64) -> f64 {
    let Some(c) = load_ratio(lambda_users, lambda_eq) else {
        return f64::NAN;
    };
    let (q, b) = (CELL.q, CELL.b);
    let nf = n as f64;
    let count_term = if n == 0 { 0.0 } else { nf * c.ln() };
    (q * b.ln() + ln_gamma(nf + q + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(q) + count_term
        - (nf + q + 1.0) * (c + b).ln())
    .exp()
}

/// Probability that a randomly chosen cell has no users.
pub fn prob_unloaded(lambda_users: f64, lambda_eq: f64) -> f64 {
    let Some(c) = load_ratio(lambda_users, lambda_eq) else {
        return f64::NAN;
    };
    (CELL.b / (c + CELL.b)).powf(CELL.q)
}
