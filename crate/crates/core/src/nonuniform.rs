//! Non-uniform small cell deployment: small cells only in the outer region,
//! i.e. farther than D from every macro BS.
//!
//! Inside the model every λ₂ is the density of small cells *in the outer
//! region*. Scenario-I and Scenario-II differ only in that value (λ₂ versus
//! λ₂ / P[o ∈ outer]); [`NonUniformModel::new`] performs the conversion once.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{
    effective_small_density, region_split, DerivedDensities, NetworkConfig, Region, Tier,
};
use crate::quadrature::{gaussian_cutoff, integrate, try_sum_series, QuadratureSettings, SeriesSettings};
use crate::special::{pmf_users_sharing_cell, prob_unloaded, rho};
use crate::uniform::{check_rate, check_threshold, rate_threshold};

/// Precomputed quantities of the non-uniform model for one configuration.
#[derive(Debug, Clone)]
pub struct NonUniformModel {
    cfg: NetworkConfig,
    /// λ₂ inside the outer region.
    pub outer_small_density: f64,
    pub derived: DerivedDensities,
    /// Normalization of the tier-2 serving distance density in the outer region.
    pub constant_m: f64,
    pub p_inner: f64,
    pub p_outer: f64,
    pub quadrature: QuadratureSettings,
    pub series: SeriesSettings,
}

/// Which conditional serving-distance law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfRegion {
    /// X₁ given o ∈ inner (always macro-served), support [0, D].
    Inner,
    /// X₁ given o ∈ outer and macro-served, support (D, ∞).
    OuterTier1,
    /// X₂ given o ∈ outer and small-served, support [0, ∞) with a
    /// breakpoint at (P₂/P₁)^{1/α}·D.
    OuterTier2,
}

/// Conditional density of the serving distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingDistancePdf {
    pub region: PdfRegion,
    pub lower: f64,
    pub upper: f64,
    /// (P₂/P₁)^{1/α}·D; only meaningful for `OuterTier2`.
    pub breakpoint: f64,
    lambda_macro: f64,
    lambda_small: f64,
    d: f64,
    /// λ₁ + λ₂(P₂/P₁)^{2/α}
    macro_eq: f64,
    /// λ₁(P₁/P₂)^{2/α} + λ₂
    small_eq: f64,
    constant_m: f64,
    p_inner: f64,
}

impl ServingDistancePdf {
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x >= self.lower && x <= self.upper) {
            return 0.0;
        }
        match self.region {
            PdfRegion::Inner => {
                2.0 * PI * self.lambda_macro * x * (-PI * self.lambda_macro * x * x).exp() / self.p_inner
            }
            PdfRegion::OuterTier1 => {
                if x <= self.d {
                    return 0.0;
                }
                let a = self.macro_eq;
                2.0 * PI * a * x * (-PI * a * (x * x - self.d * self.d)).exp()
            }
            PdfRegion::OuterTier2 => {
                let l2 = self.lambda_small;
                if x <= self.breakpoint {
                    self.constant_m * 2.0 * PI * l2 * x * (-PI * l2 * x * x).exp()
                } else {
                    // exp(−π·small_eq·x²) / exp(−πλ₁D²)
                    let log = -PI * (self.small_eq * x * x - self.lambda_macro * self.d * self.d);
                    self.constant_m * 2.0 * PI * l2 * x * log.exp()
                }
            }
        }
    }

    /// Closed-form CDF obtained by integrating [`Self::pdf`] branch by branch.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower {
            return 0.0;
        }
        if x >= self.upper {
            return 1.0;
        }
        let v = match self.region {
            PdfRegion::Inner => {
                -(-PI * self.lambda_macro * x * x).exp_m1() / self.p_inner
            }
            PdfRegion::OuterTier1 => -(-PI * self.macro_eq * (x * x - self.d * self.d)).exp_m1(),
            PdfRegion::OuterTier2 => {
                let l2 = self.lambda_small;
                let bp = self.breakpoint;
                if x <= bp {
                    -self.constant_m * (-PI * l2 * x * x).exp_m1()
                } else {
                    let first = -(-PI * l2 * bp * bp).exp_m1();
                    let shift = PI * self.lambda_macro * self.d * self.d;
                    let second = (l2 / self.small_eq)
                        * ((-PI * self.small_eq * bp * bp + shift).exp()
                            - (-PI * self.small_eq * x * x + shift).exp());
                    self.constant_m * (first + second)
                }
            }
        };
        v.clamp(0.0, 1.0)
    }
}

impl NonUniformModel {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        if !cfg.scenario.is_non_uniform() {
            return Err(Error::config(format!(
                "non-uniform model needs scenario NonUniformI or NonUniformII, got {}",
                cfg.scenario
            )));
        }
        let outer = effective_small_density(cfg)?.small_density_in_outer;
        let derived = derive_with_outer_density(cfg, outer);
        let (p_inner, p_outer) = region_split(cfg.lambda_macro, cfg.inner_radius_m);
        let constant_m = constant_m(cfg, outer);
        Ok(NonUniformModel {
            cfg: cfg.clone(),
            outer_small_density: outer,
            derived,
            constant_m,
            p_inner,
            p_outer,
            quadrature: QuadratureSettings::default(),
            series: SeriesSettings::default(),
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    /// λ₁ + λ₂(P₂/P₁)^{2/α}
    fn macro_eq(&self) -> f64 {
        self.cfg.lambda_macro + self.outer_small_density * self.cfg.small_to_macro_factor()
    }

    /// λ₁(P₁/P₂)^{2/α} + λ₂
    fn small_eq(&self) -> f64 {
        self.cfg.lambda_macro / self.cfg.small_to_macro_factor() + self.outer_small_density
    }

    pub fn serving_distance_pdf(&self, region: PdfRegion) -> Result<ServingDistancePdf> {
        let d = self.cfg.inner_radius_m;
        let (lower, upper) = match region {
            PdfRegion::Inner => {
                if d <= 0.0 {
                    return Err(Error::domain("inner region is empty for D = 0"));
                }
                (0.0, d)
            }
            PdfRegion::OuterTier1 => (d, f64::INFINITY),
            PdfRegion::OuterTier2 => (0.0, f64::INFINITY),
        };
        Ok(ServingDistancePdf {
            region,
            lower,
            upper,
            breakpoint: self.cfg.distance_ratio() * d,
            lambda_macro: self.cfg.lambda_macro,
            lambda_small: self.outer_small_density,
            d,
            macro_eq: self.macro_eq(),
            small_eq: self.small_eq(),
            constant_m: self.constant_m,
            p_inner: self.p_inner,
        })
    }

    fn noise_cutoff(&self, lower: f64, t: f64, power: f64) -> f64 {
        let noise = self.cfg.noise_power();
        if noise > 0.0 {
            (40.0 * power / (t * noise)).powf(1.0 / self.cfg.alpha()).max(lower)
        } else {
            f64::INFINITY
        }
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let v = integrate(f, lo, hi, &self.quadrature)?.value;
        if v.is_nan() {
            return Err(Error::domain("non-finite coverage integrand"));
        }
        Ok(v)
    }

    /// Coverage of a typical user in the inner region, served by the macro tier.
    pub fn coverage_inner(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let d = self.cfg.inner_radius_m;
        if d <= 0.0 {
            return Err(Error::domain("inner region is empty for D = 0"));
        }
        let alpha = self.cfg.alpha();
        let p1 = self.cfg.macro_power();
        let p2 = self.cfg.small_power();
        let l1 = self.cfg.lambda_macro;
        let loaded1 = self.derived.lambda_loaded_macro;
        let loaded2 = self.derived.lambda_loaded_small;
        let noise_scale = t * self.cfg.noise_power() / p1;
        let coeff = l1 + loaded1 * rho(t, alpha)?;
        let small_kernel_scale = p2 * t / (p1 * d.powf(alpha));
        let upper = d
            .min(gaussian_cutoff(0.0, coeff))
            .min(self.noise_cutoff(0.0, t, p1));
        let f = |x: f64| {
            let small = rho(small_kernel_scale * x.powf(alpha), alpha).unwrap_or(f64::NAN);
            let log = -noise_scale * x.powf(alpha) - PI * coeff * x * x - PI * loaded2 * d * d * small;
            x * log.exp()
        };
        let v = 2.0 * PI * l1 * self.integrate(f, 0.0, upper)? / self.p_inner;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Coverage of an outer-region user served by the macro tier.
    pub fn coverage_outer_tier1(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let d = self.cfg.inner_radius_m;
        let alpha = self.cfg.alpha();
        let p1 = self.cfg.macro_power();
        let r = self.cfg.small_to_macro_factor();
        let a = self.macro_eq();
        let loaded = self.derived.lambda_loaded_macro + self.derived.lambda_loaded_small * r;
        let rho_t = rho(t, alpha)?;
        let coeff = a + rho_t * loaded;
        let noise_scale = t * self.cfg.noise_power() / p1;
        let upper = gaussian_cutoff(d, coeff).min(self.noise_cutoff(d, t, p1));
        // Divided through by exp(−πAD²) so the integrand is O(1) at x = D.
        let f = |x: f64| {
            let log = -noise_scale * x.powf(alpha) - PI * coeff * x * x + PI * a * d * d;
            x * log.exp()
        };
        let v = 2.0 * PI * a * self.integrate(f, d, upper)?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Coverage of an outer-region user served by the small cell tier.
    pub fn coverage_outer_tier2(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let d = self.cfg.inner_radius_m;
        let alpha = self.cfg.alpha();
        let p1 = self.cfg.macro_power();
        let p2 = self.cfg.small_power();
        let l1 = self.cfg.lambda_macro;
        let l2 = self.outer_small_density;
        let loaded1 = self.derived.lambda_loaded_macro;
        let loaded2 = self.derived.lambda_loaded_small;
        let r = self.cfg.small_to_macro_factor();
        let rho_t = rho(t, alpha)?;
        let noise_scale = t * self.cfg.noise_power() / p2;
        let bp = self.cfg.distance_ratio() * d;
        let prefactor = 2.0 * PI * l2 * self.constant_m;

        // x ≤ bp: the nearest macro interferer is at least D away.
        let near = if bp > 0.0 {
            let coeff = l2 + loaded2 * rho_t;
            let kernel_scale = p1 * t / (p2 * d.powf(alpha));
            let upper = bp
                .min(gaussian_cutoff(0.0, coeff))
                .min(self.noise_cutoff(0.0, t, p2));
            let f = |x: f64| {
                let macro_part = rho(kernel_scale * x.powf(alpha), alpha).unwrap_or(f64::NAN);
                let log = -noise_scale * x.powf(alpha)
                    - PI * loaded1 * d * d * macro_part
                    - PI * coeff * x * x;
                x * log.exp()
            };
            self.integrate(f, 0.0, upper)?
        } else {
            0.0
        };

        // x > bp: macro interferers beyond (P₁/P₂)^{1/α}·x.
        let coeff = self.small_eq() + rho_t * (loaded1 / r + loaded2);
        let upper = gaussian_cutoff(bp, coeff).min(self.noise_cutoff(bp, t, p2));
        let shift = PI * l1 * d * d;
        let f = |x: f64| {
            let log = -noise_scale * x.powf(alpha) - PI * coeff * x * x + shift;
            x * log.exp()
        };
        let far = self.integrate(f, bp, upper)?;
        Ok((prefactor * (near + far)).clamp(0.0, 1.0))
    }

    /// Q-weighted mixture of the two outer-region tiers.
    pub fn coverage_outer(&self, t: f64) -> Result<f64> {
        let q2 = self.derived.q2_outer;
        let v = (1.0 - q2) * self.coverage_outer_tier1(t)? + q2 * self.coverage_outer_tier2(t)?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Region mixture P[inner]·p_inner(T) + P[outer]·p_outer(T).
    pub fn coverage_overall(&self, t: f64) -> Result<f64> {
        let inner = if self.p_inner > 0.0 {
            self.p_inner * self.coverage_inner(t)?
        } else {
            0.0
        };
        Ok((inner + self.p_outer * self.coverage_outer(t)?).clamp(0.0, 1.0))
    }

    pub fn coverage_in(&self, region: Region, t: f64) -> Result<f64> {
        match region {
            Region::Inner => self.coverage_inner(t),
            Region::Outer => self.coverage_outer(t),
            Region::Overall => self.coverage_overall(t),
        }
    }

    /// Equivalent density λ_i/Q_i used by the sharing-user distribution.
    fn sharing_density(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.cfg.lambda_macro / self.derived.q1,
            Tier::Small => self.outer_small_density / self.derived.q2_outer,
        }
    }

    fn rate_series(&self, tier: Tier, rate: f64, coverage: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        check_rate(rate)?;
        let lambda_eq = self.sharing_density(tier);
        let users = self.cfg.lambda_users;
        let w = self.cfg.bandwidth_hz;
        let sum = try_sum_series(
            |n| {
                let p = pmf_users_sharing_cell(n as u64, users, lambda_eq);
                Ok::<_, Error>(p * coverage(rate_threshold(rate, n, w))?)
            },
            &self.series,
        )?;
        sum.into_result()
    }

    /// P[R > rate | o ∈ inner].
    pub fn throughput_ccdf_inner(&self, rate: f64) -> Result<f64> {
        let v = self.rate_series(Tier::Macro, rate, |t| self.coverage_inner(t))?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// P[R > rate | o ∈ outer].
    pub fn throughput_ccdf_outer(&self, rate: f64) -> Result<f64> {
        let q2 = self.derived.q2_outer;
        let macro_part = self.rate_series(Tier::Macro, rate, |t| self.coverage_outer_tier1(t))?;
        let small_part = self.rate_series(Tier::Small, rate, |t| self.coverage_outer_tier2(t))?;
        Ok(((1.0 - q2) * macro_part + q2 * small_part).clamp(0.0, 1.0))
    }

    /// P[R > rate] over both regions.
    pub fn throughput_ccdf_overall(&self, rate: f64) -> Result<f64> {
        let inner = if self.p_inner > 0.0 {
            self.p_inner * self.throughput_ccdf_inner(rate)?
        } else {
            check_rate(rate)?;
            0.0
        };
        Ok((inner + self.p_outer * self.throughput_ccdf_outer(rate)?).clamp(0.0, 1.0))
    }

    pub fn throughput_in(&self, region: Region, rate: f64) -> Result<f64> {
        match region {
            Region::Inner => self.throughput_ccdf_inner(rate),
            Region::Outer => self.throughput_ccdf_outer(rate),
            Region::Overall => self.throughput_ccdf_overall(rate),
        }
    }
}

/// Association probabilities and loaded densities for a given outer-region
/// small cell density.
fn derive_with_outer_density(cfg: &NetworkConfig, l2: f64) -> DerivedDensities {
    let l1 = cfg.lambda_macro;
    let d = cfg.inner_radius_m;
    let r = cfg.small_to_macro_factor();
    let a = l1 + l2 * r;
    let (p_inner, _) = region_split(l1, d);
    let q1 = p_inner + (l1 / a) * (-PI * a * d * d).exp();
    let q2_outer = 1.0 - (l1 / a) * (-PI * l2 * r * d * d).exp();
    // λ′ = λ·(1 − P[N_c = 0]) with the cell-area density λ/Q.
    let lambda_loaded_macro = l1 * (1.0 - prob_unloaded(cfg.lambda_users, l1 / q1));
    let lambda_loaded_small = l2 * (1.0 - prob_unloaded(cfg.lambda_users, l2 / q2_outer));
    DerivedDensities {
        q1,
        q2_outer,
        lambda_loaded_macro,
        lambda_loaded_small,
    }
}

fn constant_m(cfg: &NetworkConfig, l2: f64) -> f64 {
    let l1 = cfg.lambda_macro;
    let d = cfg.inner_radius_m;
    let a = l1 + l2 * cfg.small_to_macro_factor();
    let p_outer = (-PI * l1 * d * d).exp();
    p_outer / (p_outer - l1 * (-PI * a * d * d).exp() / a)
}

/// Association probabilities and loaded densities for a NonUniformI/II config.
pub fn derive_densities(cfg: &NetworkConfig) -> Result<DerivedDensities> {
    Ok(NonUniformModel::new(cfg)?.derived)
}
