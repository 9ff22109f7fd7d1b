//! Uniform small cell deployment (and macro-only as its λ₂ = 0 case).
//!
//! The typical user attaches to the tier with the strongest long-term
//! received power; the loaded BS processes are thinned to homogeneous PPPs
//! using the Gamma cell-area law, and coverage follows from the Rayleigh
//! Laplace transform of the interference.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::model::{region_split, NetworkConfig, Region, Scenario, Tier};
use crate::quadrature::{gaussian_cutoff, integrate, try_sum_series, QuadratureSettings, SeriesSettings};
use crate::special::{pmf_users_sharing_cell, prob_unloaded, rho};

/// Equivalent densities λ_{i,eq,u} and their loaded counterparts λ′_{i,eq,u}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformEquivalentDensities {
    pub lambda_eq_1: f64,
    pub lambda_eq_2: f64,
    pub lambda_eq_1_loaded: f64,
    pub lambda_eq_2_loaded: f64,
}

/// Precomputed uniform-deployment quantities for one configuration.
#[derive(Debug, Clone)]
pub struct UniformModel {
    cfg: NetworkConfig,
    q1: f64,
    q2: f64,
    loaded_macro: f64,
    loaded_small: f64,
    eq: UniformEquivalentDensities,
    pub quadrature: QuadratureSettings,
    pub series: SeriesSettings,
}

impl UniformModel {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.scenario.is_non_uniform() {
            return Err(Error::config(format!(
                "uniform model needs a Uniform or MacroOnly configuration, got {}",
                cfg.scenario
            )));
        }
        let l1 = cfg.lambda_macro;
        let l2 = cfg.lambda_small_nominal;
        let r = cfg.small_to_macro_factor();
        let lambda_eq_1 = l1 + l2 * r;
        let lambda_eq_2 = l1 / r + l2;
        let q1 = l1 / lambda_eq_1;
        let q2 = if l2 > 0.0 { l2 / lambda_eq_2 } else { 0.0 };
        let loaded_macro = l1 * (1.0 - prob_unloaded(cfg.lambda_users, lambda_eq_1));
        let loaded_small = if l2 > 0.0 {
            l2 * (1.0 - prob_unloaded(cfg.lambda_users, lambda_eq_2))
        } else {
            0.0
        };
        let eq = UniformEquivalentDensities {
            lambda_eq_1,
            lambda_eq_2,
            lambda_eq_1_loaded: loaded_macro + loaded_small * r,
            lambda_eq_2_loaded: loaded_macro / r + loaded_small,
        };
        Ok(UniformModel {
            cfg: cfg.clone(),
            q1,
            q2,
            loaded_macro,
            loaded_small,
            eq,
            quadrature: QuadratureSettings::default(),
            series: SeriesSettings::default(),
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    /// (Q_{1,u}, Q_{2,u}).
    pub fn association(&self) -> (f64, f64) {
        (self.q1, self.q2)
    }

    /// (λ′_{1,u}, λ′_{2,u}).
    pub fn loaded(&self) -> (f64, f64) {
        (self.loaded_macro, self.loaded_small)
    }

    pub fn equivalent(&self) -> UniformEquivalentDensities {
        self.eq
    }

    fn has_tier(&self, tier: Tier) -> bool {
        tier == Tier::Macro || self.cfg.lambda_small_nominal > 0.0
    }

    fn tier_weight(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.q1,
            Tier::Small => self.q2,
        }
    }

    fn tier_densities(&self, tier: Tier) -> (f64, f64) {
        match tier {
            Tier::Macro => (self.eq.lambda_eq_1, self.eq.lambda_eq_1_loaded),
            Tier::Small => (self.eq.lambda_eq_2, self.eq.lambda_eq_2_loaded),
        }
    }

    /// Upper integration limit for a serving-distance integrand with Gaussian
    /// coefficient `coeff` (in π·coeff·x²) and noise factor exp(−T σ² x^α / P).
    fn cutoff(&self, lower: f64, coeff: f64, t: f64, power: f64) -> f64 {
        let gauss = gaussian_cutoff(lower, coeff);
        let noise = self.cfg.noise_power();
        if noise > 0.0 && t > 0.0 {
            let x_noise = (40.0 * power / (t * noise)).powf(1.0 / self.cfg.alpha());
            gauss.min(x_noise.max(lower))
        } else {
            gauss
        }
    }

    /// P[SINR > T | served by `tier`] for linear threshold `t`.
    pub fn coverage_tier(&self, tier: Tier, t: f64) -> Result<f64> {
        check_threshold(t)?;
        if !self.has_tier(tier) {
            return Err(Error::domain("no small cell tier in a macro-only network"));
        }
        let value = self.serving_integral(tier, t, 0.0, f64::INFINITY, Adjust::NONE)?;
        Ok(value.clamp(0.0, 1.0))
    }

    /// ∫_lo^hi 2πλ_eq x exp(−Tσ²x^α/P_i − π(λ_eq + ρ(T)λ′_eq + adj.gauss)x² + adj.log_const + adj.log_fn(x)) dx.
    fn serving_integral(&self, tier: Tier, t: f64, lo: f64, hi: f64, adj: Adjust<'_>) -> Result<f64> {
        let (lambda_eq, loaded_eq) = self.tier_densities(tier);
        let alpha = self.cfg.alpha();
        let power = self.cfg.tier_power(tier);
        let noise_scale = t * self.cfg.noise_power() / power;
        let rho_t = rho(t, alpha)?;
        let coeff = lambda_eq + rho_t * loaded_eq + adj.gauss;
        let upper = hi.min(self.cutoff(lo, coeff, t, power));
        if upper <= lo {
            return Ok(0.0);
        }
        let f = |x: f64| {
            let mut log = -noise_scale * x.powf(alpha) - PI * coeff * x * x + adj.log_const;
            if let Some(g) = adj.log_fn {
                log += g(x);
            }
            2.0 * PI * lambda_eq * x * log.exp()
        };
        Ok(integrate(f, lo, upper, &self.quadrature)?.value)
    }

    /// Unconditioned coverage Σ_i Q_{i,u} p_{c,i,u}(T).
    pub fn coverage(&self, t: f64) -> Result<f64> {
        let mut total = 0.0;
        for tier in [Tier::Macro, Tier::Small] {
            if self.has_tier(tier) {
                total += self.tier_weight(tier) * self.coverage_tier(tier, t)?;
            }
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// P[served by `tier`, SINR > T | o ∈ `region`].
    ///
    /// The split into inner and outer parts keeps the approximations of the
    /// unconditioned expression: a small-cell user at distance y sees macro
    /// interferers beyond (P₁/P₂)^{1/α}·y, and the region is decided by the
    /// distance R₁ to the nearest macro BS.
    fn region_tier_mass(&self, region: Region, tier: Tier, t: f64) -> Result<f64> {
        if !self.has_tier(tier) {
            return Ok(0.0);
        }
        let weight = self.tier_weight(tier);
        if region == Region::Overall {
            return Ok(weight * self.coverage_tier(tier, t)?);
        }
        let d = self.cfg.inner_radius_m;
        let (p_inner, _) = region_split(self.cfg.lambda_macro, d);
        if region == Region::Inner && p_inner <= 0.0 {
            return Err(Error::domain("inner region is empty for D = 0"));
        }
        let l1 = self.cfg.lambda_macro;
        // exp(+πλ₁D²) = 1 / P[o ∈ outer], folded into the integrand.
        let outer_norm = PI * l1 * d * d;
        let bp = self.cfg.distance_ratio() * d;
        let macro_term = l1 / self.cfg.small_to_macro_factor();
        // Q_i · 2πλ_{i,eq} = 2πλ_i: the integrals below are joint masses.
        let mass = match (region, tier) {
            (Region::Inner, Tier::Macro) => {
                self.serving_integral(tier, t, 0.0, d, Adjust::NONE)? / p_inner
            }
            (Region::Outer, Tier::Macro) => self.serving_integral(
                tier,
                t,
                d,
                f64::INFINITY,
                Adjust { log_const: outer_norm, ..Adjust::NONE },
            )?,
            (Region::Inner, Tier::Small) => {
                // R₁ ∈ ((P₁/P₂)^{1/α}y, D]: exp(−πλ₁(P₁/P₂)^{2/α}y²) − exp(−πλ₁D²).
                let log_fn = |y: f64| {
                    let gap = PI * (l1 * d * d - macro_term * y * y);
                    (-(-gap).exp_m1()).max(f64::MIN_POSITIVE).ln()
                };
                let adj = Adjust { log_fn: Some(&log_fn), ..Adjust::NONE };
                self.serving_integral(tier, t, 0.0, bp, adj)? / p_inner
            }
            (Region::Outer, Tier::Small) => {
                // y ≤ bp: the macro void factor is exp(−πλ₁D²) rather than
                // exp(−πλ₁(P₁/P₂)^{2/α}y²); it cancels against P[o ∈ outer].
                let near = self.serving_integral(
                    tier,
                    t,
                    0.0,
                    bp,
                    Adjust { gauss: -macro_term, ..Adjust::NONE },
                )?;
                let far = self.serving_integral(
                    tier,
                    t,
                    bp,
                    f64::INFINITY,
                    Adjust { log_const: outer_norm, ..Adjust::NONE },
                )?;
                near + far
            }
            (Region::Overall, _) => unreachable!(),
        };
        Ok(weight * mass)
    }

    /// Coverage conditioned on the typical user's region.
    pub fn coverage_in(&self, region: Region, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let mut total = 0.0;
        for tier in [Tier::Macro, Tier::Small] {
            total += self.region_tier_mass(region, tier, t)?;
        }
        Ok(total.clamp(0.0, 1.0))
    }

    fn sharing_density(&self, tier: Tier) -> f64 {
        self.tier_densities(tier).0
    }

    /// P[R > rate | served by `tier`].
    pub fn throughput_tier(&self, tier: Tier, rate: f64) -> Result<f64> {
        check_rate(rate)?;
        let lambda_eq = self.sharing_density(tier);
        let w = self.cfg.bandwidth_hz;
        let sum = try_sum_series(
            |n| {
                let p = pmf_users_sharing_cell(n as u64, self.cfg.lambda_users, lambda_eq);
                Ok::<_, Error>(p * self.coverage_tier(tier, rate_threshold(rate, n, w))?)
            },
            &self.series,
        )?;
        Ok(sum.into_result()?.clamp(0.0, 1.0))
    }

    /// P[R > rate] mixed over tiers with Q_{i,u}.
    pub fn throughput(&self, rate: f64) -> Result<f64> {
        self.throughput_in(Region::Overall, rate)
    }

    /// Rate CCDF conditioned on the typical user's region.
    pub fn throughput_in(&self, region: Region, rate: f64) -> Result<f64> {
        check_rate(rate)?;
        let w = self.cfg.bandwidth_hz;
        let mut total = 0.0;
        for tier in [Tier::Macro, Tier::Small] {
            if !self.has_tier(tier) {
                continue;
            }
            let lambda_eq = self.sharing_density(tier);
            let sum = try_sum_series(
                |n| {
                    let p = pmf_users_sharing_cell(n as u64, self.cfg.lambda_users, lambda_eq);
                    Ok::<_, Error>(p * self.region_tier_mass(region, tier, rate_threshold(rate, n, w))?)
                },
                &self.series,
            )?;
            total += sum.into_result()?;
        }
        Ok(total.clamp(0.0, 1.0))
    }
}

#[derive(Clone, Copy)]
struct Adjust<'a> {
    /// Added to the Gaussian coefficient (before the factor π).
    gauss: f64,
    log_const: f64,
    log_fn: Option<&'a dyn Fn(f64) -> f64>,
}

impl Adjust<'_> {
    const NONE: Adjust<'static> = Adjust {
        gauss: 0.0,
        log_const: 0.0,
        log_fn: None,
    };
}

pub(crate) fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("SINR threshold must be positive (linear), got {t}")))
    }
}

pub(crate) fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("rate threshold must be positive, got {rate}")))
    }
}

/// SINR needed for rate `rate` when the bandwidth is shared by n + 1 users.
pub(crate) fn rate_threshold(rate: f64, others: usize, bandwidth: f64) -> f64 {
    ((others as f64 + 1.0) * rate / bandwidth * LN_2).exp_m1()
}

pub fn association_probs_uniform(cfg: &NetworkConfig) -> Result<(f64, f64)> {
    Ok(UniformModel::new(cfg)?.association())
}

pub fn loaded_densities_uniform(cfg: &NetworkConfig) -> Result<(f64, f64)> {
    Ok(UniformModel::new(cfg)?.loaded())
}

pub fn equivalent_densities_uniform(cfg: &NetworkConfig) -> Result<UniformEquivalentDensities> {
    Ok(UniformModel::new(cfg)?.equivalent())
}

pub fn coverage_uniform_tier(cfg: &NetworkConfig, tier: Tier, t: f64) -> Result<f64> {
    UniformModel::new(cfg)?.coverage_tier(tier, t)
}

pub fn coverage_uniform(cfg: &NetworkConfig, t: f64) -> Result<f64> {
    UniformModel::new(cfg)?.coverage(t)
}

pub fn throughput_ccdf_uniform(cfg: &NetworkConfig, rate: f64) -> Result<f64> {
    UniformModel::new(cfg)?.throughput(rate)
}

/// Helper for scenario-agnostic callers: rebuilds the config as Uniform
/// (or MacroOnly when λ₂ = 0) with the same nominal density.
pub fn as_uniform(cfg: &NetworkConfig) -> NetworkConfig {
    let scenario = if cfg.lambda_small_nominal > 0.0 {
        Scenario::Uniform
    } else {
        Scenario::MacroOnly
    };
    cfg.with_scenario(scenario, cfg.lambda_small_nominal)
}
