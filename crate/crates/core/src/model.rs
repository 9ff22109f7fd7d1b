//! Shared configuration and result types.
//!
//! Everything inside the crate works in SI units: meters, watts and points
//! per square meter. dB, dBm and per-km² only appear at the edges (config
//! files, presets, CSV output).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Square meters per square kilometer.
pub const M2_PER_KM2: f64 = 1.0e6;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

/// Converts a density given per km² into points per m².
pub fn per_km2(density: f64) -> f64 {
    density / M2_PER_KM2
}

/// Deployment scheme for the small cell tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Macro cells only, no small cell tier.
    MacroOnly,
    /// Small cells form a homogeneous PPP over the whole plane.
    Uniform,
    /// Small cells deployed uniformly but only those in the outer region are active.
    NonUniformI,
    /// All small cells placed in the outer region at density λ₂ / P[o ∈ outer].
    NonUniformII,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::MacroOnly,
        Scenario::Uniform,
        Scenario::NonUniformI,
        Scenario::NonUniformII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::MacroOnly => "MacroOnly",
            Scenario::Uniform => "Uniform",
            Scenario::NonUniformI => "NonUniformI",
            Scenario::NonUniformII => "NonUniformII",
        }
    }

    pub fn is_non_uniform(self) -> bool {
        matches!(self, Scenario::NonUniformI | Scenario::NonUniformII)
    }

    pub fn has_small_cells(self) -> bool {
        self != Scenario::MacroOnly
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "macroonly" | "macro" => Ok(Scenario::MacroOnly),
            "uniform" => Ok(Scenario::Uniform),
            "nonuniformi" | "scenarioi" | "i" => Ok(Scenario::NonUniformI),
            "nonuniformii" | "scenarioii" | "ii" => Ok(Scenario::NonUniformII),
            _ => Err(Error::config(format!("unknown scenario `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Macro,
    Small,
}

/// Location of the typical user relative to the macro tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Within distance D of some macro BS.
    Inner,
    /// Farther than D from every macro BS.
    Outer,
    /// Unconditioned.
    Overall,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::Outer => "outer",
            Region::Overall => "overall",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "analytic" | "analytical" => Ok(Method::Analytic),
            "montecarlo" | "mc" | "sim" | "simulation" => Ok(Method::MonteCarlo),
            _ => Err(Error::config(format!("unknown method `{s}`"))),
        }
    }
}

/// Physical and deployment parameters of the two-tier network.
///
/// Powers are in dBm, losses in dB, densities in points per m², lengths in
/// meters. Use [`NetworkConfig::validate`] (or [`NetworkConfig::paper`]) to
/// obtain a checked value; the derived accessors assume validity.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub p_tx_macro: f64,
    pub p_tx_small: f64,
    pub path_loss_exponent: f64,
    pub path_loss_const_db: f64,
    pub lambda_macro: f64,
    pub lambda_small_nominal: f64,
    pub lambda_users: f64,
    pub noise_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub inner_radius_m: f64,
    pub scenario: Scenario,
}

impl NetworkConfig {
    /// Reference parameter set: 46/20 dBm, α = 4, L0 = −34 dB, λ₁ = 1/km²,
    /// λ_MS = 10/km², σ² = −104 dBm, W = 1 Hz, with λ₂ = `density_ratio`·λ₁.
    ///
    /// For `MacroOnly` the ratio is ignored and λ₂ is forced to zero.
    pub fn paper(scenario: Scenario, density_ratio: f64, inner_radius_m: f64) -> Self {
        let lambda_macro = per_km2(1.0);
        let lambda_small_nominal = if scenario == Scenario::MacroOnly {
            0.0
        } else {
            density_ratio * lambda_macro
        };
        NetworkConfig {
            p_tx_macro: 46.0,
            p_tx_small: 20.0,
            path_loss_exponent: 4.0,
            path_loss_const_db: -34.0,
            lambda_macro,
            lambda_small_nominal,
            lambda_users: per_km2(10.0),
            noise_power_dbm: -104.0,
            bandwidth_hz: 1.0,
            inner_radius_m,
            scenario,
        }
    }

    /// Same network with a different scenario; λ₂ is zeroed for `MacroOnly`
    /// and restored from `nominal_small` otherwise.
    pub fn with_scenario(&self, scenario: Scenario, nominal_small: f64) -> Self {
        let mut cfg = self.clone();
        cfg.scenario = scenario;
        cfg.lambda_small_nominal = if scenario == Scenario::MacroOnly {
            0.0
        } else {
            nominal_small
        };
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("p_tx_macro", self.p_tx_macro),
            ("p_tx_small", self.p_tx_small),
            ("path_loss_exponent", self.path_loss_exponent),
            ("path_loss_const_db", self.path_loss_const_db),
            ("lambda_macro", self.lambda_macro),
            ("lambda_small_nominal", self.lambda_small_nominal),
            ("lambda_users", self.lambda_users),
            ("bandwidth_hz", self.bandwidth_hz),
            ("inner_radius_m", self.inner_radius_m),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(format!("{name} must be finite, got {v}")));
            }
        }
        // -inf dBm is allowed and means a noise-free network.
        if self.noise_power_dbm.is_nan() || self.noise_power_dbm == f64::INFINITY {
            return Err(Error::config("noise_power_dbm must be finite or -inf"));
        }
        if self.path_loss_exponent <= 2.0 {
            return Err(Error::config(format!(
                "path_loss_exponent must exceed 2, got {}",
                self.path_loss_exponent
            )));
        }
        if self.lambda_macro <= 0.0 {
            return Err(Error::config("lambda_macro must be positive"));
        }
        if self.lambda_users <= 0.0 {
            return Err(Error::config("lambda_users must be positive"));
        }
        match self.scenario {
            Scenario::MacroOnly if self.lambda_small_nominal != 0.0 => {
                return Err(Error::config(
                    "lambda_small_nominal must be 0 for the MacroOnly scenario",
                ))
            }
            Scenario::MacroOnly => {}
            _ if self.lambda_small_nominal <= 0.0 => {
                return Err(Error::config(format!(
                    "lambda_small_nominal must be positive for scenario {}",
                    self.scenario
                )))
            }
            _ => {}
        }
        if self.inner_radius_m < 0.0 {
            return Err(Error::config("inner_radius_m must be non-negative"));
        }
        if self.bandwidth_hz <= 0.0 {
            return Err(Error::config("bandwidth_hz must be positive"));
        }
        Ok(())
    }

    /// P₁ = P_tx,1 · L0 in watts at the 1 m reference distance.
    pub fn macro_power(&self) -> f64 {
        dbm_to_watts(self.p_tx_macro) * db_to_linear(self.path_loss_const_db)
    }

    /// P₂ = P_tx,2 · L0 in watts at the 1 m reference distance.
    pub fn small_power(&self) -> f64 {
        dbm_to_watts(self.p_tx_small) * db_to_linear(self.path_loss_const_db)
    }

    pub fn tier_power(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.macro_power(),
            Tier::Small => self.small_power(),
        }
    }

    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    pub fn alpha(&self) -> f64 {
        self.path_loss_exponent
    }

    /// (P₂/P₁)^{2/α}: scales small cell density into macro-equivalent density.
    pub fn small_to_macro_factor(&self) -> f64 {
        (self.small_power() / self.macro_power()).powf(2.0 / self.alpha())
    }

    /// (P₂/P₁)^{1/α}: a small BS at distance r competes with a macro BS at r / this.
    pub fn distance_ratio(&self) -> f64 {
        (self.small_power() / self.macro_power()).powf(1.0 / self.alpha())
    }

    /// True when the macro tier is the stronger one, which the non-uniform
    /// approximations presume.
    pub fn macro_dominant(&self) -> bool {
        self.macro_power() > self.small_power()
    }
}

/// Probabilities and loaded densities of the non-uniform model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedDensities {
    /// P[κ = 1]: typical user served by the macro tier.
    pub q1: f64,
    /// P[κ = 2 | o ∈ outer].
    pub q2_outer: f64,
    /// Density of loaded macro BSs over the whole plane.
    pub lambda_loaded_macro: f64,
    /// Density of loaded small BSs within the outer region.
    pub lambda_loaded_small: f64,
}

impl DerivedDensities {
    pub fn q1_outer(&self) -> f64 {
        1.0 - self.q2_outer
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveScenarioDensity {
    /// Small cell density inside the outer region (whole plane for Uniform).
    pub small_density_in_outer: f64,
    /// Small cell density averaged over the whole plane.
    pub mean_density_whole_plane: f64,
}

/// Small cell bookkeeping for each scenario.
pub fn effective_small_density(cfg: &NetworkConfig) -> Result<EffectiveScenarioDensity> {
    cfg.validate()?;
    let (_, p_outer) = region_probabilities(cfg)?;
    let nominal = cfg.lambda_small_nominal;
    Ok(match cfg.scenario {
        Scenario::MacroOnly => EffectiveScenarioDensity {
            small_density_in_outer: 0.0,
            mean_density_whole_plane: 0.0,
        },
        Scenario::Uniform => EffectiveScenarioDensity {
            small_density_in_outer: nominal,
            mean_density_whole_plane: nominal,
        },
        Scenario::NonUniformI => EffectiveScenarioDensity {
            small_density_in_outer: nominal,
            mean_density_whole_plane: nominal * p_outer,
        },
        Scenario::NonUniformII => {
            let outer = nominal / p_outer;
            EffectiveScenarioDensity {
                small_density_in_outer: outer,
                mean_density_whole_plane: outer * p_outer,
            }
        }
    })
}

/// (P[o ∈ inner], P[o ∈ outer]) from the void probability of the macro PPP.
pub fn region_probabilities(cfg: &NetworkConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    Ok(region_split(cfg.lambda_macro, cfg.inner_radius_m))
}

pub(crate) fn region_split(lambda_macro: f64, d: f64) -> (f64, f64) {
    let p_outer = (-PI * lambda_macro * d * d).exp();
    (1.0 - p_outer, p_outer)
}

/// Grid of thresholds with estimated CCDF values.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    /// Sorted axis values: SINR thresholds in dB, rates in bps, or sweep values.
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub scenario: Scenario,
    pub region: Region,
    /// Wilson 95% interval per point; Monte Carlo curves only.
    pub intervals: Option<Vec<(f64, f64)>>,
}

impl CcdfCurve {
    pub fn analytic(
        scenario: Scenario,
        region: Region,
        thresholds: Vec<f64>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(thresholds.len(), values.len());
        CcdfCurve {
            thresholds,
            values,
            method: Method::Analytic,
            scenario,
            region,
            intervals: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Non-increasing within `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}
