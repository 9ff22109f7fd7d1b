//! Scenario-agnostic front over the uniform and non-uniform expressions.

use crate::error::{Error, Result};
use crate::model::{db_to_linear, CcdfCurve, NetworkConfig, Region, Scenario};
use crate::nonuniform::NonUniformModel;
use crate::uniform::UniformModel;

#[derive(Debug, Clone)]
pub enum AnalyticModel {
    Uniform(UniformModel),
    NonUniform(NonUniformModel),
}

impl AnalyticModel {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        if cfg.scenario.is_non_uniform() {
            Ok(AnalyticModel::NonUniform(NonUniformModel::new(cfg)?))
        } else {
            Ok(AnalyticModel::Uniform(UniformModel::new(cfg)?))
        }
    }

    pub fn config(&self) -> &NetworkConfig {
        match self {
            AnalyticModel::Uniform(m) => m.config(),
            AnalyticModel::NonUniform(m) => m.config(),
        }
    }

    pub fn scenario(&self) -> Scenario {
        self.config().scenario
    }

    /// Probability that the typical user is served by the macro tier.
    pub fn macro_association(&self) -> f64 {
        match self {
            AnalyticModel::Uniform(m) => m.association().0,
            AnalyticModel::NonUniform(m) => m.derived.q1,
        }
    }

    /// P[SINR > t | region] for a linear threshold.
    pub fn coverage(&self, region: Region, t: f64) -> Result<f64> {
        match self {
            AnalyticModel::Uniform(m) => m.coverage_in(region, t),
            AnalyticModel::NonUniform(m) => m.coverage_in(region, t),
        }
    }

    pub fn coverage_db(&self, region: Region, t_db: f64) -> Result<f64> {
        self.coverage(region, db_to_linear(t_db))
    }

    /// P[R > rate | region].
    pub fn throughput(&self, region: Region, rate: f64) -> Result<f64> {
        match self {
            AnalyticModel::Uniform(m) => m.throughput_in(region, rate),
            AnalyticModel::NonUniform(m) => m.throughput_in(region, rate),
        }
    }

    pub fn coverage_curve(&self, region: Region, thresholds_db: &[f64]) -> Result<CcdfCurve> {
        let values = thresholds_db
            .iter()
            .map(|&t| self.coverage_db(region, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(CcdfCurve::analytic(self.scenario(), region, thresholds_db.to_vec(), values))
    }

    pub fn throughput_curve(&self, region: Region, rates: &[f64]) -> Result<CcdfCurve> {
        let values = rates
            .iter()
            .map(|&r| self.throughput(region, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(CcdfCurve::analytic(self.scenario(), region, rates.to_vec(), values))
    }

    /// Smallest rate whose CCDF is at most `level`, by bisection.
    pub fn rate_quantile(&self, region: Region, level: f64) -> Result<f64> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {level}")));
        }
        let mut lo = 1e-6;
        if self.throughput(region, lo)? <= level {
            return Ok(lo);
        }
        let mut hi = 0.01;
        while self.throughput(region, hi)? > level {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::domain("rate quantile not bracketed"));
            }
        }
        while hi - lo > 1e-6 * hi {
            let mid = 0.5 * (lo + hi);
            if self.throughput(region, mid)? > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatches_by_scenario() {
        for scenario in Scenario::ALL {
            let m = AnalyticModel::new(&NetworkConfig::paper(scenario, 10.0, 500.0)).unwrap();
            assert_eq!(m.scenario(), scenario);
            assert_eq!(matches!(m, AnalyticModel::NonUniform(_)), scenario.is_non_uniform());
            let c = m.coverage_curve(Region::Overall, &[-10.0, 0.0, 10.0]).unwrap();
            assert!(c.is_monotone(0.0));
        }
    }

    #[test]
    fn quantile_brackets_level() {
        let m = AnalyticModel::new(&NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0)).unwrap();
        let q = m.rate_quantile(Region::Overall, 0.9).unwrap();
        assert!(m.throughput(Region::Overall, q).unwrap() <= 0.9);
        assert!(m.throughput(Region::Overall, q * 0.999).unwrap() > 0.9);
        assert!((q - 0.025).abs() < 0.15 * 0.025, "{q}");
        assert!(m.rate_quantile(Region::Overall, 1.0).is_err());
    }
}
