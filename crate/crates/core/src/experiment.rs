//! Experiment specification, config files, sweeps and CSV output.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analytic::AnalyticModel;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, CcdfCurve, Method, NetworkConfig, Region, Scenario};
use crate::montecarlo::{run_trials, Execution, SimSettings, TrialSet};

pub const CSV_HEADER: &str = "axis,axis_value,scenario,method,value,ci_low,ci_high";

/// Quantity swept along the CSV `axis` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    SinrThresholdDb,
    RateBps,
    InnerRadiusM,
    DensityRatio,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::SinrThresholdDb => "sinr_threshold_db",
            Axis::RateBps => "rate_bps",
            Axis::InnerRadiusM => "inner_radius_m",
            Axis::DensityRatio => "density_ratio",
        }
    }

    /// True for the CCDF axes, along which curves must be non-increasing.
    pub fn is_ccdf(self) -> bool {
        matches!(self, Axis::SinrThresholdDb | Axis::RateBps)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sinr_threshold_db" | "sinr" | "threshold" => Ok(Axis::SinrThresholdDb),
            "rate_bps" | "rate" => Ok(Axis::RateBps),
            "inner_radius_m" | "d" | "radius" => Ok(Axis::InnerRadiusM),
            "density_ratio" | "ratio" => Ok(Axis::DensityRatio),
            _ => Err(Error::Experiment(format!("unknown axis `{s}`"))),
        }
    }
}

/// What is evaluated at each point of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// P[SINR > level], level in dB.
    Coverage,
    /// P[R > level], level in bps.
    Throughput,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coverage" => Ok(Measure::Coverage),
            "throughput" | "rate" => Ok(Measure::Throughput),
            _ => Err(Error::Experiment(format!("unknown measure `{s}`"))),
        }
    }
}

/// A full experimental matrix.
///
/// One curve is produced per (scenario, density ratio, level, region,
/// method). `levels` only matters on the parameter axes; on the SINR and
/// rate axes the grid itself holds the thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: NetworkConfig,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub scenarios: Vec<Scenario>,
    pub methods: Vec<Method>,
    pub regions: Vec<Region>,
    /// λ₂/λ₁ values; empty means the ratio of `base`.
    pub density_ratios: Vec<f64>,
    pub measure: Measure,
    pub levels: Vec<f64>,
    pub sim: SimSettings,
    /// Use [`SimSettings::default_window`] for each network instead of
    /// `sim.window_radius_m`.
    pub auto_window: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Spec with one overall curve per scenario along `axis`.
    pub fn new(base: NetworkConfig, axis: Axis, grid: Vec<f64>, scenarios: Vec<Scenario>) -> Self {
        let sim = SimSettings::for_config(&base, 10_000, 1);
        ExperimentSpec {
            base,
            axis,
            grid,
            scenarios,
            methods: vec![Method::Analytic],
            regions: vec![Region::Overall],
            density_ratios: Vec::new(),
            measure: if axis == Axis::RateBps { Measure::Throughput } else { Measure::Coverage },
            levels: Vec::new(),
            sim,
            auto_window: true,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Experiment(m.to_string()));
        if self.grid.is_empty() {
            return fail("axis grid is empty");
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return fail("axis grid contains a non-finite value");
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return fail("axis grid must be sorted in increasing order");
        }
        if self.scenarios.is_empty() {
            return fail("scenario list is empty");
        }
        if self.methods.is_empty() {
            return fail("method list is empty");
        }
        if self.regions.is_empty() {
            return fail("region list is empty");
        }
        match self.axis {
            Axis::RateBps if self.measure != Measure::Throughput => {
                return fail("rate axis requires the throughput measure")
            }
            Axis::SinrThresholdDb if self.measure != Measure::Coverage => {
                return fail("SINR axis requires the coverage measure")
            }
            Axis::InnerRadiusM | Axis::DensityRatio if self.levels.is_empty() => {
                return fail("parameter sweeps need at least one level")
            }
            Axis::InnerRadiusM | Axis::DensityRatio if self.levels.iter().any(|v| !v.is_finite()) => {
                return fail("levels must be finite")
            }
            _ => {}
        }
        if self.axis == Axis::RateBps && self.grid[0] <= 0.0 {
            return fail("rates must be positive");
        }
        if self.axis == Axis::DensityRatio && self.grid[0] <= 0.0 {
            return fail("density ratios must be positive");
        }
        if self.axis == Axis::InnerRadiusM && self.grid[0] < 0.0 {
            return fail("inner radius must be non-negative");
        }
        if self.density_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return fail("density ratios must be positive");
        }
        for cfg in self.networks().into_iter().flat_map(|(_, _, v)| v) {
            cfg.validate()?;
            self.sim_for(&cfg).validate(&cfg)?;
        }
        Ok(())
    }

    fn ratios(&self) -> Vec<f64> {
        if self.density_ratios.is_empty() {
            vec![self.base.lambda_small_nominal / self.base.lambda_macro]
        } else {
            self.density_ratios.clone()
        }
    }

    /// Networks to evaluate, per (scenario, ratio): one for the CCDF axes,
    /// one per grid point for parameter axes.
    fn networks(&self) -> Vec<(Scenario, f64, Vec<NetworkConfig>)> {
        let mut out = Vec::new();
        for &scenario in &self.scenarios {
            for ratio in self.ratios() {
                let at = |ratio: f64| self.base.with_scenario(scenario, ratio * self.base.lambda_macro);
                let cfgs = match self.axis {
                    Axis::SinrThresholdDb | Axis::RateBps => vec![at(ratio)],
                    Axis::InnerRadiusM => self
                        .grid
                        .iter()
                        .map(|&d| NetworkConfig { inner_radius_m: d, ..at(ratio) })
                        .collect(),
                    Axis::DensityRatio => self.grid.iter().map(|&r| at(r)).collect(),
                };
                out.push((scenario, ratio, cfgs));
            }
        }
        out
    }

    fn sim_for(&self, cfg: &NetworkConfig) -> SimSettings {
        let mut sim = self.sim.clone();
        if self.auto_window {
            sim.window_radius_m = SimSettings::default_window(cfg);
        }
        sim
    }

    fn label(&self, scenario: Scenario, ratio: f64, level: Option<f64>, region: Region) -> String {
        let mut label = scenario.name().to_string();
        if region != Region::Overall {
            label.push(':');
            label.push_str(region.name());
        }
        if self.density_ratios.len() > 1 && self.axis != Axis::DensityRatio {
            let _ = write!(label, ":ratio={}", format_sig9(ratio));
        }
        if let Some(level) = level.filter(|_| self.levels.len() > 1) {
            match self.measure {
                Measure::Coverage => {
                    let _ = write!(label, ":T={}dB", format_sig9(level));
                }
                Measure::Throughput => {
                    let _ = write!(label, ":rate={}bps", format_sig9(level));
                }
            }
        }
        label
    }
}

/// One emitted curve with its CSV series label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCurve {
    pub label: String,
    pub curve: CcdfCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub axis: Axis,
    pub curves: Vec<LabeledCurve>,
    pub csv: String,
}

/// Runs every (scenario, method) pipeline of `spec`, renders the CSV and
/// writes it to `spec.output` when set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let levels: Vec<Option<f64>> = if spec.axis.is_ccdf() {
        vec![None]
    } else {
        spec.levels.iter().copied().map(Some).collect()
    };
    let mut curves = Vec::new();
    for (scenario, ratio, cfgs) in spec.networks() {
        // Each network is evaluated once per method; all curves reuse it.
        let mut per_method: Vec<(Method, Vec<Evaluator>)> = Vec::new();
        for &method in &spec.methods {
            let evals = cfgs
                .iter()
                .map(|cfg| Evaluator::new(method, cfg, spec.sim_for(cfg)))
                .collect::<Result<Vec<_>>>()?;
            per_method.push((method, evals));
        }
        for &level in &levels {
            for &region in &spec.regions {
                let label = spec.label(scenario, ratio, level, region);
                for (method, evals) in &per_method {
                    let curve = match level {
                        None => evals[0].curve(spec.measure, region, &spec.grid)?,
                        Some(level) => {
                            let mut values = Vec::with_capacity(evals.len());
                            let mut intervals = Vec::with_capacity(evals.len());
                            for e in evals {
                                let (v, ci) = e.point(spec.measure, region, level)?;
                                values.push(v);
                                intervals.extend(ci);
                            }
                            CcdfCurve {
                                thresholds: spec.grid.clone(),
                                values,
                                method: *method,
                                scenario,
                                region,
                                intervals: (*method == Method::MonteCarlo).then_some(intervals),
                            }
                        }
                    };
                    curves.push(LabeledCurve { label: label.clone(), curve });
                }
            }
        }
    }
    let csv = render_csv(spec.axis, &curves);
    if let Some(path) = &spec.output {
        write_file(path, &csv)?;
    }
    Ok(ExperimentOutput { axis: spec.axis, curves, csv })
}

enum Evaluator {
    Analytic(AnalyticModel),
    MonteCarlo(TrialSet),
}

impl Evaluator {
    fn new(method: Method, cfg: &NetworkConfig, sim: SimSettings) -> Result<Self> {
        Ok(match method {
            Method::Analytic => Evaluator::Analytic(AnalyticModel::new(cfg)?),
            Method::MonteCarlo => Evaluator::MonteCarlo(run_trials(cfg, &sim)?),
        })
    }

    fn curve(&self, measure: Measure, region: Region, grid: &[f64]) -> Result<CcdfCurve> {
        match (self, measure) {
            (Evaluator::Analytic(m), Measure::Coverage) => m.coverage_curve(region, grid),
            (Evaluator::Analytic(m), Measure::Throughput) => m.throughput_curve(region, grid),
            (Evaluator::MonteCarlo(t), Measure::Coverage) => t.coverage_curve(region, grid),
            (Evaluator::MonteCarlo(t), Measure::Throughput) => t.throughput_curve(region, grid),
        }
    }

    fn point(&self, measure: Measure, region: Region, level: f64) -> Result<(f64, Option<(f64, f64)>)> {
        match self {
            Evaluator::Analytic(m) => {
                let v = match measure {
                    Measure::Coverage => m.coverage(region, db_to_linear(level))?,
                    Measure::Throughput => m.throughput(region, level)?,
                };
                Ok((v, None))
            }
            Evaluator::MonteCarlo(_) => {
                let c = self.curve(measure, region, &[level])?;
                let ci = c.intervals.as_ref().map(|v| v[0]);
                Ok((c.values[0], ci))
            }
        }
    }
}

/// Formats like C's `%.9g`: nine significant digits, trailing zeros removed.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV text for `curves`, one row per curve point.
pub fn render_csv(axis: Axis, curves: &[LabeledCurve]) -> String {
    let mut out = String::with_capacity(64 * curves.iter().map(|c| c.curve.len()).sum::<usize>());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for LabeledCurve { label, curve } in curves {
        for (i, (&x, &v)) in curve.thresholds.iter().zip(&curve.values).enumerate() {
            let (lo, hi) = match &curve.intervals {
                Some(ci) => (format_sig9(ci[i].0), format_sig9(ci[i].1)),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                axis.name(),
                format_sig9(x),
                label,
                curve.method.name(),
                format_sig9(v),
                lo,
                hi
            );
        }
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Agreement between an analytic and a Monte Carlo curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareReport {
    pub max_gap: f64,
    pub threshold_at_max_gap: f64,
    /// Fraction of grid points where the analytic value lies inside the
    /// Monte Carlo 95% interval.
    pub fraction_inside_ci: f64,
}

pub fn compare_report(analytic: &CcdfCurve, mc: &CcdfCurve) -> Result<CompareReport> {
    if analytic.thresholds != mc.thresholds || analytic.is_empty() {
        return Err(Error::Experiment("curves must share a non-empty grid".into()));
    }
    let mut report = CompareReport {
        max_gap: 0.0,
        threshold_at_max_gap: analytic.thresholds[0],
        fraction_inside_ci: 0.0,
    };
    let mut inside = 0usize;
    for (i, (&a, &m)) in analytic.values.iter().zip(&mc.values).enumerate() {
        let gap = (a - m).abs();
        if gap > report.max_gap {
            report.max_gap = gap;
            report.threshold_at_max_gap = analytic.thresholds[i];
        }
        let (lo, hi) = match &mc.intervals {
            Some(ci) => ci[i],
            None => (m, m),
        };
        if lo <= a && a <= hi {
            inside += 1;
        }
    }
    report.fraction_inside_ci = inside as f64 / analytic.len() as f64;
    Ok(report)
}

/// Analytic vs Monte Carlo coverage over `thresholds_db` for every
/// scenario and region at `base`.
pub fn validation_suite(
    base: &NetworkConfig,
    sim: &SimSettings,
    thresholds_db: &[f64],
) -> Result<Vec<(Scenario, Region, CompareReport)>> {
    let mut out = Vec::new();
    let ratio = base.lambda_small_nominal / base.lambda_macro;
    for scenario in Scenario::ALL {
        let cfg = base.with_scenario(scenario, ratio * base.lambda_macro);
        let model = AnalyticModel::new(&cfg)?;
        let trials = run_trials(&cfg, sim)?;
        for region in [Region::Inner, Region::Outer, Region::Overall] {
            let a = model.coverage_curve(region, thresholds_db)?;
            let m = trials.coverage_curve(region, thresholds_db)?;
            out.push((scenario, region, compare_report(&a, &m)?));
        }
    }
    Ok(out)
}

/// Values read from a config file; absent simulation keys stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub network: NetworkConfig,
    pub window_radius_m: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub parallel_streams: Option<usize>,
    pub execution: Option<Execution>,
}

impl ConfigFile {
    /// Applies the simulation keys on top of `sim`.
    pub fn apply(&self, sim: &mut SimSettings) {
        if let Some(v) = self.window_radius_m {
            sim.window_radius_m = v;
        }
        if let Some(v) = self.trials {
            sim.trials = v;
        }
        if let Some(v) = self.seed {
            sim.seed = v;
        }
        if let Some(v) = self.parallel_streams {
            sim.parallel_streams = v;
        }
        if let Some(v) = self.execution {
            sim.execution = v;
        }
    }
}

/// Parses `key = value` lines over the reference network (Uniform,
/// λ₂/λ₁ = 10, D = 500 m). The result is validated.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut file = ConfigFile {
        network: NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0),
        window_radius_m: None,
        trials: None,
        seed: None,
        parallel_streams: None,
        execution: None,
    };
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| Error::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        let float = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| err(format!("`{key}` expects a number, got `{value}`")))
        };
        let int = || -> Result<u64> {
            value
                .parse::<u64>()
                .map_err(|_| err(format!("`{key}` expects a non-negative integer, got `{value}`")))
        };
        let n = &mut file.network;
        match key {
            "p_tx_macro" => n.p_tx_macro = float()?,
            "p_tx_small" => n.p_tx_small = float()?,
            "path_loss_exponent" => n.path_loss_exponent = float()?,
            "path_loss_const_db" => n.path_loss_const_db = float()?,
            "lambda_macro" => n.lambda_macro = float()?,
            "lambda_small_nominal" => n.lambda_small_nominal = float()?,
            "lambda_users" => n.lambda_users = float()?,
            "noise_power_dbm" => n.noise_power_dbm = float()?,
            "bandwidth_hz" => n.bandwidth_hz = float()?,
            "inner_radius_m" => n.inner_radius_m = float()?,
            "scenario" => n.scenario = value.parse().map_err(|e: Error| err(e.to_string()))?,
            "window_radius_m" => file.window_radius_m = Some(float()?),
            "trials" => file.trials = Some(int()? as usize),
            "seed" => file.seed = Some(int()?),
            "parallel_streams" => file.parallel_streams = Some(int()? as usize),
            "execution" => {
                file.execution = Some(value.parse().map_err(|e: Error| err(e.to_string()))?)
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    if file.network.scenario == Scenario::MacroOnly && !seen.contains("lambda_small_nominal") {
        file.network.lambda_small_nominal = 0.0;
    }
    file.network.validate()?;
    Ok(file)
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

/// `start, start + step, …` up to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// `per_decade` log-spaced points from `start` to `stop` inclusive.
pub fn log_grid(start: f64, stop: f64, per_decade: usize) -> Vec<f64> {
    let decades = (stop / start).log10();
    let n = (decades * per_decade as f64).round() as usize;
    (0..=n)
        .map(|i| start * 10f64.powf(i as f64 / per_decade as f64))
        .collect()
}

/// SINR thresholds used by the coverage presets: −10 to 20 dB in 1 dB steps.
pub fn default_sinr_grid() -> Vec<f64> {
    linear_grid(-10.0, 20.0, 1.0)
}

/// Rates used by the throughput presets: 10⁻³ to 10 bps, 10 per decade.
pub fn default_rate_grid() -> Vec<f64> {
    log_grid(1e-3, 10.0, 10)
}

/// Inner radii used by the sweep presets: 100 to 1000 m in 50 m steps.
pub fn default_radius_grid() -> Vec<f64> {
    linear_grid(100.0, 1000.0, 50.0)
}

/// Preset for figure `n` (2 to 7) at the reference parameters.
pub fn figure_preset(n: u32) -> Result<ExperimentSpec> {
    let base = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
    let regions = vec![Region::Inner, Region::Outer, Region::Overall];
    let spec = match n {
        2 => ExperimentSpec {
            regions,
            ..ExperimentSpec::new(base, Axis::SinrThresholdDb, default_sinr_grid(), vec![Scenario::NonUniformI])
        },
        3 => ExperimentSpec::new(base, Axis::SinrThresholdDb, default_sinr_grid(), Scenario::ALL.to_vec()),
        4 => ExperimentSpec {
            density_ratios: vec![10.0, 5.0],
            levels: vec![-5.0, 10.0],
            ..ExperimentSpec::new(base, Axis::InnerRadiusM, default_radius_grid(), Scenario::ALL.to_vec())
        },
        5 => ExperimentSpec {
            regions: vec![Region::Inner, Region::Outer],
            ..ExperimentSpec::new(
                base,
                Axis::RateBps,
                default_rate_grid(),
                vec![Scenario::NonUniformI, Scenario::NonUniformII],
            )
        },
        6 => ExperimentSpec::new(base, Axis::RateBps, default_rate_grid(), Scenario::ALL.to_vec()),
        7 => ExperimentSpec {
            density_ratios: vec![10.0, 5.0],
            measure: Measure::Throughput,
            levels: vec![0.02, 1.0],
            ..ExperimentSpec::new(base, Axis::InnerRadiusM, default_radius_grid(), Scenario::ALL.to_vec())
        },
        _ => return Err(Error::Experiment(format!("no preset for figure {n}; expected 2 to 7"))),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::wilson_interval;
    use proptest::prelude::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(-5.0), "-5");
        assert_eq!(format_sig9(0.1), "0.1");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(2.0 / 3.0 * 1e-7), "6.66666667e-08");
        assert_eq!(format_sig9(123456789.0), "123456789");
        assert_eq!(format_sig9(1234567891.0), "1.23456789e+09");
        assert_eq!(format_sig9(1e-5), "1e-05");
        assert_eq!(format_sig9(1.5e-4), "0.00015");
        assert_eq!(format_sig9(0.9999999999), "1");
        assert_eq!(format_sig9(f64::NEG_INFINITY), "-inf");
    }

    proptest! {
        #[test]
        fn sig9_round_trips_to_nine_digits(x in -1e12f64..1e12) {
            let y: f64 = format_sig9(x).parse().unwrap();
            prop_assert!((x - y).abs() <= 5e-9 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn config_parsing() {
        let text = "# test\nscenario = NonUniformII\ninner_radius_m = 600 # meters\n\nnoise_power_dbm = -inf\ntrials = 20\nexecution = sequential\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.network.scenario, Scenario::NonUniformII);
        assert_eq!(c.network.inner_radius_m, 600.0);
        assert_eq!(c.network.noise_power_dbm, f64::NEG_INFINITY);
        assert_eq!(c.trials, Some(20));
        assert_eq!(c.execution, Some(Execution::Sequential));
        assert_eq!(c.seed, None);
        let mut sim = SimSettings::for_config(&c.network, 5, 3);
        c.apply(&mut sim);
        assert_eq!((sim.trials, sim.seed), (20, 3));

        let macro_only = parse_config("scenario = MacroOnly").unwrap();
        assert_eq!(macro_only.network.lambda_small_nominal, 0.0);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        assert!(matches!(parse_config("p_tx_macro = 46\nlambda_smal = 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_config("seed = -1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("seed 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("seed = 1\nseed = 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_config("path_loss_exponent = 2"), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn grids() {
        let d = default_radius_grid();
        assert_eq!(d.len(), 19);
        assert_eq!((d[0], d[18]), (100.0, 1000.0));
        assert_eq!(default_sinr_grid().len(), 31);
        let r = default_rate_grid();
        assert_eq!(r.len(), 41);
        assert!((r[40] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let base = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
        let ok = ExperimentSpec::new(base.clone(), Axis::SinrThresholdDb, vec![0.0, 1.0], vec![Scenario::Uniform]);
        assert!(ok.validate().is_ok());
        assert!(ExperimentSpec { scenarios: vec![], ..ok.clone() }.validate().is_err());
        assert!(ExperimentSpec { grid: vec![], ..ok.clone() }.validate().is_err());
        assert!(ExperimentSpec { grid: vec![1.0, 0.0], ..ok.clone() }.validate().is_err());
        assert!(ExperimentSpec { methods: vec![], ..ok.clone() }.validate().is_err());
        let sweep = ExperimentSpec::new(base, Axis::InnerRadiusM, vec![100.0], vec![Scenario::Uniform]);
        assert!(sweep.validate().is_err());
        assert!(ExperimentSpec { levels: vec![-5.0], ..sweep }.validate().is_ok());
        for n in 2..=7 {
            figure_preset(n).unwrap().validate().unwrap();
        }
        assert!(figure_preset(8).is_err());
    }

    #[test]
    fn compare_identical_and_offset() {
        let a = CcdfCurve::analytic(Scenario::Uniform, Region::Overall, vec![0.0, 1.0, 2.0], vec![0.9, 0.5, 0.1]);
        let same = CcdfCurve { method: Method::MonteCarlo, intervals: Some(vec![(0.85, 0.95); 3]), ..a.clone() };
        let r = compare_report(&a, &same).unwrap();
        assert_eq!(r.max_gap, 0.0);
        let mut shifted = same.clone();
        shifted.values = vec![0.95, 0.55, 0.15];
        let r = compare_report(&a, &shifted).unwrap();
        assert!((r.max_gap - 0.05).abs() < 1e-12);
        assert!((r.fraction_inside_ci - 1.0 / 3.0).abs() < 1e-12);
        shifted.values = vec![0.9, 0.6, 0.1];
        assert_eq!(compare_report(&a, &shifted).unwrap().threshold_at_max_gap, 1.0);
        let other = CcdfCurve { thresholds: vec![0.0, 1.0, 3.0], ..same };
        assert!(compare_report(&a, &other).is_err());
    }

    #[test]
    fn analytic_csv_layout() {
        let base = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
        let spec = ExperimentSpec {
            regions: vec![Region::Overall, Region::Inner],
            ..ExperimentSpec::new(base, Axis::SinrThresholdDb, vec![-5.0, 0.0], vec![Scenario::NonUniformI])
        };
        let out = run_experiment(&spec).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("sinr_threshold_db,-5,NonUniformI,analytic,0."));
        assert!(lines[1].ends_with(",,"));
        assert!(lines[3].starts_with("sinr_threshold_db,-5,NonUniformI:inner,analytic,"));
        assert!(out.curves.iter().all(|c| c.curve.is_monotone(0.0)));
    }

    #[test]
    fn parameter_sweep_labels_and_mc_intervals() {
        let base = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
        let mut spec = ExperimentSpec {
            density_ratios: vec![10.0, 5.0],
            levels: vec![-5.0, 10.0],
            methods: vec![Method::Analytic, Method::MonteCarlo],
            ..ExperimentSpec::new(base, Axis::InnerRadiusM, vec![300.0, 500.0], vec![Scenario::NonUniformII])
        };
        spec.sim.trials = 50;
        let out = run_experiment(&spec).unwrap();
        assert_eq!(out.curves.len(), 8);
        assert_eq!(out.curves[0].label, "NonUniformII:ratio=10:T=-5dB");
        assert_eq!(out.curves[7].label, "NonUniformII:ratio=5:T=10dB");
        for c in &out.curves {
            assert_eq!(c.curve.intervals.is_some(), c.curve.method == Method::MonteCarlo);
        }
        let ci = out.curves[1].curve.intervals.as_ref().unwrap();
        let k = (out.curves[1].curve.values[0] * 50.0).round() as usize;
        assert_eq!(ci[0], wilson_interval(k, 50));
    }
}
