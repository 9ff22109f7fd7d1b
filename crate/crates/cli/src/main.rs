//! Command-line front end: coverage and throughput curves, parameter sweeps,
//! figure presets and analytic vs Monte Carlo validation, written as CSV.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hetnet_sg::experiment::{
    default_rate_grid, default_radius_grid, default_sinr_grid, figure_preset, linear_grid, read_config,
    run_experiment, validation_suite, Axis, ExperimentSpec, Measure,
};
use hetnet_sg::montecarlo::SimSettings;
use hetnet_sg::{Method, NetworkConfig, Region, Scenario};

#[derive(Parser)]
#[command(name = "hetnet-sg", version, about = "Coverage and throughput of two-tier cellular networks with non-uniform small cell deployment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage CCDF over SINR thresholds (dB).
    Coverage(CurveArgs),
    /// Single user throughput CCDF over rates (bps).
    Throughput(CurveArgs),
    /// Coverage or throughput at fixed levels over D or λ₂/λ₁.
    Sweep(SweepArgs),
    /// Reproduces figure 2 to 7 at the reference parameters.
    Figure {
        #[arg(value_parser = clap::value_parser!(u32).range(2..=7))]
        number: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Compares analytic and Monte Carlo coverage for every scenario and region.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Scenario: MacroOnly, Uniform, NonUniformI or NonUniformII (repeatable).
    #[arg(long = "scenario", value_name = "NAME")]
    scenarios: Vec<Scenario>,
    /// Method: analytic or montecarlo (repeatable).
    #[arg(long = "method", value_name = "NAME")]
    methods: Vec<Method>,
    /// Monte Carlo trials per network.
    #[arg(long)]
    trials: Option<usize>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Inner region radius D in meters.
    #[arg(long, value_name = "X")]
    d_meters: Option<f64>,
    /// Small to macro density ratio λ₂/λ₁.
    #[arg(long, value_name = "X")]
    density_ratio: Option<f64>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
    /// Region: inner, outer or overall (repeatable).
    #[arg(long = "region", value_name = "NAME", value_parser = parse_region)]
    regions: Vec<Region>,
    /// Axis grid as START:STOP:STEP.
    #[arg(long, value_name = "START:STOP:STEP", value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<Grid>,
}

#[derive(Clone)]
struct Grid(Vec<f64>);

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Swept parameter: inner_radius_m or density_ratio.
    #[arg(long, default_value = "inner_radius_m")]
    axis: Axis,
    /// coverage (levels in dB) or throughput (levels in bps).
    #[arg(long, default_value = "coverage")]
    measure: Measure,
    /// Threshold at which the measure is evaluated (repeatable).
    #[arg(long = "level", value_name = "X", required = true, allow_hyphen_values = true)]
    levels: Vec<f64>,
}

fn parse_region(s: &str) -> Result<Region, String> {
    match s.to_ascii_lowercase().as_str() {
        "inner" => Ok(Region::Inner),
        "outer" => Ok(Region::Outer),
        "overall" | "all" => Ok(Region::Overall),
        _ => Err(format!("unknown region `{s}`")),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [start, stop, step] if step > 0.0 && stop >= start => Ok(Grid(linear_grid(start, stop, step))),
        [_, _, _] => Err("grid needs STOP >= START and STEP > 0".into()),
        _ => Err("grid must be START:STOP:STEP".into()),
    }
}

/// Applies config file and flags on top of `spec`. With `fixed_network`
/// the network parameters of `spec` are kept.
fn configure(mut spec: ExperimentSpec, common: &Common, fixed_network: bool) -> Result<ExperimentSpec> {
    if let Some(path) = &common.config {
        let file = read_config(path).with_context(|| format!("reading config {}", path.display()))?;
        if !fixed_network {
            spec.base = file.network.clone();
        }
        file.apply(&mut spec.sim);
        spec.auto_window = file.window_radius_m.is_none();
    }
    if !fixed_network {
        if let Some(d) = common.d_meters {
            spec.base.inner_radius_m = d;
        }
        if let Some(ratio) = common.density_ratio {
            spec.density_ratios = vec![ratio];
        }
        if spec.base.lambda_small_nominal == 0.0 && spec.density_ratios.is_empty() {
            // A macro-only base config still needs a ratio for the other scenarios.
            spec.density_ratios = vec![10.0];
        }
    }
    if !common.scenarios.is_empty() {
        spec.scenarios = common.scenarios.clone();
    }
    if !common.methods.is_empty() {
        spec.methods = common.methods.clone();
    }
    if let Some(trials) = common.trials {
        spec.sim.trials = trials;
    }
    if let Some(seed) = common.seed {
        spec.sim.seed = seed;
    }
    spec.output = common.out.clone();
    Ok(spec)
}

fn curve_spec(args: &CurveArgs, axis: Axis, default_grid: Vec<f64>) -> Result<ExperimentSpec> {
    let base = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
    let mut spec = ExperimentSpec::new(base, axis, args.grid.clone().map_or(default_grid, |g| g.0), Scenario::ALL.to_vec());
    if !args.regions.is_empty() {
        spec.regions = args.regions.clone();
    }
    configure(spec, &args.common, false)
}

fn emit(spec: &ExperimentSpec) -> Result<()> {
    let out = run_experiment(spec)?;
    if spec.output.is_none() {
        std::io::stdout().write_all(out.csv.as_bytes())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Coverage(args) => emit(&curve_spec(&args, Axis::SinrThresholdDb, default_sinr_grid())?),
        Command::Throughput(args) => emit(&curve_spec(&args, Axis::RateBps, default_rate_grid())?),
        Command::Sweep(args) => {
            let default_grid = match args.axis {
                Axis::InnerRadiusM => default_radius_grid(),
                Axis::DensityRatio => linear_grid(1.0, 20.0, 1.0),
                _ => bail!("sweep axis must be inner_radius_m or density_ratio; use coverage or throughput for CCDF axes"),
            };
            let mut spec = curve_spec(&args.curve, args.axis, default_grid)?;
            spec.measure = args.measure;
            spec.levels = args.levels;
            emit(&spec)
        }
        Command::Figure { number, common } => emit(&configure(figure_preset(number)?, &common, true)?),
        Command::Validate(common) => {
            let base = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
            let spec = configure(ExperimentSpec::new(base, Axis::SinrThresholdDb, default_sinr_grid(), Scenario::ALL.to_vec()), &common, false)?;
            let mut base = spec.base.clone();
            if let Some(&ratio) = spec.density_ratios.first() {
                base.lambda_small_nominal = ratio * base.lambda_macro;
                if base.scenario == Scenario::MacroOnly {
                    base.scenario = Scenario::Uniform;
                }
            }
            let mut sim = spec.sim.clone();
            if spec.auto_window {
                sim.window_radius_m = SimSettings::default_window(&base);
            }
            let reports = validation_suite(&base, &sim, &spec.grid)?;
            let mut text = String::from("scenario,region,max_gap,threshold_at_max_gap,fraction_inside_ci\n");
            for (scenario, region, r) in reports {
                text.push_str(&format!(
                    "{scenario},{},{:.6},{},{:.4}\n",
                    region.name(),
                    r.max_gap,
                    r.threshold_at_max_gap,
                    r.fraction_inside_ci
                ));
            }
            match &spec.output {
                Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
