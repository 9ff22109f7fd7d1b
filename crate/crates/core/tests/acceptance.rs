//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use hetnet_sg::analytic::AnalyticModel;
use hetnet_sg::experiment::{compare_report, default_rate_grid, default_sinr_grid, figure_preset, run_experiment};
use hetnet_sg::model::{db_to_linear, region_probabilities};
use hetnet_sg::montecarlo::{
    estimate_macro_association, run_trials, sample_realization, Execution, SimSettings, TrialSet,
};
use hetnet_sg::nonuniform::{derive_densities, NonUniformModel, PdfRegion};
use hetnet_sg::special::{pmf_users_random_cell, pmf_users_sharing_cell, rho_quadrature};
use hetnet_sg::uniform::UniformModel;
use hetnet_sg::{CcdfCurve, Method, NetworkConfig, Region, Scenario, Tier};

const TRIALS: usize = 100_000;
const SEED: u64 = 20_130_601;
const REGIONS: [Region; 3] = [Region::Inner, Region::Outer, Region::Overall];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn paper(scenario: Scenario, d: f64) -> NetworkConfig {
    NetworkConfig::paper(scenario, 10.0, d)
}

fn sim(cfg: &NetworkConfig, trials: usize) -> SimSettings {
    SimSettings::for_config(cfg, trials, SEED)
}

/// Monte Carlo runs at D = 500 m, λ₂/λ₁ = 10, shared by several criteria.
struct Runs {
    sets: Vec<TrialSet>,
}

impl Runs {
    fn get(&self, scenario: Scenario) -> &TrialSet {
        self.sets.iter().find(|t| t.cfg.scenario == scenario).expect("scenario run")
    }
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50 {
        let x = 10f64.powf(-6.0 + 12.0 * i as f64 / 49.0);
        let exact = x.sqrt() * (FRAC_PI_2 - (1.0 / x.sqrt()).atan());
        let q = match rho_quadrature(x, 4.0) {
            Ok(q) => q,
            Err(e) => return outcome(false, format!("quadrature failed at x={x:e}: {e}")),
        };
        worst = worst.max(((q - exact) / exact).abs());
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e} over 50 points (limit 1e-9)"))
}

fn criterion_2() -> Outcome {
    let mut cfg = paper(Scenario::MacroOnly, 500.0);
    cfg.noise_power_dbm = f64::NEG_INFINITY;
    // Every macro BS loaded.
    cfg.lambda_users = 1.0;
    let got = AnalyticModel::new(&cfg).and_then(|m| m.coverage(Region::Overall, 1.0));
    match got {
        Ok(v) => {
            let closed = 1.0 / (1.0 + FRAC_PI_4);
            outcome(
                (v - closed).abs() <= 1e-5,
                format!("coverage at 0 dB = {v:.7}, 1/(1+ρ(1,4)) = {closed:.7} (stated 0.56017), tolerance 1e-5"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_3() -> Outcome {
    let grid: Vec<f64> = (0..20).map(|i| -10.0 + 30.0 * i as f64 / 19.0).collect();
    let rates: Vec<f64> = (0..20).map(|i| 10f64.powf(-3.0 + 4.0 * i as f64 / 19.0)).collect();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut note = |v: f64, what: &str| {
        if v > worst {
            worst = v;
            worst_at = what.to_string();
        }
    };
    for scenario in [Scenario::NonUniformI, Scenario::NonUniformII] {
        let cfg = paper(scenario, 0.0);
        let nu = match NonUniformModel::new(&cfg) {
            Ok(m) => m,
            Err(e) => return outcome(false, e.to_string()),
        };
        let mut ucfg = cfg.clone();
        ucfg.scenario = Scenario::Uniform;
        let u = UniformModel::new(&ucfg).expect("uniform model");
        let (q1, _) = u.association();
        let (l1, l2) = u.loaded();
        let dd = derive_densities(&cfg).expect("densities");
        note((dd.q1 - q1).abs(), "Q1");
        note((dd.lambda_loaded_macro - l1).abs() / l1, "loaded macro density");
        note((dd.lambda_loaded_small - l2).abs() / l2, "loaded small density");
        for &t_db in &grid {
            let t = db_to_linear(t_db);
            let pairs = [
                (nu.coverage_outer_tier1(t), u.coverage_tier(Tier::Macro, t), "outer tier-1 coverage"),
                (nu.coverage_outer_tier2(t), u.coverage_tier(Tier::Small, t), "outer tier-2 coverage"),
                (nu.coverage_outer(t), u.coverage(t), "outer coverage"),
                (nu.coverage_overall(t), u.coverage(t), "overall coverage"),
            ];
            for (a, b, what) in pairs {
                match (a, b) {
                    (Ok(a), Ok(b)) => note((a - b).abs(), what),
                    (a, b) => return outcome(false, format!("{what}: {a:?} / {b:?}")),
                }
            }
        }
        for &r in &rates {
            let pairs = [
                (nu.throughput_ccdf_outer(r), u.throughput(r), "outer throughput"),
                (nu.throughput_ccdf_overall(r), u.throughput(r), "overall throughput"),
            ];
            for (a, b, what) in pairs {
                match (a, b) {
                    (Ok(a), Ok(b)) => note((a - b).abs(), what),
                    (a, b) => return outcome(false, format!("{what}: {a:?} / {b:?}")),
                }
            }
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max deviation {worst:.2e} ({worst_at}) over 20-point grids, Scenario-I and II at D = 0 (limit 1e-6)"),
    )
}

fn criterion_4() -> Outcome {
    match region_probabilities(&paper(Scenario::NonUniformI, 500.0)) {
        Ok((p_inner, _)) => outcome((p_inner - 0.5441).abs() <= 1e-4, format!("p_inner = {p_inner:.6} (target 0.5441 ± 1e-4)")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_5() -> Outcome {
    let t = db_to_linear(-5.0);
    let cases = [
        (Scenario::NonUniformII, 600.0, 0.82, 0.88),
        (Scenario::Uniform, 600.0, 0.76, 0.82),
        (Scenario::MacroOnly, 600.0, 0.70, 0.76),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (scenario, d, lo, hi) in cases {
        match AnalyticModel::new(&paper(scenario, d)).and_then(|m| m.coverage(Region::Overall, t)) {
            Ok(v) => {
                pass &= (lo..=hi).contains(&v);
                parts.push(format!("{scenario} {v:.4} in [{lo}, {hi}]"));
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let q = |scenario| AnalyticModel::new(&paper(scenario, 500.0)).and_then(|m| m.rate_quantile(Region::Overall, 0.9));
    match (q(Scenario::Uniform), q(Scenario::NonUniformII)) {
        (Ok(u), Ok(ii)) => {
            let ratio = ii / u;
            let pass = (u - 0.025).abs() <= 0.15 * 0.025
                && (ii - 0.043).abs() <= 0.15 * 0.043
                && (1.45..=2.0).contains(&ratio);
            outcome(
                pass,
                format!("Uniform {u:.5} bps (0.025 ± 15%), Scenario-II {ii:.5} bps (0.043 ± 15%), ratio {ratio:.3} in [1.45, 2.0]"),
            )
        }
        (a, b) => outcome(false, format!("{a:?} / {b:?}")),
    }
}

fn criterion_7(runs: &Runs, curves: &mut Vec<CcdfCurve>) -> Outcome {
    let grid = default_sinr_grid();
    let mut pass = true;
    let mut parts = Vec::new();
    for scenario in Scenario::ALL {
        let set = runs.get(scenario);
        let model = AnalyticModel::new(&set.cfg).expect("analytic model");
        let mut gaps = Vec::new();
        for region in REGIONS {
            let (a, m) = match (model.coverage_curve(region, &grid), set.coverage_curve(region, &grid)) {
                (Ok(a), Ok(m)) => (a, m),
                (a, m) => return outcome(false, format!("{scenario} {}: {:?} / {:?}", region.name(), a.err(), m.err())),
            };
            let r = compare_report(&a, &m).expect("same grid");
            pass &= r.max_gap <= 0.03;
            gaps.push(format!("{} {:.4}@{}dB", region.name(), r.max_gap, r.threshold_at_max_gap));
            curves.push(a);
            curves.push(m);
        }
        parts.push(format!("{scenario}: {}", gaps.join(" ")));
    }
    outcome(pass, format!("max |analytic − MC| (limit 0.03): {}", parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for scenario in [Scenario::NonUniformI, Scenario::NonUniformII] {
        for d in [0.0, 300.0, 500.0, 800.0] {
            let cfg = paper(scenario, d);
            let q1 = derive_densities(&cfg).expect("densities").q1;
            let (mc, _) = estimate_macro_association(&cfg, &sim(&cfg, TRIALS)).expect("association run");
            pass &= (mc - q1).abs() <= 0.01;
            parts.push(format!("{}@{d}: MC {mc:.4} vs Q1 {q1:.4}", short(scenario)));
        }
    }
    outcome(pass, format!("|MC − Q1| ≤ 0.01: {}", parts.join("; ")))
}

fn criterion_9(runs: &Runs) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for scenario in [Scenario::NonUniformI, Scenario::NonUniformII] {
        let set = runs.get(scenario);
        let model = NonUniformModel::new(&set.cfg).expect("model");
        for which in [PdfRegion::Inner, PdfRegion::OuterTier1, PdfRegion::OuterTier2] {
            let pdf = model.serving_distance_pdf(which).expect("pdf");
            let samples = set.serving_distances(which);
            let ks = hetnet_sg::montecarlo::ks_statistic(&samples, |x| pdf.cdf(x));
            // 1% critical value of the one-sample KS test.
            let critical = 1.628 / (samples.len() as f64).sqrt();
            pass &= ks < 0.02;
            parts.push(format!(
                "{} {which:?} KS {ks:.4} (n = {}, 1% critical {critical:.4})",
                short(scenario),
                samples.len()
            ));
        }
    }
    outcome(pass, format!("KS < 0.02: {}", parts.join("; ")))
}

fn criterion_10(runs: &Runs, curves: &mut Vec<CcdfCurve>) -> Outcome {
    let mut failures = Vec::new();
    let mut info = Vec::new();

    // Throughput curves of every scenario, both methods.
    let rates = default_rate_grid();
    for scenario in Scenario::ALL {
        let set = runs.get(scenario);
        let model = AnalyticModel::new(&set.cfg).expect("analytic model");
        for region in REGIONS {
            curves.push(model.throughput_curve(region, &rates).expect("analytic throughput"));
            curves.push(set.throughput_curve(region, &rates).expect("MC throughput"));
        }
    }
    // Analytic figure presets along CCDF axes.
    for n in [2, 3, 5, 6] {
        let out = run_experiment(&figure_preset(n).expect("preset")).expect("figure run");
        curves.extend(out.curves.into_iter().map(|c| c.curve));
    }
    let non_monotone = curves.iter().filter(|c| !c.is_monotone(0.0)).count();
    if non_monotone > 0 {
        failures.push(format!("{non_monotone} non-monotone curves"));
    }
    info.push(format!("{} curves monotone", curves.len() - non_monotone));

    // PMF normalization.
    let mut worst_pmf = 0.0f64;
    for lambda_eq in [1e-7, 1e-6, 2.2e-6, 1e-5, 1e-4] {
        let lambda_users = 1e-5;
        let a: f64 = (0..20_000).map(|n| pmf_users_random_cell(n, lambda_users, lambda_eq)).sum();
        let b: f64 = (0..20_000).map(|n| pmf_users_sharing_cell(n, lambda_users, lambda_eq)).sum();
        worst_pmf = worst_pmf.max((a - 1.0).abs()).max((b - 1.0).abs());
    }
    if worst_pmf > 1e-8 {
        failures.push(format!("PMF sums off by {worst_pmf:.1e}"));
    }
    info.push(format!("PMF sums within {worst_pmf:.1e}"));

    // Hole exclusion.
    let mut min_gap = f64::INFINITY;
    for (scenario, d) in [(Scenario::NonUniformI, 300.0), (Scenario::NonUniformI, 800.0), (Scenario::NonUniformII, 500.0)] {
        let cfg = paper(scenario, d);
        let s = sim(&cfg, 1);
        for t in 0..100 {
            let r = sample_realization(&cfg, &s, t);
            min_gap = min_gap.min(r.min_small_macro_distance() - d);
        }
    }
    if !(min_gap > 0.0) {
        failures.push(format!("small BS within D of a macro BS (margin {min_gap})"));
    }
    info.push(format!("hole margin {min_gap:.3} m > 0 over 300 realizations"));

    // Determinism of CSV output and execution mode.
    let mut spec = figure_preset(3).expect("preset");
    spec.methods = vec![Method::Analytic, Method::MonteCarlo];
    spec.sim.trials = 300;
    let first = run_experiment(&spec).expect("run").csv;
    let second = run_experiment(&spec).expect("run").csv;
    spec.sim.execution = Execution::Sequential;
    spec.sim.parallel_streams = 7;
    let third = run_experiment(&spec).expect("run").csv;
    if first != second || first != third {
        failures.push("CSV differs between identical runs".into());
    }
    info.push(format!("{}-byte CSV identical across 3 runs", first.len()));

    // Scenario-II ordering over D.
    let t = db_to_linear(-5.0);
    let mut worst_margin = f64::INFINITY;
    for ratio in [10.0, 5.0] {
        for i in 0..=8 {
            let d = 300.0 + 50.0 * i as f64;
            let c = |s| AnalyticModel::new(&NetworkConfig::paper(s, ratio, d)).and_then(|m| m.coverage(Region::Overall, t));
            let (ii, u) = (c(Scenario::NonUniformII).expect("II"), c(Scenario::Uniform).expect("uniform"));
            worst_margin = worst_margin.min(ii - (u - 0.005));
        }
    }
    if worst_margin < 0.0 {
        failures.push(format!("Scenario-II below Uniform − 0.005 by {:.4}", -worst_margin));
    }
    info.push(format!("Scenario-II − (Uniform − 0.005) ≥ {worst_margin:.4} for D in [300, 700]"));

    // Surviving small cell fraction against the void probability.
    let set = runs.get(Scenario::NonUniformI);
    let surv = set.small_survival_fraction();
    let expected = (-PI * set.cfg.lambda_macro * 500.0f64.powi(2)).exp();
    let fractions: Vec<f64> = set
        .outcomes
        .iter()
        .filter(|o| o.small_parents > 0)
        .map(|o| o.small_retained as f64 / o.small_parents as f64)
        .collect();
    let n = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / n;
    let se = (fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    if (surv - expected).abs() > 3.0 * se {
        failures.push(format!("survival {surv:.5} vs {expected:.5} beyond 3σ = {:.5}", 3.0 * se));
    }
    info.push(format!("survival {surv:.5} vs exp(−πλ₁D²) = {expected:.5} (3σ = {:.5})", 3.0 * se));

    // Edge-effect guard: the doubled window extends the same realizations.
    let cfg = paper(Scenario::Uniform, 500.0);
    let base = sim(&cfg, 2_000);
    let wide = SimSettings { window_radius_m: 2.0 * base.window_radius_m, ..base.clone() };
    let grid = default_sinr_grid();
    let a = run_trials(&cfg, &base).and_then(|t| t.coverage_curve(Region::Overall, &grid)).expect("base run");
    let b = run_trials(&cfg, &wide).and_then(|t| t.coverage_curve(Region::Overall, &grid)).expect("wide run");
    let edge = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if edge >= 0.005 {
        failures.push(format!("window doubling moves coverage by {edge:.4}"));
    }
    info.push(format!("window doubling changes coverage by {edge:.4} < 0.005"));

    // Loaded fractions against the PPP approximation, reported only.
    let mut loaded = Vec::new();
    for scenario in [Scenario::Uniform, Scenario::NonUniformI] {
        let set = runs.get(scenario);
        let dd = match scenario {
            Scenario::Uniform => {
                let u = UniformModel::new(&set.cfg).expect("model");
                let (l1, l2) = u.loaded();
                (l1 / set.cfg.lambda_macro, l2 / set.cfg.lambda_small_nominal)
            }
            _ => {
                let m = NonUniformModel::new(&set.cfg).expect("model");
                (m.derived.lambda_loaded_macro / set.cfg.lambda_macro, m.derived.lambda_loaded_small / m.outer_small_density)
            }
        };
        loaded.push(format!(
            "{} macro {:.4}/{:.4} small {:.4}/{:.4}",
            short(scenario),
            set.loaded_fraction(Tier::Macro),
            dd.0,
            set.loaded_fraction(Tier::Small),
            dd.1
        ));
    }
    info.push(format!("loaded fraction MC/approx: {}", loaded.join(", ")));

    let detail = if failures.is_empty() {
        info.join("; ")
    } else {
        format!("{} | {}", failures.join("; "), info.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn short(s: Scenario) -> &'static str {
    match s {
        Scenario::MacroOnly => "MacroOnly",
        Scenario::Uniform => "Uniform",
        Scenario::NonUniformI => "I",
        Scenario::NonUniformII => "II",
    }
}

fn report(n: usize, name: &str, started: Instant, o: &Outcome) {
    println!(
        "criterion {n:>2}: {} | {name} | {} | {:.1} s",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        started.elapsed().as_secs_f64()
    );
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters from other targets need no work here.
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut results = Vec::new();
    let mut run = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let o = f();
        report(n, name, started, &o);
        results.push(o.pass);
    };
    run(1, "rho quadrature vs closed form", &mut criterion_1);
    run(2, "single-tier closed-form reduction", &mut criterion_2);
    run(3, "D → 0 reductions", &mut criterion_3);
    run(4, "inner-region fraction", &mut criterion_4);
    run(5, "coverage anchors at T = −5 dB", &mut criterion_5);
    run(6, "worst-10% rate anchors", &mut criterion_6);

    let started = Instant::now();
    let sets = Scenario::ALL
        .iter()
        .map(|&s| {
            let cfg = paper(s, 500.0);
            run_trials(&cfg, &sim(&cfg, TRIALS)).expect("Monte Carlo run")
        })
        .collect();
    let runs = Runs { sets };
    println!("Monte Carlo: 4 × {TRIALS} trials in {:.1} s", started.elapsed().as_secs_f64());

    let mut curves = Vec::new();
    run(7, "analytic vs Monte Carlo coverage", &mut || criterion_7(&runs, &mut curves));
    run(8, "association probability", &mut criterion_8);
    run(9, "serving-distance laws (KS)", &mut || criterion_9(&runs));
    run(10, "property suites", &mut || criterion_10(&runs, &mut curves));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
