use std::f64::consts::PI;

use hetnet_sg::montecarlo::{
    estimate_coverage_ccdf, estimate_macro_association, run_trials, sample_realization, wilson_interval, Execution,
    SimSettings,
};
use hetnet_sg::nonuniform::derive_densities;
use hetnet_sg::{NetworkConfig, Region, Scenario, Tier};

#[test]
fn association_frequency_matches_lemma() {
    let cfg = NetworkConfig::paper(Scenario::NonUniformI, 10.0, 500.0);
    let (mc, (lo, hi)) = estimate_macro_association(&cfg, &SimSettings::for_config(&cfg, 20_000, 3)).unwrap();
    let q1 = derive_densities(&cfg).unwrap().q1;
    assert!(lo <= mc && mc <= hi);
    assert!((mc - q1).abs() < 0.01, "{mc} vs {q1}");
}

#[test]
fn surviving_parent_fraction_is_the_void_probability() {
    let cfg = NetworkConfig::paper(Scenario::NonUniformI, 10.0, 500.0);
    let sim = SimSettings::for_config(&cfg, 1, 5);
    let (mut parents, mut kept) = (0usize, 0usize);
    let interior2 = (sim.window_radius_m - 500.0).powi(2);
    for t in 0..400 {
        let r = sample_realization(&cfg, &sim, t);
        parents += r.interior_parents;
        kept += r.small_points.iter().filter(|p| p[0] * p[0] + p[1] * p[1] <= interior2).count();
        assert!(r.min_small_macro_distance() > 500.0);
    }
    let expected = (-PI * 1e-6 * 500.0f64.powi(2)).exp();
    assert!((expected - 0.4559).abs() < 1e-4);
    assert!((kept as f64 / parents as f64 - expected).abs() < 0.005);
}

#[test]
fn execution_mode_and_stream_count_do_not_change_results() {
    let cfg = NetworkConfig::paper(Scenario::NonUniformII, 10.0, 400.0);
    let base = SimSettings::for_config(&cfg, 24, 11);
    let a = run_trials(&cfg, &base).unwrap();
    let b = run_trials(&cfg, &SimSettings { execution: Execution::Sequential, parallel_streams: 5, ..base.clone() }).unwrap();
    let sinr = |s: &hetnet_sg::montecarlo::TrialSet| s.outcomes.iter().map(|o| o.sinr.to_bits()).collect::<Vec<_>>();
    assert_eq!(sinr(&a), sinr(&b));
    let c = run_trials(&cfg, &SimSettings { seed: 12, ..base }).unwrap();
    assert_ne!(sinr(&a), sinr(&c));
}

#[test]
fn serving_cell_always_holds_the_typical_user() {
    let cfg = NetworkConfig::paper(Scenario::Uniform, 10.0, 500.0);
    let set = run_trials(&cfg, &SimSettings::for_config(&cfg, 30, 2)).unwrap();
    assert!(set.outcomes.iter().all(|o| o.serving_load >= 1 && o.serving_distance.is_finite()));
    assert!(set.outcomes.iter().any(|o| o.tier == Tier::Small));
}

#[test]
fn interval_width_shrinks_as_inverse_square_root() {
    let width = |n: usize| {
        let (lo, hi) = wilson_interval(n * 3 / 10, n);
        hi - lo
    };
    let ratio = width(1_000) / width(100_000);
    assert!((ratio - 10.0).abs() < 0.2, "{ratio}");
}

#[test]
fn coverage_estimate_is_monotone_with_intervals() {
    let cfg = NetworkConfig::paper(Scenario::NonUniformI, 10.0, 500.0);
    let grid: Vec<f64> = (-10..=20).map(f64::from).collect();
    let c = estimate_coverage_ccdf(&cfg, &SimSettings::for_config(&cfg, 100, 4), &grid).unwrap();
    assert!(c.is_monotone(0.0));
    assert_eq!(c.region, Region::Overall);
    let ci = c.intervals.unwrap();
    assert!(c.values.iter().zip(&ci).all(|(v, (lo, hi))| lo <= v && v <= hi));
}
