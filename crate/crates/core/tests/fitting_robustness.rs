use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use pumpsim_core::atomic::Sublevel;
use pumpsim_core::fitting::{
    fit_alpha, objective, residual_report, simulate_series, FitConfig, ObservationSeries,
};
use pumpsim_core::kinetics::{PumpingSetup, REFERENCE_ALPHA};

fn config() -> FitConfig {
    FitConfig::new(
        PumpingSetup::polarizer_with_repumper(-0.5, 0.0)
            .unwrap()
            .pruned(Some(1e-3)),
    )
}

fn clean(config: &FitConfig, m: i32) -> ObservationSeries {
    let level = Sublevel::ground(4, m);
    let times: Vec<f64> = (0..60).map(|i| i as f64 * 5e-3 / 59.0).collect();
    let probe = ObservationSeries::new(level, times.clone(), vec![0.0; 60], None).unwrap();
    let f = simulate_series(config, REFERENCE_ALPHA, &probe).unwrap();
    ObservationSeries::new(level, times, f, None).unwrap()
}

/// Additive Gaussian noise, unclipped: clipping at 0 and 1 biases the
/// estimate upward because the m=0 curve runs close to 1.
fn noisy(series: &ObservationSeries, sigma: f64, rng: &mut ChaCha8Rng) -> ObservationSeries {
    let noise = Normal::new(0.0, sigma).unwrap();
    let f = series
        .fractions
        .iter()
        .map(|v| v + noise.sample(rng))
        .collect();
    ObservationSeries {
        level: series.level,
        times: series.times.clone(),
        fractions: f,
        weights: None,
    }
}

#[test]
fn median_estimate_under_two_percent_noise() {
    let c = config();
    let base = [clean(&c, 0), clean(&c, 1)];
    let mut estimates: Vec<f64> = (0..50)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<_> = base.iter().map(|s| noisy(s, 0.02, &mut rng)).collect();
            fit_alpha(&data, &c).unwrap().alpha_hat
        })
        .collect();
    estimates.sort_by(f64::total_cmp);
    let median = 0.5 * (estimates[24] + estimates[25]);
    assert!(
        (median - REFERENCE_ALPHA).abs() / REFERENCE_ALPHA < 0.1,
        "median {median}"
    );
}

#[test]
fn uniform_weight_rescaling_leaves_estimate() {
    let c = config();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let data: Vec<_> = [clean(&c, 0), clean(&c, 1)]
        .iter()
        .map(|s| noisy(s, 0.02, &mut rng))
        .collect();
    let scaled: Vec<_> = data
        .iter()
        .map(|s| ObservationSeries {
            weights: Some(vec![37.5; s.len()]),
            ..s.clone()
        })
        .collect();
    let a = fit_alpha(&data, &c).unwrap();
    let b = fit_alpha(&scaled, &c).unwrap();
    assert!((a.alpha_hat - b.alpha_hat).abs() < c.tolerance());
}

#[test]
fn objective_separates_zero_from_probe() {
    let c = config();
    let data = [clean(&c, 0), clean(&c, 1)];
    let j0 = objective(&data, &c, 0.0).unwrap();
    let j5 = objective(&data, &c, 0.05).unwrap();
    assert!((j5 - j0).abs() > 10.0 * c.tolerance());
}

#[test]
fn fitted_curve_equals_forward_simulation() {
    let c = config();
    let data = [clean(&c, 0)];
    let fit = fit_alpha(&data, &c).unwrap();
    let report = residual_report(&data, &c, fit.alpha_hat).unwrap();
    let again = simulate_series(&c, fit.alpha_hat, &data[0]).unwrap();
    assert_eq!(report.series[0].predicted, again);
    assert!((report.sse - fit.sse).abs() <= 1e-15 * (1.0 + fit.sse));
}

#[test]
fn faint_sublevel_series_reports_residuals() {
    let c = config();
    let s = clean(&c, 1);
    let faint =
        ObservationSeries::new(s.level, s.times.clone(), vec![0.002; s.len()], None).unwrap();
    let report = residual_report(&[faint], &c, REFERENCE_ALPHA).unwrap();
    assert_eq!(report.series[0].residuals.len(), s.len());
    assert!(report.sse.is_finite());
}
