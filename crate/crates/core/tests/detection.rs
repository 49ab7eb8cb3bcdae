//! Exact Poisson sums against seeded Monte Carlo.

use iontrap_core::apparatus::{
    detection_error, monte_carlo_errors, optimal_threshold, DetectionConfig,
};
use iontrap_core::RandomSeed;

fn within_three_sigma(exact: f64, estimate: f64, shots: f64) -> bool {
    let sigma = (exact * (1.0 - exact) / shots).sqrt().max(1.0 / shots);
    (estimate - exact).abs() <= 3.0 * sigma
}

#[test]
fn exact_matches_monte_carlo() {
    let points = [
        DetectionConfig::default(),
        DetectionConfig { window: 0.5e-3, ..Default::default() },
        DetectionConfig { background_rate: 2e4, ..Default::default() },
        DetectionConfig { d_lifetime: 0.05, ..Default::default() },
        DetectionConfig { collection_fraction: 2e-3, window: 1e-3, ..Default::default() },
    ];
    let shots = 1_000_000;
    for (i, cfg) in points.iter().enumerate() {
        let exact = optimal_threshold(cfg).unwrap();
        let mc = monte_carlo_errors(cfg, exact.threshold, shots, RandomSeed(100 + i as u64)).unwrap();
        assert!(within_three_sigma(exact.bright, mc.bright, shots as f64), "{i}: {exact:?} {mc:?}");
        assert!(within_three_sigma(exact.dark, mc.dark, shots as f64), "{i}: {exact:?} {mc:?}");
    }
}

#[test]
fn default_configuration_is_below_one_percent() {
    let best = optimal_threshold(&DetectionConfig::default()).unwrap();
    assert!(best.total() < 0.01);
    // decay during the window dominates: about half of 1 − e^(−2 ms / 1 s)
    assert!(best.dark > 5e-4 && best.dark < 2e-3);
}

#[test]
fn longer_windows_never_hurt_without_background_or_decay() {
    let mut last = f64::INFINITY;
    for k in 1..=20 {
        let cfg = DetectionConfig {
            background_rate: 0.0,
            d_lifetime: f64::INFINITY,
            window: k as f64 * 5e-5,
            ..Default::default()
        };
        let e = optimal_threshold(&cfg).unwrap();
        assert!(e.bright + e.dark <= last + 1e-15);
        last = e.bright + e.dark;
    }
}

#[test]
fn errors_move_oppositely_with_threshold() {
    let cfg = DetectionConfig::default();
    let mut prev = detection_error(&cfg, 0).unwrap();
    for t in 1..100 {
        let e = detection_error(&cfg, t).unwrap();
        assert!(e.bright >= prev.bright - 1e-15);
        assert!(e.dark <= prev.dark + 1e-15);
        prev = e;
    }
}
