use iontrap_core::cooling::{doppler_limit, eit_cooling_steady_state, DEFAULT_RECOIL};
use iontrap_core::liouville::{
    ac_stark_shift, dressing_rabi_for_shift, probe_spectrum, EitDressing, Manifold,
};
use iontrap_core::{Error, TAU};

const DELTA_SIGMA: f64 = TAU * 60e6;
const GRID: f64 = TAU * 10e3;

fn dressing(shift: f64, probe_ratio: f64, manifold: Manifold) -> EitDressing {
    let omega_sigma = dressing_rabi_for_shift(DELTA_SIGMA, shift).unwrap();
    EitDressing::calcium(DELTA_SIGMA, omega_sigma, omega_sigma * probe_ratio).with_manifold(manifold)
}

fn grid(from: f64, to: f64) -> Vec<f64> {
    let n = ((to - from) / GRID).round() as usize;
    (0..=n).map(|k| from + k as f64 * GRID).collect()
}

#[test]
fn three_level_dark_null_and_bright_peak() {
    let shift = TAU * 3.34e6;
    let d = dressing(shift, 0.01, Manifold::ThreeLevel);
    let spectrum = probe_spectrum(&d, &grid(DELTA_SIGMA - TAU * 1e6, DELTA_SIGMA + shift + TAU * 1e6)).unwrap();
    assert!(spectrum.weak_probe);
    let (peak_at, peak) = spectrum.peak().unwrap();
    let (null_at, null) = spectrum
        .points
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(null < 1e-8 * peak, "null {null} peak {peak}");
    assert!((null_at - DELTA_SIGMA).abs() <= 0.5 * GRID);
    let expected = DELTA_SIGMA + ac_stark_shift(DELTA_SIGMA, d.omega_sigma).unwrap();
    assert!((peak_at - expected).abs() <= GRID, "{} vs {}", peak_at, expected);
}

#[test]
fn required_dressing_for_trap_frequency() {
    let omega = dressing_rabi_for_shift(DELTA_SIGMA, TAU * 3.34e6).unwrap();
    assert!((omega / TAU / 1e6 - 29.0).abs() < 0.5);
    assert!((ac_stark_shift(DELTA_SIGMA, omega).unwrap() / (TAU * 3.34e6) - 1.0).abs() < 1e-12);
    assert!(matches!(ac_stark_shift(-DELTA_SIGMA, omega), Err(Error::Domain(_))));
}

#[test]
fn scattering_is_quadratic_in_weak_probe() {
    for manifold in [Manifold::ThreeLevel, Manifold::FourLevel] {
        let weak = dressing(TAU * 3.34e6, 0.001, manifold);
        let strong = EitDressing { omega_pi: 2.0 * weak.omega_pi, ..weak };
        for x in [-4e6, -1e6, 0.5e6, 3.34e6, 6e6] {
            let dp = DELTA_SIGMA + TAU * x;
            let a = weak.scattering_rate(dp).unwrap();
            let b = strong.scattering_rate(dp).unwrap();
            if a > 0.0 {
                assert!((b / a / 4.0 - 1.0).abs() < 0.01, "{manifold:?} x={x}: {}", b / a);
            }
        }
    }
}

#[test]
fn strong_probe_is_flagged() {
    let d = dressing(TAU * 3.34e6, 0.5, Manifold::FourLevel);
    let s = probe_spectrum(&d, &[DELTA_SIGMA]).unwrap();
    assert!(!s.weak_probe);
}

#[test]
fn eit_mean_is_invariant_under_probe_scaling() {
    let nu = TAU * 3.34e6;
    for manifold in [Manifold::ThreeLevel, Manifold::FourLevel] {
        let a = dressing(nu, 0.001, manifold);
        let b = EitDressing { omega_pi: 0.5 * a.omega_pi, ..a };
        let na = eit_cooling_steady_state(&a, nu, DEFAULT_RECOIL).unwrap().mean;
        let nb = eit_cooling_steady_state(&b, nu, DEFAULT_RECOIL).unwrap().mean;
        assert!((na / nb - 1.0).abs() < 0.01, "{manifold:?}: {na} vs {nb}");
    }
}

#[test]
fn three_level_eit_beats_doppler_limit() {
    let nu = TAU * 3.34e6;
    let d = dressing(nu, 0.01, Manifold::ThreeLevel);
    let eit = eit_cooling_steady_state(&d, nu, DEFAULT_RECOIL).unwrap();
    assert!(!eit.heating_regime);
    assert!(eit.carrier_scattering < 1e-8 * eit.red_scattering);
    let limit = doppler_limit(d.gamma_p, nu).unwrap();
    assert!(eit.mean * 10.0 < limit, "{} vs {}", eit.mean, limit);
}

#[test]
fn dual_mode_ordering() {
    let d = dressing(TAU * 2.5e6, 0.01, Manifold::FourLevel);
    let low = eit_cooling_steady_state(&d, TAU * 1.61e6, DEFAULT_RECOIL).unwrap();
    let high = eit_cooling_steady_state(&d, TAU * 3.34e6, DEFAULT_RECOIL).unwrap();
    assert!(low.mean > high.mean);
    assert!(low.mean < doppler_limit(d.gamma_p, TAU * 1.61e6).unwrap());
    assert!(high.mean < doppler_limit(d.gamma_p, TAU * 3.34e6).unwrap());
}
