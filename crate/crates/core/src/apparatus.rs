//! Measurement and addressing hardware models: quantum-jump state detection
//! by photon counting, and crosstalk of a focused addressing beam.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::chain::ChainGeometry;
use crate::dynamics::Qubit;
use crate::error::{domain, Result};
use crate::species::RandomSeed;

/// Imaging resolution below which two ions are not separated [m].
pub const IMAGING_RESOLUTION: f64 = 2e-6;

/// Photon-counting detection of the qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionConfig {
    /// Fraction of fluorescence collected by the lens.
    pub collection_fraction: f64,
    /// Photomultiplier quantum efficiency.
    pub quantum_efficiency: f64,
    /// Photons scattered per second by a bright (S) ion.
    pub scattering_rate_bright: f64,
    /// Background counts per second.
    pub background_rate: f64,
    /// Counting window [s].
    pub window: f64,
    /// D5/2 lifetime [s]; zero or infinite disables decay.
    pub d_lifetime: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            collection_fraction: 1e-2,
            quantum_efficiency: 0.10,
            scattering_rate_bright: 3e7,
            background_rate: 1e3,
            window: 2e-3,
            d_lifetime: 1.0,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("collection_fraction", self.collection_fraction),
            ("quantum_efficiency", self.quantum_efficiency),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(domain!("{name} must lie in (0, 1], got {v}"));
            }
        }
        for (name, v) in [
            ("scattering_rate_bright", self.scattering_rate_bright),
            ("background_rate", self.background_rate),
            ("window", self.window),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain!("{name} must be non-negative, got {v}"));
            }
        }
        if self.d_lifetime.is_nan() || self.d_lifetime < 0.0 {
            return Err(domain!("D lifetime must be non-negative, got {}", self.d_lifetime));
        }
        Ok(())
    }

    /// Mean signal counts from a bright ion in the full window.
    pub fn signal_counts(&self) -> f64 {
        self.scattering_rate_bright * self.collection_fraction * self.quantum_efficiency * self.window
    }

    pub fn background_counts(&self) -> f64 {
        self.background_rate * self.window
    }

    /// Mean counts of a bright ion, λ_b.
    pub fn bright_mean(&self) -> f64 {
        self.signal_counts() + self.background_counts()
    }

    /// Probability that a D ion decays during the window.
    pub fn decay_probability(&self) -> f64 {
        if self.d_lifetime > 0.0 && self.d_lifetime.is_finite() {
            -libm::expm1(-self.window / self.d_lifetime)
        } else {
            0.0
        }
    }
}

/// Poisson probability mass `λ^k e^(−λ) / k!`.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    libm::exp(kf * libm::log(mean) - mean - libm::lgamma(kf + 1.0))
}

/// Poisson cumulative probability `P(N ≤ k)`.
pub fn poisson_cdf(k: u64, mean: f64) -> f64 {
    (0..=k).map(|j| poisson_pmf(j, mean)).sum::<f64>().min(1.0)
}

/// Count distribution of a bright ion.
pub fn bright_pmf(cfg: &DetectionConfig, k: u64) -> f64 {
    poisson_pmf(k, cfg.bright_mean())
}

/// Count distribution of a dark ion. With probability `1 − e^(−T/τ)` the ion
/// decays at a time uniform in the window and fluoresces for the remainder;
/// averaging the Poisson mass over the uniform decay time gives
/// `(F_k(b) − F_k(b + s)) / s` with `F` the Poisson CDF.
pub fn dark_pmf(cfg: &DetectionConfig, k: u64) -> f64 {
    let b = cfg.background_counts();
    let s = cfg.signal_counts();
    let decay = cfg.decay_probability();
    let stay = (1.0 - decay) * poisson_pmf(k, b);
    if decay == 0.0 {
        return stay;
    }
    let decayed = if s > 0.0 {
        (poisson_cdf(k, b) - poisson_cdf(k, b + s)) / s
    } else {
        poisson_pmf(k, b)
    };
    stay + decay * decayed
}

/// Misclassification probabilities at a count threshold; `counts ≥ threshold`
/// reads as bright.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionErrors {
    pub threshold: u64,
    /// P(bright ion read as dark).
    pub bright: f64,
    /// P(dark ion read as bright).
    pub dark: f64,
}

impl DetectionErrors {
    /// Error with equal prior on both states.
    pub fn total(&self) -> f64 {
        0.5 * (self.bright + self.dark)
    }
}

pub fn detection_error(cfg: &DetectionConfig, threshold: u64) -> Result<DetectionErrors> {
    cfg.validate()?;
    if !(cfg.window > 0.0) {
        return Err(domain!("detection window must be positive"));
    }
    let (bright, dark_below) = if threshold == 0 {
        (0.0, 0.0)
    } else {
        (
            poisson_cdf(threshold - 1, cfg.bright_mean()),
            (0..threshold).map(|k| dark_pmf(cfg, k)).sum::<f64>(),
        )
    };
    Ok(DetectionErrors {
        threshold,
        bright,
        dark: (1.0 - dark_below).max(0.0),
    })
}

/// Upper end of the threshold scan, `λ_b + 10 sqrt(λ_b)`.
pub fn threshold_scan_limit(cfg: &DetectionConfig) -> u64 {
    let mean = cfg.bright_mean();
    libm::ceil(mean + 10.0 * libm::sqrt(mean)) as u64
}

/// Threshold minimizing `ε_bright + ε_dark`, lowest on ties.
pub fn optimal_threshold(cfg: &DetectionConfig) -> Result<DetectionErrors> {
    let mut best = detection_error(cfg, 0)?;
    for t in 1..=threshold_scan_limit(cfg) {
        let e = detection_error(cfg, t)?;
        if e.bright + e.dark < best.bright + best.dark {
            best = e;
        }
    }
    Ok(best)
}

fn draw_poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    // mean is positive and finite here
    let dist = Poisson::new(mean).expect("positive Poisson mean");
    let x: f64 = dist.sample(rng);
    x as u64
}

/// Simulated photon counts for `shots` independent detections.
///
/// Uses ChaCha20 seeded from `seed`; the dark-ion decay and decay time are
/// drawn before the counts of each shot.
pub fn sample_counts(cfg: &DetectionConfig, state: Qubit, shots: usize, seed: RandomSeed) -> Result<Vec<u64>> {
    cfg.validate()?;
    let mut rng = seed.rng();
    let b = cfg.background_counts();
    let s = cfg.signal_counts();
    let decay = cfg.decay_probability();
    let counts = (0..shots)
        .map(|_| match state {
            Qubit::S => draw_poisson(&mut rng, b + s),
            Qubit::D => {
                let mean = if rng.random::<f64>() < decay {
                    let elapsed: f64 = rng.random();
                    b + s * (1.0 - elapsed)
                } else {
                    b
                };
                draw_poisson(&mut rng, mean)
            }
        })
        .collect();
    Ok(counts)
}

/// Error rates estimated from `shots` simulated detections of each state.
/// The dark-state stream uses the seed after the bright-state one.
pub fn monte_carlo_errors(
    cfg: &DetectionConfig,
    threshold: u64,
    shots: usize,
    seed: RandomSeed,
) -> Result<DetectionErrors> {
    let bright = sample_counts(cfg, Qubit::S, shots, seed)?;
    let dark = sample_counts(cfg, Qubit::D, shots, RandomSeed(seed.0.wrapping_add(1)))?;
    let n = shots.max(1) as f64;
    Ok(DetectionErrors {
        threshold,
        bright: bright.iter().filter(|&&c| c < threshold).count() as f64 / n,
        dark: dark.iter().filter(|&&c| c >= threshold).count() as f64 / n,
    })
}

/// Addressing beam with a Gaussian Rabi-frequency profile
/// `Ω(d) = Ω₀ exp(−(d/w)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamProfile {
    /// 1/e half-width of the Rabi-frequency profile [m].
    pub width_1e: f64,
    /// Beam center along the trap axis [m].
    pub center: f64,
}

impl Default for BeamProfile {
    fn default() -> Self {
        Self {
            width_1e: 3.7e-6,
            center: 0.0,
        }
    }
}

impl BeamProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.width_1e.is_finite() && self.width_1e > 0.0) {
            return Err(domain!("beam width must be positive, got {}", self.width_1e));
        }
        Ok(())
    }

    /// Relative Rabi frequency at `distance` from the center.
    pub fn relative_rabi(&self, distance: f64) -> f64 {
        let x = distance / self.width_1e;
        libm::exp(-x * x)
    }
}

/// Excitation of an ion `distance` [m] from the beam center when the beam
/// applies `pulse_area` [rad] at its center.
pub fn crosstalk_probability(beam: &BeamProfile, distance: f64, pulse_area: f64) -> Result<f64> {
    beam.validate()?;
    if !(distance >= 0.0) {
        return Err(domain!("distance must be non-negative, got {distance}"));
    }
    let s = libm::sin(0.5 * pulse_area * beam.relative_rabi(distance));
    Ok(s * s)
}

/// Electro-optic deflector steering the addressing beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deflector {
    /// Displacement at the ions per volt [m/V].
    pub displacement_per_volt: f64,
    /// Deflection angle per volt [rad/V].
    pub angle_per_volt: f64,
    /// Largest allowed |voltage| [V].
    pub max_voltage: f64,
}

impl Default for Deflector {
    fn default() -> Self {
        Self {
            displacement_per_volt: 23e-9,
            angle_per_volt: 5e-6,
            max_voltage: 3e3,
        }
    }
}

impl Deflector {
    fn check(&self, voltage: f64) -> Result<()> {
        if !(voltage.is_finite() && voltage.abs() <= self.max_voltage) {
            return Err(domain!(
                "voltage {voltage} V outside ±{} V",
                self.max_voltage
            ));
        }
        Ok(())
    }

    /// Beam displacement at the ions [m].
    pub fn displacement(&self, voltage: f64) -> Result<f64> {
        self.check(voltage)?;
        Ok(self.displacement_per_volt * voltage)
    }

    /// Voltage needed for a displacement [V].
    pub fn voltage_for(&self, displacement: f64) -> Result<f64> {
        let v = displacement / self.displacement_per_volt;
        self.check(v)?;
        Ok(v)
    }

    /// Focal length implied by displacement over angle [m].
    pub fn effective_focal_length(&self) -> f64 {
        self.displacement_per_volt / self.angle_per_volt
    }
}

/// Displacement [m] for `voltage` with the default deflector calibration.
pub fn deflector_displacement(voltage: f64) -> Result<f64> {
    Deflector::default().displacement(voltage)
}

/// One neighbouring pair in an ion string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAddressing {
    pub left: usize,
    pub right: usize,
    /// Distance [m].
    pub spacing: f64,
    /// Spacing exceeds the imaging resolution.
    pub resolvable: bool,
    /// Neighbour excitation for a π-pulse on one ion of the pair.
    pub crosstalk: f64,
}

pub fn addressability_report(chain: &ChainGeometry, beam: &BeamProfile) -> Result<Vec<PairAddressing>> {
    beam.validate()?;
    chain
        .positions
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let spacing = w[1] - w[0];
            Ok(PairAddressing {
                left: i,
                right: i + 1,
                spacing,
                resolvable: spacing > IMAGING_RESOLUTION,
                crosstalk: crosstalk_probability(beam, spacing, core::f64::consts::PI)?,
            })
        })
        .collect()
}
