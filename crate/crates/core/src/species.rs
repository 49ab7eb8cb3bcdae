//! Physical constants, atomic data and the Lamb-Dicke parameter.

use alloc::string::String;

use crate::error::{domain, Result};
use crate::TAU;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge [C].
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity [F/m].
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Unified atomic mass unit [kg].
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Electron rest mass [kg].
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Bohr magneton [J/T].
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;

/// Atomic mass of neutral 40Ca [u].
const CA40_ATOMIC_MASS_U: f64 = 39.962_590_863;

/// Atomic data for the modeled ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesConstants {
    /// Ion mass [kg].
    pub mass: f64,
    /// Ion charge [C].
    pub charge: f64,
    /// Wavelength of the S1/2–D5/2 qubit transition [m].
    pub lambda_qubit: f64,
    /// Wavelength of the S1/2–P1/2 dipole transition [m].
    pub lambda_dipole: f64,
    /// P1/2 decay rate [rad/s].
    pub gamma_p: f64,
    /// P3/2 decay rate [rad/s], used by the quench-broadened linewidth.
    pub gamma_p32: f64,
    /// D5/2 lifetime [s].
    pub tau_d: f64,
    /// P1/2 branching ratio into S1/2 versus D3/2.
    pub branching_sp_dp: f64,
    /// Landé g-factor of S1/2.
    pub lande_s: f64,
    /// Landé g-factor of P1/2.
    pub lande_p: f64,
}

impl SpeciesConstants {
    /// Singly ionized 40Ca.
    pub fn calcium40() -> Self {
        Self {
            mass: CA40_ATOMIC_MASS_U * ATOMIC_MASS_UNIT - ELECTRON_MASS,
            charge: ELEMENTARY_CHARGE,
            lambda_qubit: 729e-9,
            lambda_dipole: 397e-9,
            gamma_p: TAU * 20e6,
            gamma_p32: TAU * 21.5e6,
            tau_d: 1.0,
            branching_sp_dp: 16.0,
            lande_s: 2.002,
            lande_p: 2.0 / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("charge", self.charge),
            ("lambda_qubit", self.lambda_qubit),
            ("lambda_dipole", self.lambda_dipole),
            ("gamma_p", self.gamma_p),
            ("gamma_p32", self.gamma_p32),
            ("tau_d", self.tau_d),
            ("branching_sp_dp", self.branching_sp_dp),
            ("lande_s", self.lande_s),
            ("lande_p", self.lande_p),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(domain!("species {name} must be positive and finite, got {value}"));
            }
        }
        if self.branching_sp_dp <= 1.0 {
            return Err(domain!(
                "branching ratio must exceed 1, got {}",
                self.branching_sp_dp
            ));
        }
        Ok(())
    }

    /// Same species with a different mass.
    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }
}

impl Default for SpeciesConstants {
    fn default() -> Self {
        Self::calcium40()
    }
}

/// One motional mode of the trapped ion(s).
#[derive(Debug, Clone, PartialEq)]
pub struct MotionalMode {
    /// Mode frequency [Hz].
    pub frequency: f64,
    /// Lamb-Dicke parameter of the driving beam on this mode.
    pub lamb_dicke: f64,
    pub label: String,
}

impl MotionalMode {
    pub fn new(frequency: f64, lamb_dicke: f64, label: impl Into<String>) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(domain!("mode frequency must be positive, got {frequency}"));
        }
        if !(lamb_dicke > 0.0 && lamb_dicke < 1.0) {
            return Err(domain!("Lamb-Dicke parameter must lie in (0, 1), got {lamb_dicke}"));
        }
        Ok(Self {
            frequency,
            lamb_dicke,
            label: label.into(),
        })
    }

    /// Angular frequency [rad/s].
    pub fn angular_frequency(&self) -> f64 {
        TAU * self.frequency
    }
}

/// Seed for every randomized operation. The same seed and inputs give
/// bit-identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    pub fn rng(self) -> rand_chacha::ChaCha20Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha20Rng::seed_from_u64(self.0)
    }
}

/// Lamb-Dicke parameter `k cos(angle) sqrt(ħ / (2 m ω))` for light of
/// wavelength `lambda` [m] on a mode of frequency `frequency_hz`.
pub fn lamb_dicke_parameter(
    species: &SpeciesConstants,
    lambda: f64,
    projection_angle: f64,
    frequency_hz: f64,
) -> Result<f64> {
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(domain!("mode frequency must be positive, got {frequency_hz}"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain!("wavelength must be positive, got {lambda}"));
    }
    let k = TAU / lambda;
    // cos(π/2) is 6e-17 in floating point; a perpendicular beam couples to nothing.
    let projection = if libm::fabs(libm::remainder(projection_angle, core::f64::consts::PI))
        == core::f64::consts::FRAC_PI_2
    {
        0.0
    } else {
        libm::cos(projection_angle)
    };
    let ground_extent = libm::sqrt(HBAR / (2.0 * species.mass * TAU * frequency_hz));
    Ok(k * projection * ground_extent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calcium_is_valid() {
        SpeciesConstants::calcium40().validate().unwrap();
        let mut bad = SpeciesConstants::calcium40();
        bad.branching_sp_dp = 0.5;
        assert!(bad.validate().is_err());
        bad = SpeciesConstants::calcium40();
        bad.tau_d = 0.0;
        assert!(bad.validate().is_err());
    }

    // Frozen from a 40-digit mpmath evaluation of the same formula and constants.
    #[test]
    fn lamb_dicke_matches_arbitrary_precision() {
        let ca = SpeciesConstants::calcium40();
        let eta = lamb_dicke_parameter(&ca, 729e-9, 0.0, 4.51e6).unwrap();
        assert!((eta - 0.045_640_335_818_469_70).abs() < 1e-14);
        let eta = lamb_dicke_parameter(&ca, 729e-9, 0.0, 700e3).unwrap();
        assert!((eta - 0.115_847_877_740_215_40).abs() < 1e-14);
    }

    #[test]
    fn perpendicular_beam_has_no_coupling() {
        let ca = SpeciesConstants::calcium40();
        let eta =
            lamb_dicke_parameter(&ca, 729e-9, core::f64::consts::FRAC_PI_2, 1e6).unwrap();
        assert_eq!(eta, 0.0);
    }

    #[test]
    fn inverse_square_root_scaling() {
        let ca = SpeciesConstants::calcium40();
        for nu in [1e5, 7e5, 4.51e6, 2e7] {
            let a = lamb_dicke_parameter(&ca, 729e-9, 0.3, nu).unwrap();
            let b = lamb_dicke_parameter(&ca, 729e-9, 0.3, 4.0 * nu).unwrap();
            assert!((a / b - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_frequency() {
        let ca = SpeciesConstants::calcium40();
        assert!(lamb_dicke_parameter(&ca, 729e-9, 0.0, 0.0).is_err());
        assert!(lamb_dicke_parameter(&ca, 729e-9, 0.0, -1.0).is_err());
    }

    #[test]
    fn motional_mode_invariants() {
        assert!(MotionalMode::new(4.51e6, 0.046, "axial").is_ok());
        assert!(MotionalMode::new(0.0, 0.046, "axial").is_err());
        assert!(MotionalMode::new(1e6, 1.2, "axial").is_err());
    }
}
