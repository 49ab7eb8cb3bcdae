//! Populations over harmonic-oscillator number states.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

/// Largest tail weight a truncated thermal state may drop.
pub const THERMAL_TAIL_LIMIT: f64 = 1e-9;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Populations `p_n` for `n = 0..=n_max` of one motional mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDistribution {
    populations: Vec<f64>,
}

impl FockDistribution {
    /// Wraps populations that already sum to one.
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::Malformed("empty Fock distribution".into()));
        }
        for (n, &p) in populations.iter().enumerate() {
            if !(p.is_finite()
                && (-NORMALIZATION_TOLERANCE..=1.0 + NORMALIZATION_TOLERANCE).contains(&p))
            {
                return Err(domain!("population p_{n} = {p} is outside [0, 1]"));
            }
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(domain!("populations sum to {total}, not 1"));
        }
        Ok(Self { populations })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || total <= 0.0 {
            return Err(domain!("weights must be non-negative with a positive sum"));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    /// Number state `|n⟩` in a space truncated at `n_max`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(domain!("Fock state {n} does not fit below n_max = {n_max}"));
        }
        let mut populations = vec![0.0; n_max + 1];
        populations[n] = 1.0;
        Ok(Self { populations })
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn n_max(&self) -> usize {
        self.populations.len() - 1
    }

    /// Population of `|n⟩`, zero above the truncation.
    pub fn get(&self, n: usize) -> f64 {
        self.populations.get(n).copied().unwrap_or(0.0)
    }

    pub fn ground_population(&self) -> f64 {
        self.populations[0]
    }

    /// Mean phonon number.
    pub fn mean(&self) -> f64 {
        self.populations
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.populations.iter().copied().enumerate()
    }
}

/// Truncation that keeps a thermal state's dropped tail below
/// [`THERMAL_TAIL_LIMIT`], never less than 60.
pub fn default_n_max(mean: f64) -> usize {
    if mean <= 0.0 || !mean.is_finite() {
        return 60;
    }
    let ratio = mean / (mean + 1.0);
    // Tail beyond n_max is ratio^(n_max + 1).
    let needed = libm::ceil(libm::log(THERMAL_TAIL_LIMIT) / libm::log(ratio)) as usize;
    needed.max(60)
}

/// Thermal (geometric) distribution with mean `mean`, truncated at `n_max`
/// and renormalized.
pub fn thermal_distribution(mean: f64, n_max: usize) -> Result<FockDistribution> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(domain!("mean phonon number must be non-negative, got {mean}"));
    }
    if mean == 0.0 {
        return FockDistribution::fock(0, n_max);
    }
    let ratio = mean / (mean + 1.0);
    let tail = libm::pow(ratio, (n_max + 1) as f64);
    if tail > THERMAL_TAIL_LIMIT {
        return Err(Error::Truncation {
            n_max,
            tail,
            limit: THERMAL_TAIL_LIMIT,
        });
    }
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut p = 1.0 / (mean + 1.0);
    for _ in 0..=n_max {
        weights.push(p);
        p *= ratio;
    }
    FockDistribution::from_weights(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_temperature_is_ground_state() {
        let d = thermal_distribution(0.0, 60).unwrap();
        assert_eq!(d.get(0), 1.0);
        assert!(d.populations()[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn geometric_examples() {
        let d = thermal_distribution(1.0, 60).unwrap();
        assert!((d.get(0) - 0.5).abs() < 1e-15);
        assert!((d.get(1) - 0.25).abs() < 1e-15);
        let d = thermal_distribution(2.0, 120).unwrap();
        assert!((d.get(0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(thermal_distribution(-0.1, 60), Err(Error::Domain(_))));
        assert!(matches!(
            thermal_distribution(25.0, 60),
            Err(Error::Truncation { n_max: 60, .. })
        ));
        assert!(FockDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(FockDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(FockDistribution::fock(3, 2).is_err());
    }

    #[test]
    fn default_truncation_holds_paper_range() {
        assert_eq!(default_n_max(0.0), 60);
        assert_eq!(default_n_max(1.0), 60);
        for mean in [2.0, 13.8, 25.0, 30.0] {
            let n_max = default_n_max(mean);
            let d = thermal_distribution(mean, n_max).unwrap();
            assert!(((d.mean() - mean) / mean).abs() < 1e-6);
        }
    }
}
