//! Cooling limits and rate-equation cooling dynamics for one motional mode.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::fock::FockDistribution;
use crate::liouville::EitDressing;

/// Dipole-emission recoil factor used by both cooling models.
pub const DEFAULT_RECOIL: f64 = 0.4;

/// Doppler-limited mean phonon number `Γ/(2ν) − 1/2`, floored at zero.
/// Both arguments in rad/s.
pub fn doppler_limit(gamma: f64, nu: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0 && nu.is_finite() && nu > 0.0) {
        return Err(domain!("linewidth and trap frequency must be positive"));
    }
    Ok((gamma / (2.0 * nu) - 0.5).max(0.0))
}

/// Effective D5/2 linewidth when quenched through P3/2 with Rabi frequency
/// `omega_quench`: `Ω_q² / Γ_P3/2`.
pub fn quench_linewidth(omega_quench: f64, gamma_p32: f64) -> Result<f64> {
    if !(gamma_p32.is_finite() && gamma_p32 > 0.0) {
        return Err(domain!("P3/2 decay rate must be positive, got {gamma_p32}"));
    }
    if !omega_quench.is_finite() {
        return Err(domain!("quench Rabi frequency must be finite"));
    }
    Ok(omega_quench * omega_quench / gamma_p32)
}

/// Resolved-sideband cooling on a quench-broadened narrow transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandCoolingParams {
    pub eta: f64,
    /// Qubit-transition Rabi frequency [rad/s].
    pub omega: f64,
    /// Effective linewidth [rad/s].
    pub gamma_eff: f64,
    /// Laser detuning from the carrier [rad/s].
    pub detuning: f64,
    /// Trap frequency [rad/s].
    pub nu: f64,
    /// Recoil geometry factor α.
    pub recoil: f64,
}

impl SidebandCoolingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && (0.0..1.0).contains(&self.eta)) {
            return Err(domain!("Lamb-Dicke parameter must lie in [0, 1), got {}", self.eta));
        }
        for (name, v) in [
            ("omega", self.omega),
            ("gamma_eff", self.gamma_eff),
            ("recoil", self.recoil),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.gamma_eff > 0.0) {
            return Err(domain!("effective linewidth must be positive"));
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(domain!("trap frequency must be positive, got {}", self.nu));
        }
        if !self.detuning.is_finite() {
            return Err(domain!("detuning must be finite"));
        }
        Ok(())
    }

    /// Lorentzian excitation rate `(Ω²/2) Γ / ((Γ/2)² + x²)` at detuning `x`.
    pub fn lorentzian_rate(&self, x: f64) -> f64 {
        let half = 0.5 * self.gamma_eff;
        0.5 * self.omega * self.omega * self.gamma_eff / (half * half + x * x)
    }
}

/// Phonon removal (`cool`, A₋) and addition (`heat`, A₊) rate coefficients [1/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingRates {
    pub cool: f64,
    pub heat: f64,
}

impl CoolingRates {
    /// `(A₊ + R_h) / (A₋ − A₊ − R_h)`, or `None` when heating wins.
    pub fn steady_state_mean(&self, heating_rate: f64) -> Option<f64> {
        let up = self.heat + heating_rate;
        let net = self.cool - up;
        (net > 0.0).then(|| up / net)
    }
}

pub fn sideband_cooling_rates(p: &SidebandCoolingParams) -> Result<CoolingRates> {
    p.validate()?;
    let eta2 = p.eta * p.eta;
    let recoil = p.recoil * eta2 * p.lorentzian_rate(p.detuning);
    Ok(CoolingRates {
        cool: eta2 * p.lorentzian_rate(p.detuning + p.nu) + recoil,
        heat: eta2 * p.lorentzian_rate(p.detuning - p.nu) + recoil,
    })
}

/// Sampled cooling dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingTrajectory {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub ground_population: Vec<f64>,
    pub rates: CoolingRates,
    pub heating_rate: f64,
    /// Analytic stationary n̄; `None` flags that no steady state exists.
    pub steady_state_mean: Option<f64>,
    pub final_distribution: FockDistribution,
}

/// Birth-death ladder over Fock populations,
/// `dp_n/dt = A₋[(n+1)p_{n+1} − n p_n] + (A₊+R_h)[n p_{n−1} − (n+1)p_n]`,
/// with no flux across the truncation. Integrated with fixed-step RK4 and
/// sampled at `samples + 1` equally spaced times from 0 to `t_end`.
pub fn simulate_ladder(
    rates: CoolingRates,
    heating_rate: f64,
    initial: &FockDistribution,
    t_end: f64,
    samples: usize,
) -> Result<CoolingTrajectory> {
    if !(heating_rate.is_finite() && heating_rate >= 0.0) {
        return Err(domain!("heating rate must be non-negative, got {heating_rate}"));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(domain!("end time must be non-negative, got {t_end}"));
    }
    if samples == 0 {
        return Err(Error::Malformed("at least one sample interval is needed".into()));
    }
    let down = rates.cool;
    let up = rates.heat + heating_rate;
    let n_max = initial.n_max();

    let derivative = |p: &[f64], out: &mut [f64]| {
        for n in 0..=n_max {
            let nf = n as f64;
            let mut d = 0.0;
            if n < n_max {
                d += down * (nf + 1.0) * p[n + 1] - up * (nf + 1.0) * p[n];
            }
            if n > 0 {
                d += up * nf * p[n - 1] - down * nf * p[n];
            }
            out[n] = d;
        }
    };

    let max_rate = (down + up) * (n_max as f64 + 1.0);
    let sample_dt = t_end / samples as f64;
    let steps_per_sample = if max_rate == 0.0 || sample_dt == 0.0 {
        1
    } else {
        libm::ceil(sample_dt * max_rate / 0.5).max(1.0) as usize
    };
    let dt = sample_dt / steps_per_sample as f64;

    let mut p = initial.populations().to_vec();
    let dim = p.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);

    let mean_of = |p: &[f64]| p.iter().enumerate().map(|(n, x)| n as f64 * x).sum::<f64>();
    let mut times = Vec::with_capacity(samples + 1);
    let mut mean = Vec::with_capacity(samples + 1);
    let mut ground = Vec::with_capacity(samples + 1);
    times.push(0.0);
    mean.push(mean_of(&p));
    ground.push(p[0]);

    for s in 1..=samples {
        for _ in 0..steps_per_sample {
            derivative(&p, &mut k1);
            for i in 0..dim {
                tmp[i] = p[i] + 0.5 * dt * k1[i];
            }
            derivative(&tmp, &mut k2);
            for i in 0..dim {
                tmp[i] = p[i] + 0.5 * dt * k2[i];
            }
            derivative(&tmp, &mut k3);
            for i in 0..dim {
                tmp[i] = p[i] + dt * k3[i];
            }
            derivative(&tmp, &mut k4);
            for i in 0..dim {
                p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        times.push(s as f64 * sample_dt);
        mean.push(mean_of(&p));
        ground.push(p[0]);
    }

    Ok(CoolingTrajectory {
        times,
        mean,
        ground_population: ground,
        rates,
        heating_rate,
        steady_state_mean: rates.steady_state_mean(heating_rate),
        final_distribution: FockDistribution::new(p)?,
    })
}

/// Resolved-sideband cooling from `initial` with anomalous heating
/// `heating_rate` [phonons/s].
pub fn sideband_cooling_simulate(
    params: &SidebandCoolingParams,
    initial: &FockDistribution,
    heating_rate: f64,
    t_end: f64,
    samples: usize,
) -> Result<CoolingTrajectory> {
    let rates = sideband_cooling_rates(params)?;
    simulate_ladder(rates, heating_rate, initial, t_end, samples)
}

/// EIT cooling of one mode read off the dressed absorption profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EitCooling {
    /// Mode frequency [rad/s].
    pub nu: f64,
    /// S(+ν): scattering at the red-sideband two-photon detuning.
    pub red_scattering: f64,
    /// S(−ν).
    pub blue_scattering: f64,
    /// S(0), the carrier.
    pub carrier_scattering: f64,
    pub recoil: f64,
    /// Stationary n̄; infinite in the heating regime.
    pub mean: f64,
    /// True when S(+ν) ≤ S(−ν).
    pub heating_regime: bool,
}

impl EitCooling {
    /// Rate coefficients for a mode with Lamb-Dicke parameter `eta`.
    pub fn rates(&self, eta: f64) -> CoolingRates {
        let eta2 = eta * eta;
        let recoil = self.recoil * self.carrier_scattering;
        CoolingRates {
            cool: eta2 * (self.red_scattering + recoil),
            heat: eta2 * (self.blue_scattering + recoil),
        }
    }

    /// Net cooling rate `η²(S(+ν) − S(−ν))` [1/s].
    pub fn cooling_rate(&self, eta: f64) -> f64 {
        eta * eta * (self.red_scattering - self.blue_scattering)
    }

    pub fn ground_population(&self) -> f64 {
        if self.heating_regime {
            0.0
        } else {
            1.0 / (1.0 + self.mean)
        }
    }
}

/// Steady state `n̄ = (S(−ν) + α S(0)) / (S(+ν) − S(−ν))` with the π probe on
/// the carrier (two-photon resonance) and mode frequency `nu` [rad/s].
pub fn eit_cooling_steady_state(dressing: &EitDressing, nu: f64, recoil: f64) -> Result<EitCooling> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(domain!("mode frequency must be positive, got {nu}"));
    }
    if !(recoil.is_finite() && recoil >= 0.0) {
        return Err(domain!("recoil factor must be non-negative, got {recoil}"));
    }
    dressing.light_shift()?;
    let red = dressing.scattering_at_two_photon_detuning(nu)?;
    let blue = dressing.scattering_at_two_photon_detuning(-nu)?;
    let carrier = dressing.scattering_at_two_photon_detuning(0.0)?;
    let heating_regime = red <= blue;
    let mean = if heating_regime {
        f64::INFINITY
    } else {
        (blue + recoil * carrier) / (red - blue)
    };
    Ok(EitCooling {
        nu,
        red_scattering: red,
        blue_scattering: blue,
        carrier_scattering: carrier,
        recoil,
        mean,
        heating_regime,
    })
}

/// Linear anomalous heating `n̄₀ + rate·t`.
pub fn heating_evolution(initial_mean: f64, rate: f64, t: f64) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(domain!("heating rate must be non-negative, got {rate}"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain!("time must be non-negative, got {t}"));
    }
    if !(initial_mean.is_finite() && initial_mean >= 0.0) {
        return Err(domain!("initial mean must be non-negative, got {initial_mean}"));
    }
    Ok(initial_mean + rate * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::thermal_distribution;
    use crate::TAU;

    #[test]
    fn doppler_examples() {
        let g = TAU * 20e6;
        let n = doppler_limit(g, TAU * 4.51e6).unwrap();
        assert!((n - (20.0 / 9.02 - 0.5)).abs() < 1e-12);
        assert!((n - 2.0).abs() / 2.0 < 0.3);
        let n = doppler_limit(g, TAU * 700e3).unwrap();
        assert!((n - 13.79).abs() < 0.01);
        assert_eq!(doppler_limit(g, 1e3 * g).unwrap(), 0.0);
        assert!(doppler_limit(0.0, 1.0).is_err());
    }

    fn resolved(gamma_eff: f64, detuning_factor: f64) -> SidebandCoolingParams {
        let nu = TAU * 4.51e6;
        SidebandCoolingParams {
            eta: 0.046,
            omega: TAU * 100e3,
            gamma_eff,
            detuning: detuning_factor * nu,
            nu,
            recoil: DEFAULT_RECOIL,
        }
    }

    #[test]
    fn resolved_limit_formula() {
        let p = resolved(TAU * 5e3, -1.0);
        let r = sideband_cooling_rates(&p).unwrap();
        let n = r.steady_state_mean(0.0).unwrap();
        let ratio = p.gamma_eff / (2.0 * p.nu);
        let approx = ratio * ratio * (DEFAULT_RECOIL + 0.25);
        assert!((n / approx - 1.0).abs() < 1e-3);

        let p4 = resolved(4.0 * TAU * 5e3, -1.0);
        let n4 = sideband_cooling_rates(&p4).unwrap().steady_state_mean(0.0).unwrap();
        assert!((n4 / n / 16.0 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn carrier_drive_has_no_net_cooling() {
        let r = sideband_cooling_rates(&resolved(TAU * 50e3, 0.0)).unwrap();
        assert!((r.cool - r.heat).abs() <= 1e-12 * r.cool);
        assert_eq!(r.steady_state_mean(0.0), None);
    }

    #[test]
    fn ladder_decays_monotonically_without_heating() {
        let p = resolved(TAU * 50e3, -1.0);
        let init = thermal_distribution(2.0, 60).unwrap();
        let traj = sideband_cooling_simulate(&p, &init, 0.0, 5e-3, 200).unwrap();
        assert!(traj.mean.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let total: f64 = traj.final_distribution.populations().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn heating_dominated_ladder_is_flagged() {
        let rates = CoolingRates { cool: 10.0, heat: 1.0 };
        let init = thermal_distribution(0.1, 60).unwrap();
        let traj = simulate_ladder(rates, 20.0, &init, 1e-3, 10).unwrap();
        assert_eq!(traj.steady_state_mean, None);
        assert_eq!(traj.times.len(), 11);
    }

    #[test]
    fn quench() {
        let g = quench_linewidth(2.0, 4.0).unwrap();
        assert_eq!(g, 1.0);
        assert!(quench_linewidth(1.0, 0.0).is_err());
    }

    #[test]
    fn heating_examples() {
        let rate = 1.0 / 0.19;
        assert!((heating_evolution(0.0, rate, 0.19).unwrap() - 1.0).abs() < 1e-15);
        let dn = heating_evolution(0.0, rate, 200e-6).unwrap();
        assert!((dn - 0.00105).abs() < 5e-6);
        assert_eq!(heating_evolution(0.3, 0.0, 10.0).unwrap(), 0.3);
        assert!(heating_evolution(0.0, -1.0, 1.0).is_err());
    }
}
