//! Coherent qubit ⊗ motion dynamics on the carrier and motional sidebands.

use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};

use crate::error::{domain, Error, Result};
use crate::fock::FockDistribution;

/// Laser transition relative to the motional ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sideband {
    Carrier,
    /// Removes `k` phonons.
    Red(u32),
    /// Adds `k` phonons.
    Blue(u32),
}

impl Sideband {
    /// Change of the phonon number when the qubit goes S → D.
    pub fn order(self) -> i64 {
        match self {
            Sideband::Carrier => 0,
            Sideband::Red(k) => -(k as i64),
            Sideband::Blue(k) => k as i64,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Sideband::Red(0) | Sideband::Blue(0) => {
                Err(domain!("sideband order must be at least 1"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    /// S1/2 ground state.
    S,
    /// D5/2 metastable state.
    D,
}

/// Product state of the qubit and one motional mode.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitMotionState {
    pub qubit: Qubit,
    pub motion: FockDistribution,
}

impl QubitMotionState {
    pub fn ground(motion: FockDistribution) -> Self {
        Self {
            qubit: Qubit::S,
            motion,
        }
    }
}

/// A square laser pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub transition: Sideband,
    /// Bare Rabi frequency Ω₀ [rad/s].
    pub omega0: f64,
    /// Duration [s].
    pub duration: f64,
    /// Phase [rad]. Populations after a single pulse do not depend on it.
    pub phase: f64,
    pub addressed_ion: usize,
}

impl Pulse {
    pub fn new(transition: Sideband, omega0: f64, duration: f64) -> Self {
        Self {
            transition,
            omega0,
            duration,
            phase: 0.0,
            addressed_ion: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.transition.validate()?;
        if !(self.omega0.is_finite() && self.omega0 >= 0.0) {
            return Err(domain!("Rabi frequency must be non-negative, got {}", self.omega0));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(domain!("pulse duration must be non-negative, got {}", self.duration));
        }
        Ok(())
    }
}

/// Loss of coherence during pulses. A zero field disables that channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecoherenceModel {
    /// 1/e time of the contrast envelope [s].
    pub contrast_time: f64,
    /// Motional heating [phonons/s].
    pub heating_rate: f64,
    /// D5/2 lifetime [s].
    pub d_lifetime: f64,
}

impl DecoherenceModel {
    /// Contrast time giving 50% contrast after 1 ms.
    pub const DEFAULT_CONTRAST_TIME: f64 = 1.0e-3 / core::f64::consts::LN_2;

    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("contrast_time", self.contrast_time),
            ("heating_rate", self.heating_rate),
            ("d_lifetime", self.d_lifetime),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(domain!("{name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }

    /// Contrast remaining after time `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        if self.contrast_time > 0.0 && self.contrast_time.is_finite() {
            libm::exp(-t / self.contrast_time)
        } else {
            1.0
        }
    }
}

/// Generalized Laguerre polynomial `L_n^(α)(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: usize, x: f64) -> f64 {
    let a = alpha as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Rabi frequency of `|S,n⟩ ↔ |D,n+s⟩`:
/// `Ω₀ e^(−η²/2) η^|s| sqrt(n_<!/n_>!) L_{n_<}^{|s|}(η²)`.
///
/// Returns zero when the target phonon number would be negative.
pub fn rabi_frequency(n: usize, sideband: Sideband, eta: f64, omega0: f64) -> Result<f64> {
    sideband.validate()?;
    if !(eta.is_finite() && (0.0..1.0).contains(&eta)) {
        return Err(domain!("Lamb-Dicke parameter must lie in [0, 1), got {eta}"));
    }
    if !(omega0.is_finite() && omega0 >= 0.0) {
        return Err(domain!("Rabi frequency must be non-negative, got {omega0}"));
    }
    let s = sideband.order();
    let target = n as i64 + s;
    if target < 0 {
        return Ok(0.0);
    }
    let k = s.unsigned_abs() as usize;
    let lower = n.min(target as usize);
    let eta2 = eta * eta;
    // sqrt(n_<! / n_>!) = 1 / sqrt((n_< + 1)···n_>)
    let mut ratio = 1.0;
    for m in lower + 1..=lower + k {
        ratio /= m as f64;
    }
    Ok(omega0
        * libm::exp(-0.5 * eta2)
        * libm::pow(eta, k as f64)
        * libm::sqrt(ratio)
        * laguerre(lower, k, eta2))
}

fn coupling_for(
    qubit: Qubit,
    n: usize,
    sideband: Sideband,
    eta: f64,
    omega0: f64,
) -> Result<f64> {
    match qubit {
        Qubit::S => rabi_frequency(n, sideband, eta, omega0),
        Qubit::D => {
            // partner is |S, n − s⟩
            let partner = n as i64 - sideband.order();
            if partner < 0 {
                Ok(0.0)
            } else {
                rabi_frequency(partner as usize, sideband, eta, omega0)
            }
        }
    }
}

/// D-state probability after driving `sideband` for time `t` at laser
/// detuning `detuning` [rad/s] from the transition.
pub fn excitation_probability(
    initial: &QubitMotionState,
    sideband: Sideband,
    eta: f64,
    omega0: f64,
    detuning: f64,
    t: f64,
    decoherence: &DecoherenceModel,
) -> Result<f64> {
    let mut flipped = 0.0;
    for (n, p) in initial.motion.iter() {
        if p == 0.0 {
            continue;
        }
        let omega = coupling_for(initial.qubit, n, sideband, eta, omega0)?;
        let generalized2 = omega * omega + detuning * detuning;
        let transfer = if generalized2 == 0.0 {
            0.0
        } else {
            let s = libm::sin(0.5 * libm::sqrt(generalized2) * t);
            omega * omega / generalized2 * s * s
        };
        flipped += p * transfer;
    }
    let coherent = match initial.qubit {
        Qubit::S => flipped,
        Qubit::D => 1.0 - flipped,
    };
    let env = decoherence.envelope(t);
    Ok(coherent * env + 0.5 * (1.0 - env))
}

/// `(t, P_D(t))` for a resonant pulse of the given transition and Ω₀; the
/// pulse duration is ignored in favor of `times`.
pub fn simulate_flops(
    initial: &QubitMotionState,
    pulse: &Pulse,
    eta: f64,
    decoherence: &DecoherenceModel,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    pulse.validate()?;
    decoherence.validate()?;
    times
        .iter()
        .map(|&t| {
            let p = excitation_probability(
                initial,
                pulse.transition,
                eta,
                pulse.omega0,
                0.0,
                t,
                decoherence,
            )?;
            Ok((t, p))
        })
        .collect()
}

/// Least-squares fit of `a + b cos(ωt) + c sin(ωt)` to a flop curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlopFit {
    /// Angular frequency ω [rad/s], equal to the Rabi frequency for sin²(Ωt/2).
    pub frequency: f64,
    pub offset: f64,
    /// Oscillation amplitude sqrt(b² + c²).
    pub amplitude: f64,
    pub residual_sum_squares: f64,
}

fn linear_fit(times: &[f64], values: &[f64], omega: f64) -> (Vector3<f64>, f64) {
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for (&t, &y) in times.iter().zip(values) {
        let basis = Vector3::new(1.0, libm::cos(omega * t), libm::sin(omega * t));
        normal += basis * basis.transpose();
        rhs += basis * y;
    }
    let coef = normal
        .cholesky()
        .map(|c| c.solve(&rhs))
        .unwrap_or_else(Vector3::zeros);
    let rss = times
        .iter()
        .zip(values)
        .map(|(&t, &y)| {
            let r = y - coef[0] - coef[1] * libm::cos(omega * t) - coef[2] * libm::sin(omega * t);
            r * r
        })
        .sum();
    (coef, rss)
}

/// Fits the dominant flop frequency: a grid scan up to the Nyquist limit
/// followed by golden-section refinement of the residual.
pub fn fit_flop_frequency(times: &[f64], values: &[f64]) -> Result<FlopFit> {
    if times.len() != values.len() || times.len() < 8 {
        return Err(Error::Malformed(
            "flop fit needs at least 8 paired samples".into(),
        ));
    }
    let span = times.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - times.iter().copied().fold(f64::INFINITY, f64::min);
    if !(span > 0.0) {
        return Err(Error::Malformed("flop fit needs a positive time span".into()));
    }
    let base = core::f64::consts::TAU / span;
    let nyquist = core::f64::consts::PI * (times.len() - 1) as f64 / span;
    let step = 0.1 * base;

    let mut best = (0.0, f64::INFINITY);
    let mut omega = 0.5 * base;
    while omega <= nyquist {
        let (_, rss) = linear_fit(times, values, omega);
        if rss < best.1 {
            best = (omega, rss);
        }
        omega += step;
    }

    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let golden = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = linear_fit(times, values, x1).1;
    let mut f2 = linear_fit(times, values, x2).1;
    while hi - lo > 1e-13 * hi {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = linear_fit(times, values, x1).1;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = linear_fit(times, values, x2).1;
        }
    }
    let frequency = 0.5 * (lo + hi);
    let (coef, rss) = linear_fit(times, values, frequency);
    Ok(FlopFit {
        frequency,
        offset: coef[0],
        amplitude: libm::hypot(coef[1], coef[2]),
        residual_sum_squares: rss,
    })
}

/// Motional state inferred from on-resonance sideband excitations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandThermometry {
    /// R = P_red / P_blue.
    pub ratio: f64,
    /// n̄ = R / (1 − R).
    pub mean: f64,
    /// Thermal ground-state population 1 − R.
    pub ground_population: f64,
}

pub fn sideband_ratio_to_nbar(p_red: f64, p_blue: f64) -> Result<SidebandThermometry> {
    if !(p_blue > 0.0 && p_blue <= 1.0) {
        return Err(domain!("blue sideband excitation must lie in (0, 1], got {p_blue}"));
    }
    if !(0.0..=1.0).contains(&p_red) {
        return Err(domain!("red sideband excitation must lie in [0, 1], got {p_red}"));
    }
    let ratio = p_red / p_blue;
    if ratio >= 1.0 {
        return Err(domain!(
            "sideband ratio {ratio} ≥ 1 is not produced by any thermal state"
        ));
    }
    Ok(SidebandThermometry {
        ratio,
        mean: ratio / (1.0 - ratio),
        ground_population: 1.0 - ratio,
    })
}

/// Outcome of preparing `|S, n=1⟩` from `|S, n=0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockPreparation {
    pub state: QubitMotionState,
    /// Population of n = 1.
    pub fidelity: f64,
    /// Blue-sideband π-time for n = 0 [s].
    pub pi_time: f64,
    /// Duration actually applied [s].
    pub pulse_duration: f64,
}

/// Blue-sideband π-pulse on the motional ground state followed by an
/// instantaneous, perfect D → S repump. `duration_scale` multiplies the ideal
/// π-time (1.0 for a calibrated pulse).
pub fn prepare_fock_one(
    eta: f64,
    omega0: f64,
    decoherence: &DecoherenceModel,
    duration_scale: f64,
) -> Result<FockPreparation> {
    decoherence.validate()?;
    if !(duration_scale.is_finite() && duration_scale >= 0.0) {
        return Err(domain!("duration scale must be non-negative, got {duration_scale}"));
    }
    let omega = rabi_frequency(0, Sideband::Blue(1), eta, omega0)?;
    if omega == 0.0 {
        return Err(domain!("blue sideband coupling vanishes"));
    }
    let pi_time = core::f64::consts::PI / omega;
    let pulse_duration = duration_scale * pi_time;
    let ground = QubitMotionState::ground(FockDistribution::fock(0, 1)?);
    let transferred = excitation_probability(
        &ground,
        Sideband::Blue(1),
        eta,
        omega0,
        0.0,
        pulse_duration,
        decoherence,
    )?;
    let motion = FockDistribution::new(alloc::vec![1.0 - transferred, transferred])?;
    Ok(FockPreparation {
        state: QubitMotionState::ground(motion),
        fidelity: transferred,
        pi_time,
        pulse_duration,
    })
}

/// Ramsey fringe contrast `exp(−π Δν T)` for a Lorentzian laser line of
/// full width `laser_fwhm_hz`.
pub fn ramsey_contrast(delay: f64, laser_fwhm_hz: f64) -> Result<f64> {
    if !(delay.is_finite() && delay >= 0.0) {
        return Err(domain!("Ramsey delay must be non-negative, got {delay}"));
    }
    if !(laser_fwhm_hz.is_finite() && laser_fwhm_hz >= 0.0) {
        return Err(domain!("laser linewidth must be non-negative, got {laser_fwhm_hz}"));
    }
    Ok(libm::exp(-core::f64::consts::PI * laser_fwhm_hz * delay))
}

/// Delay at which the Ramsey contrast falls to 1/e [s].
pub fn ramsey_decay_time(laser_fwhm_hz: f64) -> Result<f64> {
    if !(laser_fwhm_hz.is_finite() && laser_fwhm_hz > 0.0) {
        return Err(domain!("laser linewidth must be positive, got {laser_fwhm_hz}"));
    }
    Ok(1.0 / (core::f64::consts::PI * laser_fwhm_hz))
}
