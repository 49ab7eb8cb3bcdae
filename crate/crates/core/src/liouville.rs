//! Few-level Lindblad master equation: superoperator construction,
//! stationary states, and the dressed S1/2–P1/2 absorption profile used for
//! EIT cooling.
//!
//! Density matrices are vectorized column by column, so `ρ_ij` sits at index
//! `i + n·j` and `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::species::{SpeciesConstants, BOHR_MAGNETON, HBAR};

pub type C64 = Complex<f64>;

pub const MIN_LEVELS: usize = 2;
pub const MAX_LEVELS: usize = 8;

/// Singular values below this fraction of the largest count as zero.
const NULL_TOLERANCE: f64 = 1e-11;
/// Residual bound on the normalized Liouvillian applied to a steady state.
const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Coherent drive between two levels with Rabi frequency `rabi` [rad/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub lower: usize,
    pub upper: usize,
    pub rabi: f64,
}

/// Spontaneous decay `from → to` at `rate` [1/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// Pure dephasing through the projector on `level`, at `rate` [1/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dephasing {
    pub level: usize,
    pub rate: f64,
}

/// A few-level atom in a frame where the Hamiltonian is time independent.
///
/// `energies` are the diagonal of the rotating-frame Hamiltonian [rad/s] and
/// already contain laser detunings and Zeeman shifts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelSystem {
    pub energies: Vec<f64>,
    pub couplings: Vec<Coupling>,
    pub decays: Vec<Decay>,
    pub dephasings: Vec<Dephasing>,
}

impl LevelSystem {
    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_levels();
        if !(MIN_LEVELS..=MAX_LEVELS).contains(&n) {
            return Err(Error::Malformed(alloc::format!(
                "level count must be in {MIN_LEVELS}..={MAX_LEVELS}, got {n}"
            )));
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Malformed("non-finite level energy".into()));
        }
        let mut seen: Vec<(usize, usize)> = Vec::new();
        for c in &self.couplings {
            if c.lower >= n || c.upper >= n || c.lower == c.upper {
                return Err(Error::Malformed(alloc::format!(
                    "coupling {}–{} is not between two distinct levels",
                    c.lower,
                    c.upper
                )));
            }
            let key = (c.lower.min(c.upper), c.lower.max(c.upper));
            if seen.contains(&key) {
                return Err(Error::Malformed(alloc::format!(
                    "levels {}–{} are coupled twice",
                    key.0,
                    key.1
                )));
            }
            seen.push(key);
            if !c.rabi.is_finite() {
                return Err(Error::Malformed("non-finite Rabi frequency".into()));
            }
        }
        for d in &self.decays {
            if d.from >= n || d.to >= n || d.from == d.to {
                return Err(Error::Malformed(alloc::format!(
                    "decay {}→{} is not between two distinct levels",
                    d.from,
                    d.to
                )));
            }
            if !(d.rate.is_finite() && d.rate >= 0.0) {
                return Err(domain!("decay rate must be non-negative, got {}", d.rate));
            }
        }
        for d in &self.dephasings {
            if d.level >= n {
                return Err(Error::Malformed(alloc::format!("dephasing level {} out of range", d.level)));
            }
            if !(d.rate.is_finite() && d.rate >= 0.0) {
                return Err(domain!("dephasing rate must be non-negative, got {}", d.rate));
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> DMatrix<C64> {
        let n = self.n_levels();
        let mut h = DMatrix::<C64>::zeros(n, n);
        for (k, e) in self.energies.iter().enumerate() {
            h[(k, k)] = C64::new(*e, 0.0);
        }
        for c in &self.couplings {
            let half = C64::new(0.5 * c.rabi, 0.0);
            h[(c.lower, c.upper)] += half;
            h[(c.upper, c.lower)] += half;
        }
        h
    }

    /// Jump operators of every decay and dephasing channel.
    pub fn collapse_operators(&self) -> Vec<DMatrix<C64>> {
        let n = self.n_levels();
        let mut ops = Vec::with_capacity(self.decays.len() + self.dephasings.len());
        for d in &self.decays {
            let mut c = DMatrix::<C64>::zeros(n, n);
            c[(d.to, d.from)] = C64::new(libm::sqrt(d.rate), 0.0);
            ops.push(c);
        }
        for d in &self.dephasings {
            let mut c = DMatrix::<C64>::zeros(n, n);
            c[(d.level, d.level)] = C64::new(libm::sqrt(d.rate), 0.0);
            ops.push(c);
        }
        ops
    }

    /// Total spontaneous decay rate out of each level.
    pub fn emission_rates(&self) -> Vec<f64> {
        let mut rates = alloc::vec![0.0; self.n_levels()];
        for d in &self.decays {
            rates[d.from] += d.rate;
        }
        rates
    }
}

/// Superoperator `L` with `dρ/dt = L vec(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub n_levels: usize,
    pub matrix: DMatrix<C64>,
    emission_rates: Vec<f64>,
}

impl Liouvillian {
    /// `dρ/dt` for a density matrix.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let n = self.n_levels;
        let v = DVector::from_column_slice(rho.as_slice());
        let out = &self.matrix * v;
        DMatrix::from_column_slice(n, n, out.as_slice())
    }

    pub fn emission_rates(&self) -> &[f64] {
        &self.emission_rates
    }
}

pub fn build_liouvillian(system: &LevelSystem) -> Result<Liouvillian> {
    system.validate()?;
    let n = system.n_levels();
    let id = DMatrix::<C64>::identity(n, n);
    let h = system.hamiltonian();
    let minus_i = C64::new(0.0, -1.0);

    let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * minus_i;
    for c in system.collapse_operators() {
        let cdc = c.adjoint() * &c;
        l += c.conjugate().kronecker(&c);
        l -= id.kronecker(&cdc) * C64::new(0.5, 0.0);
        l -= cdc.transpose().kronecker(&id) * C64::new(0.5, 0.0);
    }
    Ok(Liouvillian {
        n_levels: n,
        matrix: l,
        emission_rates: system.emission_rates(),
    })
}

/// Stationary density matrix and its photon scattering rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub density: DMatrix<C64>,
    /// Σ_k (total decay rate of k)·ρ_kk [photons/s].
    pub scattering_rate: f64,
}

impl SteadyState {
    pub fn population(&self, level: usize) -> f64 {
        self.density[(level, level)].re
    }

    pub fn trace(&self) -> C64 {
        self.density.trace()
    }
}

/// Solves `L ρ = 0` with `tr ρ = 1`.
///
/// The nullity is read off the singular values of `L`; the state itself comes
/// from an LU solve with the first population equation replaced by the trace
/// condition, which is exact once the null space is known to be
/// one-dimensional.
pub fn steady_state(liouvillian: &Liouvillian) -> Result<SteadyState> {
    let n = liouvillian.n_levels;
    let dim = n * n;
    let scale = liouvillian
        .matrix
        .iter()
        .map(|z| libm::hypot(z.re, z.im))
        .fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return Err(Error::AmbiguousSteadyState { dimension: dim });
    }
    let a = &liouvillian.matrix / C64::new(scale, 0.0);

    let singular = a.clone().singular_values();
    let largest = singular.iter().copied().fold(0.0_f64, f64::max);
    let nullity = singular
        .iter()
        .filter(|s| **s < NULL_TOLERANCE * largest)
        .count();
    if nullity != 1 {
        return Err(Error::AmbiguousSteadyState { dimension: nullity });
    }

    let mut system = a.clone();
    let mut rhs = DVector::<C64>::zeros(dim);
    system.row_mut(0).fill(C64::new(0.0, 0.0));
    for k in 0..n {
        system[(0, k + n * k)] = C64::new(1.0, 0.0);
    }
    rhs[0] = C64::new(1.0, 0.0);
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NotConverged("singular trace-augmented Liouvillian".into()))?;

    let residual = (&a * &x).norm();
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::NotConverged(alloc::format!(
            "steady-state residual {residual:.3e}"
        )));
    }

    let rho = DMatrix::from_column_slice(n, n, x.as_slice());
    // remove the rounding-level anti-Hermitian part
    let density = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let scattering_rate = liouvillian
        .emission_rates
        .iter()
        .enumerate()
        .map(|(k, g)| g * density[(k, k)].re)
        .sum();
    Ok(SteadyState {
        density,
        scattering_rate,
    })
}

/// Convenience: build the Liouvillian and solve for its stationary state.
pub fn solve_steady_state(system: &LevelSystem) -> Result<SteadyState> {
    steady_state(&build_liouvillian(system)?)
}

/// Light shift `δ = (sqrt(Δσ² + Ωσ²) − Δσ)/2` of the dressed level for a
/// blue-detuned dressing beam.
pub fn ac_stark_shift(delta_sigma: f64, omega_sigma: f64) -> Result<f64> {
    if !(delta_sigma.is_finite() && delta_sigma > 0.0) {
        return Err(domain!("dressing detuning must be positive (blue), got {delta_sigma}"));
    }
    if !omega_sigma.is_finite() {
        return Err(domain!("dressing Rabi frequency must be finite"));
    }
    let root = libm::sqrt(delta_sigma * delta_sigma + omega_sigma * omega_sigma);
    // cancellation-free form of (root − Δσ)/2
    Ok(0.5 * omega_sigma * omega_sigma / (root + delta_sigma))
}

/// Dressing Rabi frequency that produces the light shift `shift`.
pub fn dressing_rabi_for_shift(delta_sigma: f64, shift: f64) -> Result<f64> {
    if !(delta_sigma.is_finite() && delta_sigma > 0.0) {
        return Err(domain!("dressing detuning must be positive (blue), got {delta_sigma}"));
    }
    if !(shift.is_finite() && shift >= 0.0) {
        return Err(domain!("light shift must be non-negative, got {shift}"));
    }
    Ok(libm::sqrt(4.0 * shift * (delta_sigma + shift)))
}

/// Which part of the S1/2–P1/2 manifold to model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    /// Λ system |S,−½⟩, |S,+½⟩, |P,+½⟩.
    ThreeLevel,
    /// |S,−½⟩, |S,+½⟩, |P,−½⟩, |P,+½⟩ with π light on both Δm = 0 legs.
    FourLevel,
}

/// Index of each sublevel in the generated [`LevelSystem`].
pub mod levels {
    pub const S_MINUS: usize = 0;
    pub const S_PLUS: usize = 1;
    /// |P,+½⟩ in the three-level reduction.
    pub const P_PLUS_3: usize = 2;
    pub const P_MINUS_4: usize = 2;
    pub const P_PLUS_4: usize = 3;
}

/// σ⁺ dressing and π probe on the Ca⁺ S1/2–P1/2 manifold.
///
/// `delta_sigma` is measured from the |S,−½⟩–|P,+½⟩ resonance and the probe
/// detuning from the |S,+½⟩–|P,+½⟩ resonance, both including Zeeman shifts,
/// so two-photon resonance is `Δπ = Δσ` for any field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EitDressing {
    /// σ⁺ detuning Δσ [rad/s], positive = blue.
    pub delta_sigma: f64,
    /// σ⁺ Rabi frequency Ωσ [rad/s].
    pub omega_sigma: f64,
    /// π Rabi frequency Ωπ [rad/s].
    pub omega_pi: f64,
    /// Magnetic field [T].
    pub b_field: f64,
    /// P1/2 decay rate [rad/s].
    pub gamma_p: f64,
    pub lande_s: f64,
    pub lande_p: f64,
    /// Dephasing rate on |S,+½⟩ [1/s], broadening the dark resonance.
    pub ground_dephasing: f64,
    pub manifold: Manifold,
}

/// Ωπ above this fraction of Ωσ is flagged as outside the weak-probe regime.
pub const WEAK_PROBE_RATIO: f64 = 0.1;

impl EitDressing {
    /// Defaults for Ca⁺: 4 G field, no extra dephasing, four levels.
    pub fn calcium(delta_sigma: f64, omega_sigma: f64, omega_pi: f64) -> Self {
        let ca = SpeciesConstants::calcium40();
        Self {
            delta_sigma,
            omega_sigma,
            omega_pi,
            b_field: 4e-4,
            gamma_p: ca.gamma_p,
            lande_s: ca.lande_s,
            lande_p: ca.lande_p,
            ground_dephasing: 0.0,
            manifold: Manifold::FourLevel,
        }
    }

    pub fn with_manifold(mut self, manifold: Manifold) -> Self {
        self.manifold = manifold;
        self
    }

    pub fn is_weak_probe(&self) -> bool {
        self.omega_pi.abs() <= WEAK_PROBE_RATIO * self.omega_sigma.abs()
    }

    /// Light shift of the dressed level.
    pub fn light_shift(&self) -> Result<f64> {
        ac_stark_shift(self.delta_sigma, self.omega_sigma)
    }

    /// Level system for a probe detuning `delta_pi` [rad/s].
    pub fn level_system(&self, delta_pi: f64) -> LevelSystem {
        use levels::*;
        let g = self.gamma_p;
        let raman = self.delta_sigma - delta_pi;
        match self.manifold {
            Manifold::ThreeLevel => LevelSystem {
                energies: alloc::vec![raman, 0.0, -delta_pi],
                couplings: alloc::vec![
                    Coupling { lower: S_MINUS, upper: P_PLUS_3, rabi: self.omega_sigma },
                    Coupling { lower: S_PLUS, upper: P_PLUS_3, rabi: self.omega_pi },
                ],
                decays: alloc::vec![
                    Decay { from: P_PLUS_3, to: S_PLUS, rate: g / 3.0 },
                    Decay { from: P_PLUS_3, to: S_MINUS, rate: 2.0 * g / 3.0 },
                ],
                dephasings: self.dephasing(),
            },
            Manifold::FourLevel => {
                let larmor = BOHR_MAGNETON * self.b_field / HBAR;
                let p_minus = raman - delta_pi + (self.lande_s - self.lande_p) * larmor;
                LevelSystem {
                    energies: alloc::vec![raman, 0.0, p_minus, -delta_pi],
                    couplings: alloc::vec![
                        Coupling { lower: S_MINUS, upper: P_PLUS_4, rabi: self.omega_sigma },
                        Coupling { lower: S_PLUS, upper: P_PLUS_4, rabi: self.omega_pi },
                        Coupling { lower: S_MINUS, upper: P_MINUS_4, rabi: self.omega_pi },
                    ],
                    decays: alloc::vec![
                        Decay { from: P_PLUS_4, to: S_PLUS, rate: g / 3.0 },
                        Decay { from: P_PLUS_4, to: S_MINUS, rate: 2.0 * g / 3.0 },
                        Decay { from: P_MINUS_4, to: S_MINUS, rate: g / 3.0 },
                        Decay { from: P_MINUS_4, to: S_PLUS, rate: 2.0 * g / 3.0 },
                    ],
                    dephasings: self.dephasing(),
                }
            }
        }
    }

    fn dephasing(&self) -> Vec<Dephasing> {
        if self.ground_dephasing > 0.0 {
            alloc::vec![Dephasing { level: levels::S_PLUS, rate: self.ground_dephasing }]
        } else {
            Vec::new()
        }
    }

    /// Steady-state scattering rate at probe detuning `delta_pi`.
    pub fn scattering_rate(&self, delta_pi: f64) -> Result<f64> {
        Ok(solve_steady_state(&self.level_system(delta_pi))?.scattering_rate)
    }

    /// Scattering rate at two-photon detuning `x`, i.e. `Δπ = Δσ + x`.
    pub fn scattering_at_two_photon_detuning(&self, x: f64) -> Result<f64> {
        self.scattering_rate(self.delta_sigma + x)
    }

    fn validate(&self) -> Result<()> {
        ac_stark_shift(self.delta_sigma, self.omega_sigma)?;
        for (name, v) in [
            ("gamma_p", self.gamma_p),
            ("lande_s", self.lande_s),
            ("lande_p", self.lande_p),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain!("{name} must be positive, got {v}"));
            }
        }
        if !(self.omega_pi.is_finite() && self.omega_pi > 0.0) {
            return Err(domain!("probe Rabi frequency must be positive, got {}", self.omega_pi));
        }
        if !self.b_field.is_finite() {
            return Err(domain!("magnetic field must be finite"));
        }
        Ok(())
    }
}

/// Probe absorption profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpectrum {
    /// (Δπ [rad/s], scattering rate [photons/s]) in input order.
    pub points: Vec<(f64, f64)>,
    /// False when the probe is too strong for a perturbative reading.
    pub weak_probe: bool,
}

impl ProbeSpectrum {
    /// Point with the highest scattering rate.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Scattering rate `Γ_P · (P population)` for each probe detuning.
pub fn probe_spectrum(dressing: &EitDressing, delta_pi: &[f64]) -> Result<ProbeSpectrum> {
    dressing.validate()?;
    let points = delta_pi
        .iter()
        .map(|&d| Ok((d, dressing.scattering_rate(d)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeSpectrum {
        points,
        weak_probe: dressing.is_weak_probe(),
    })
}
