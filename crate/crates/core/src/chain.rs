//! Linear ion strings: equilibrium positions, axial normal modes and the
//! spacing constraint on the center-of-mass frequency.
//!
//! Positions are found in the dimensionless units where the axial potential
//! energy is `U(u) = Σ u_i²/2 + Σ_{i<j} 1/|u_i − u_j|` and converted to meters
//! with the length scale `ℓ = (q² / (4πε₀ m ω²))^(1/3)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::species::{lamb_dicke_parameter, SpeciesConstants, EPSILON_0};
use crate::TAU;

pub const MAX_IONS: usize = 20;
/// Largest gradient norm accepted at an equilibrium (dimensionless).
pub const GRADIENT_TOLERANCE: f64 = 1e-10;
/// COM frequency bracket searched by [`max_com_frequency`] [Hz].
pub const FREQUENCY_BRACKET: (f64, f64) = (1e3, 100e6);

const MAX_NEWTON_ITERATIONS: usize = 100;

/// Total dimensionless potential energy of the string.
pub fn potential(u: &[f64]) -> f64 {
    let mut energy: f64 = u.iter().map(|x| 0.5 * x * x).sum();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            energy += 1.0 / (u[j] - u[i]).abs();
        }
    }
    energy
}

pub fn gradient(u: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = u.to_vec();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let d = u[j] - u[i];
            // force pushing i and j apart
            let f = d.signum() / (d * d);
            g[i] += f;
            g[j] -= f;
        }
    }
    g
}

pub fn hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut h = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = (u[j] - u[i]).abs();
            let k = 2.0 / (d * d * d);
            h[(i, i)] += k;
            h[(j, j)] += k;
            h[(i, j)] -= k;
            h[(j, i)] -= k;
        }
    }
    h
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn strictly_increasing(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[1] > w[0])
}

/// Dimensionless equilibrium positions of `n_ions` ions, sorted ascending.
///
/// Damped Newton iteration from an equally spaced guess.
pub fn equilibrium_positions(n_ions: usize) -> Result<Vec<f64>> {
    if !(1..=MAX_IONS).contains(&n_ions) {
        return Err(domain!("number of ions must be in 1..={MAX_IONS}, got {n_ions}"));
    }
    if n_ions == 1 {
        return Ok(alloc::vec![0.0]);
    }
    let spacing = 2.018 / libm::pow(n_ions as f64, 0.559);
    let mut u: Vec<f64> = (0..n_ions)
        .map(|i| (i as f64 - 0.5 * (n_ions - 1) as f64) * spacing)
        .collect();

    for _ in 0..MAX_NEWTON_ITERATIONS {
        let g = gradient(&u);
        if norm(&g) < 1e-14 {
            break;
        }
        let h = hessian(&u);
        let step = h
            .cholesky()
            .ok_or_else(|| Error::NotConverged("Hessian lost positive definiteness".into()))?
            .solve(&DVector::from_vec(g.clone()));
        let energy = potential(&u);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x - alpha * s).collect();
            if strictly_increasing(&trial) && potential(&trial) <= energy + 1e-14 * energy.abs() {
                u = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                // no further descent possible at machine precision
                return finish(u);
            }
        }
    }
    finish(u)
}

fn finish(mut u: Vec<f64>) -> Result<Vec<f64>> {
    // Exact mirror symmetry: average each ion with its partner.
    let n = u.len();
    for i in 0..n / 2 {
        let half = 0.5 * (u[n - 1 - i] - u[i]);
        u[i] = -half;
        u[n - 1 - i] = half;
    }
    if n % 2 == 1 {
        u[n / 2] = 0.0;
    }
    let residual = norm(&gradient(&u));
    if residual < GRADIENT_TOLERANCE {
        Ok(u)
    } else {
        Err(Error::NotConverged(alloc::format!(
            "equilibrium gradient norm {residual:.3e} for {n} ions"
        )))
    }
}

/// Length scale `ℓ` [m] for a COM frequency `com_frequency_hz`.
pub fn length_scale(species: &SpeciesConstants, com_frequency_hz: f64) -> Result<f64> {
    if !(com_frequency_hz.is_finite() && com_frequency_hz > 0.0) {
        return Err(domain!("COM frequency must be positive, got {com_frequency_hz}"));
    }
    let omega = TAU * com_frequency_hz;
    let q2 = species.charge * species.charge;
    Ok(libm::cbrt(
        q2 / (4.0 * core::f64::consts::PI * EPSILON_0 * species.mass * omega * omega),
    ))
}

fn min_dimensionless_spacing(u: &[f64]) -> f64 {
    u.windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Smallest distance [m] between adjacent ions.
pub fn min_spacing(n_ions: usize, com_frequency_hz: f64, species: &SpeciesConstants) -> Result<f64> {
    if n_ions < 2 {
        return Err(domain!("spacing needs at least two ions, got {n_ions}"));
    }
    let u = equilibrium_positions(n_ions)?;
    Ok(length_scale(species, com_frequency_hz)? * min_dimensionless_spacing(&u))
}

/// Highest COM frequency [Hz] at which no two of `n_ions` ions are closer
/// than `d_min` [m]. Bisection on [`FREQUENCY_BRACKET`].
pub fn max_com_frequency(n_ions: usize, d_min: f64, species: &SpeciesConstants) -> Result<f64> {
    if !(d_min.is_finite() && d_min > 0.0) {
        return Err(domain!("minimum spacing must be positive, got {d_min}"));
    }
    if n_ions < 2 {
        return Err(domain!("spacing needs at least two ions, got {n_ions}"));
    }
    let du = min_dimensionless_spacing(&equilibrium_positions(n_ions)?);
    let spacing = |nu: f64| -> Result<f64> { Ok(length_scale(species, nu)? * du) };

    let (mut lo, mut hi) = FREQUENCY_BRACKET;
    if spacing(lo)? < d_min || spacing(hi)? > d_min {
        return Err(Error::Unreachable(alloc::format!(
            "spacing {d_min:e} m for {n_ions} ions is not reached between {lo:e} and {hi:e} Hz"
        )));
    }
    // spacing falls monotonically with frequency; bisect geometrically
    while (hi - lo) > 1e-12 * lo {
        let mid = libm::sqrt(lo * hi);
        if spacing(mid)? >= d_min {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Equilibrium configuration of a string in a given trap.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainGeometry {
    pub n_ions: usize,
    /// Axial COM frequency [Hz].
    pub com_frequency: f64,
    /// Length scale ℓ [m].
    pub length_scale: f64,
    /// Positions [m], ascending.
    pub positions: Vec<f64>,
    pub dimensionless_positions: Vec<f64>,
}

impl ChainGeometry {
    pub fn new(species: &SpeciesConstants, n_ions: usize, com_frequency_hz: f64) -> Result<Self> {
        let u = equilibrium_positions(n_ions)?;
        Self::from_dimensionless(species, com_frequency_hz, u)
    }

    /// Geometry from arbitrary dimensionless positions. No equilibrium check;
    /// [`axial_modes`] rejects positions that are not stationary.
    pub fn from_dimensionless(
        species: &SpeciesConstants,
        com_frequency_hz: f64,
        dimensionless_positions: Vec<f64>,
    ) -> Result<Self> {
        if dimensionless_positions.is_empty() {
            return Err(Error::Malformed("empty ion string".into()));
        }
        if !strictly_increasing(&dimensionless_positions) {
            return Err(Error::Malformed("positions must be strictly increasing".into()));
        }
        let length_scale = length_scale(species, com_frequency_hz)?;
        Ok(Self {
            n_ions: dimensionless_positions.len(),
            com_frequency: com_frequency_hz,
            length_scale,
            positions: dimensionless_positions.iter().map(|u| u * length_scale).collect(),
            dimensionless_positions,
        })
    }

    /// Distances [m] between neighbouring ions, left to right.
    pub fn spacings(&self) -> Vec<f64> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min_spacing(&self) -> Option<f64> {
        self.spacings().into_iter().reduce(f64::min)
    }
}

/// Axial normal modes, ascending in frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// Mode frequencies [Hz].
    pub frequencies: Vec<f64>,
    /// Column `m` holds the participation of each ion in mode `m`.
    pub eigenvectors: DMatrix<f64>,
}

impl ModeSpectrum {
    pub fn participation(&self, ion: usize, mode: usize) -> f64 {
        self.eigenvectors[(ion, mode)]
    }

    /// Lamb-Dicke parameter of a beam on `ion` for `mode`.
    pub fn lamb_dicke(
        &self,
        species: &SpeciesConstants,
        lambda: f64,
        projection_angle: f64,
        ion: usize,
        mode: usize,
    ) -> Result<f64> {
        if ion >= self.eigenvectors.nrows() || mode >= self.frequencies.len() {
            return Err(Error::Malformed(alloc::format!(
                "ion {ion} / mode {mode} out of range"
            )));
        }
        let single =
            lamb_dicke_parameter(species, lambda, projection_angle, self.frequencies[mode])?;
        Ok(single * self.participation(ion, mode))
    }
}

/// Normal modes from the Hessian of the dimensionless potential.
pub fn axial_modes(geometry: &ChainGeometry) -> Result<ModeSpectrum> {
    let u = &geometry.dimensionless_positions;
    let residual = norm(&gradient(u));
    if residual >= GRADIENT_TOLERANCE {
        return Err(Error::NotConverged(alloc::format!(
            "positions are not an equilibrium (gradient norm {residual:.3e})"
        )));
    }
    let eig = hessian(u).symmetric_eigen();
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let n = u.len();
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    let mut frequencies = Vec::with_capacity(n);
    for (m, &k) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[k];
        if lambda <= 0.0 {
            return Err(Error::NotConverged(alloc::format!(
                "Hessian eigenvalue {lambda} is not positive"
            )));
        }
        frequencies.push(geometry.com_frequency * libm::sqrt(lambda));
        let mut v = eig.eigenvectors.column(k).into_owned();
        // sign convention: positive sum, else positive first significant entry
        let sum: f64 = v.iter().sum();
        let sign = if sum.abs() > 1e-9 {
            sum.signum()
        } else {
            v.iter().find(|x| x.abs() > 1e-9).map_or(1.0, |x| x.signum())
        };
        v *= sign;
        eigenvectors.set_column(m, &v);
    }
    Ok(ModeSpectrum {
        frequencies,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_and_two_ions() {
        assert_eq!(equilibrium_positions(1).unwrap(), [0.0]);
        let u = equilibrium_positions(2).unwrap();
        let exact = libm::cbrt(0.25);
        assert!((u[0] + exact).abs() < 1e-10);
        assert!((u[1] - exact).abs() < 1e-10);
    }

    #[test]
    fn three_ions_analytic() {
        let u = equilibrium_positions(3).unwrap();
        let outer = libm::cbrt(1.25);
        assert!((u[0] + outer).abs() < 1e-10);
        assert_eq!(u[1], 0.0);
        assert!((u[2] - outer).abs() < 1e-10);
        assert!((outer - 1.0772).abs() < 1e-4);
    }

    #[test]
    fn rejects_out_of_range_counts() {
        assert!(equilibrium_positions(0).is_err());
        assert!(equilibrium_positions(MAX_IONS + 1).is_err());
        assert!(equilibrium_positions(MAX_IONS).is_ok());
    }

    #[test]
    fn length_scale_values() {
        let ca = SpeciesConstants::calcium40();
        // Frozen from a 40-digit mpmath evaluation.
        assert!((length_scale(&ca, 700e3).unwrap() - 5.643_344_136_746_711e-6).abs() < 1e-18);
        assert!((length_scale(&ca, 1e6).unwrap() - 4.449_063_060_837_385e-6).abs() < 1e-18);
        let heavy = ca.with_mass(2.0 * ca.mass);
        let ratio = length_scale(&heavy, 1e6).unwrap() / length_scale(&ca, 1e6).unwrap();
        assert!((ratio - libm::cbrt(0.5)).abs() < 1e-14);
        assert!(length_scale(&ca, 0.0).is_err());
    }

    #[test]
    fn two_ion_spacing() {
        let ca = SpeciesConstants::calcium40();
        let d = min_spacing(2, 700e3, &ca).unwrap();
        let expected = length_scale(&ca, 700e3).unwrap() * 2.0 * libm::cbrt(0.25);
        assert!((d - expected).abs() < 1e-16);
        assert!((d - 7.1e-6).abs() < 0.05e-6);
        assert!(min_spacing(1, 700e3, &ca).is_err());
    }

    #[test]
    fn max_frequency_errors() {
        let ca = SpeciesConstants::calcium40();
        assert!(max_com_frequency(4, 0.0, &ca).is_err());
        assert!(matches!(max_com_frequency(4, 1.0, &ca), Err(Error::Unreachable(_))));
        assert!(matches!(max_com_frequency(4, 1e-9, &ca), Err(Error::Unreachable(_))));
    }

    #[test]
    fn analytic_mode_spectra() {
        let ca = SpeciesConstants::calcium40();
        let nu = 1e6;
        let two = axial_modes(&ChainGeometry::new(&ca, 2, nu).unwrap()).unwrap();
        assert!((two.frequencies[0] / nu - 1.0).abs() < 1e-12);
        assert!((two.frequencies[1] / nu - libm::sqrt(3.0)).abs() < 1e-12);
        let three = axial_modes(&ChainGeometry::new(&ca, 3, nu).unwrap()).unwrap();
        let expected = [1.0, libm::sqrt(3.0), libm::sqrt(29.0 / 5.0)];
        for (f, e) in three.frequencies.iter().zip(expected) {
            assert!((f / nu - e).abs() < 1e-12);
        }
    }

    #[test]
    fn non_equilibrium_is_rejected() {
        let ca = SpeciesConstants::calcium40();
        let g = ChainGeometry::from_dimensionless(&ca, 1e6, alloc::vec![-1.0, 1.0]).unwrap();
        assert!(matches!(axial_modes(&g), Err(Error::NotConverged(_))));
        assert!(ChainGeometry::from_dimensionless(&ca, 1e6, alloc::vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn mode_lamb_dicke_uses_participation() {
        let ca = SpeciesConstants::calcium40();
        let g = ChainGeometry::new(&ca, 2, 1e6).unwrap();
        let modes = axial_modes(&g).unwrap();
        let com = modes.lamb_dicke(&ca, 729e-9, 0.0, 0, 0).unwrap();
        let single = lamb_dicke_parameter(&ca, 729e-9, 0.0, 1e6).unwrap();
        assert!((com - single / libm::sqrt(2.0)).abs() < 1e-12);
        assert!(modes.lamb_dicke(&ca, 729e-9, 0.0, 2, 0).is_err());
    }
}
