//! Parameter schema: every key a scenario reads, with its default.

use std::collections::BTreeMap;

use crate::config::{parse_value, Config, Value};
use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn req(key: &'static str, help: &'static str) -> Param {
    Param { key, default: None, help }
}

const fn opt(key: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { key, default: Some(default), help }
}

pub const RUN: &[Param] = &[opt("run.seed", "1", "seed for every random draw")];

pub const TRAP: &[Param] = &[req("trap.axial_freq_hz", "axial COM trap frequency")];

pub const CHAIN: &[Param] = &[
    req("chain.n_ions", "number of ions; a list runs each"),
    opt("chain.min_spacing_m", "5e-6", "spacing used for the maximum-frequency search"),
];

pub const LASER: &[Param] = &[
    opt("laser.wavelength_m", "729e-9", "qubit laser wavelength"),
    opt("laser.angle_rad", "0", "angle between the beam and the trap axis"),
    opt("laser.rabi_hz", "250e3", "carrier Rabi frequency Ω₀/2π"),
];

pub const MODE: &[Param] = &[req("mode.freq_hz", "frequency of the driven motional mode")];

pub const DECOHERENCE: &[Param] = &[
    opt(
        "decoherence.contrast_time_s",
        "1.4426950408889634e-3",
        "1/e time of the contrast envelope; 0 disables",
    ),
    opt("decoherence.heating_rate_per_s", "5.2631578947368425", "anomalous heating in phonons/s"),
    opt("decoherence.d_lifetime_s", "1.0", "D5/2 lifetime"),
];

pub const SIDEBAND_SCAN: &[Param] = &[
    opt("sideband_scan.detuning_hz", "-100e3:100e3:201", "laser detuning from each sideband"),
    opt("sideband_scan.pulse_s", "auto", "probe duration; auto = n=0 blue-sideband π-time"),
    opt("sideband_scan.doppler_nbar", "auto", "n̄ after Doppler cooling; auto = Doppler limit"),
    opt("sideband_scan.cooled_ground_population", "0.999", "p₀ after sideband cooling"),
    opt("sideband_scan.decoherence", "off", "apply the contrast envelope: on or off"),
];

pub const RABI_FLOPS: &[Param] = &[
    opt("rabi_flops.time_s", "0:400e-6:401", "pulse durations"),
    opt("rabi_flops.sideband", "blue", "carrier, red or blue"),
    opt("rabi_flops.sideband_order", "1", "sideband order |Δn|"),
    opt("rabi_flops.fock_n", "0, 1", "initial Fock states"),
    opt("rabi_flops.thermal_nbar", "none", "initial thermal states, or none"),
    opt("rabi_flops.fock_prep_scale", "1.0", "Fock |1⟩ preparation pulse length in π-times"),
];

pub const COOLING: &[Param] = &[
    opt("cooling.initial_nbar", "2", "thermal n̄ before sideband cooling"),
    opt("cooling.rabi_hz", "150e3", "cooling-laser carrier Rabi frequency"),
    opt("cooling.gamma_eff_hz", "50e3", "quench-broadened linewidth Γ_eff/2π"),
    opt("cooling.quench_rabi_hz", "none", "quench Rabi frequency; overrides gamma_eff_hz"),
    opt("cooling.detuning_hz", "auto", "laser detuning from the carrier; auto = −mode.freq_hz"),
    opt("cooling.recoil", "0.4", "recoil geometry factor α"),
    opt("cooling.duration_s", "6e-3", "simulated time"),
    opt("cooling.samples", "600", "output samples"),
    opt("cooling.target_ground_population", "0.999", "p₀ whose first crossing is reported"),
];

pub const EIT: &[Param] = &[
    req("eit.delta_sigma_hz", "σ⁺ dressing-beam blue detuning Δσ/2π"),
    opt("eit.light_shift_hz", "2.5e6", "light shift δ/2π that sets Ωσ"),
    opt("eit.probe_ratio", "1e-3", "Ωπ/Ωσ"),
    opt("eit.b_field_gauss", "4", "magnetic field"),
    opt("eit.manifold", "four", "three or four levels"),
    opt("eit.ground_dephasing_per_s", "0", "dephasing rate of the S+ projector"),
];

pub const EIT_SPECTRUM: &[Param] = &[opt(
    "eit_spectrum.two_photon_detuning_hz",
    "-10e6:10e6:2001",
    "probe detuning relative to Δσ",
)];

pub const EIT_COOLING: &[Param] = &[
    opt("eit_cooling.mode_freq_hz", "1.61e6, 3.34e6", "cooled modes"),
    opt("eit_cooling.recoil", "0.4", "recoil geometry factor α"),
];

pub const DETECTION: &[Param] = &[
    req("detection.window_s", "photon-counting window"),
    opt("detection.collection_fraction", "1e-2", "solid-angle collection"),
    opt("detection.quantum_efficiency", "0.10", "detector quantum efficiency"),
    opt("detection.bright_scattering_per_s", "3e7", "photons scattered by a bright ion"),
    opt("detection.background_per_s", "1e3", "background counts"),
    opt("detection.d_lifetime_s", "1.0", "D5/2 lifetime during readout"),
    opt("detection.threshold", "auto", "counts ≥ threshold read bright; auto = optimal"),
    opt("detection.shots", "100000", "Monte Carlo shots per state"),
];

pub const ADDRESSING: &[Param] = &[
    opt("beam.width_1e_m", "3.7e-6", "1/e half-width of the Rabi profile"),
    opt("beam.pulse_area_rad", "3.141592653589793", "pulse area on the addressed ion"),
    opt("addressing.curve_distance_m", "0:15e-6:151", "distances for the crosstalk curve"),
    opt("addressing.reference_distance_m", "5e-6", "distance of the quoted crosstalk figure"),
    opt("addressing.reference_crosstalk", "0.01", "quoted crosstalk at the reference distance"),
    opt("deflector.displacement_m_per_v", "23e-9", "beam displacement per volt"),
    opt("deflector.angle_rad_per_v", "5e-6", "deflection angle per volt"),
    opt("deflector.max_voltage_v", "3000", "voltage limit"),
];

pub const TIMESCALES: &[Param] = &[
    opt("timescales.sideband_pi_s", "20e-6", "sideband π-pulse"),
    opt("timescales.cnot_budget_s", "200e-6", "time allowed for one CNOT"),
    opt("timescales.laser_coherence_s", "15e-3", "laser coherence time"),
    opt("timescales.laser_linewidth_hz", "76", "Lorentzian linewidth for the Ramsey model"),
];

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Config,
    Default,
    CommandLine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub value: Value,
    pub source: Source,
}

/// Parameters of one scenario with defaults filled in.
#[derive(Debug, Clone, Default)]
pub struct Params {
    values: BTreeMap<&'static str, Resolved>,
    /// Derived values (such as `auto` resolutions) recorded for the manifest.
    notes: BTreeMap<String, String>,
}

/// Rejects keys that no scenario reads.
pub fn check_known(config: &Config, all: &[&[Param]]) -> Result<()> {
    for (key, entry) in &config.entries {
        if !all.iter().any(|g| g.iter().any(|p| p.key == key)) {
            return Err(SimError::Config(format!("line {}: unknown key `{key}`", entry.line)));
        }
    }
    Ok(())
}

impl Params {
    pub fn resolve(config: &Config, groups: &[&[Param]]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for p in groups.iter().flat_map(|g| g.iter()) {
            let resolved = match (config.get(p.key), p.default) {
                (Some(e), _) => Resolved { value: e.value.clone(), source: Source::Config },
                (None, Some(d)) => Resolved {
                    value: parse_value(d, 0).expect("schema defaults parse"),
                    source: Source::Default,
                },
                (None, None) => {
                    return Err(SimError::Config(format!(
                        "missing required key `{}` ({})",
                        p.key, p.help
                    )))
                }
            };
            values.insert(p.key, resolved);
        }
        Ok(Self { values, notes: BTreeMap::new() })
    }

    pub fn set_from_command_line(&mut self, key: &'static str, value: Value) {
        self.values.insert(key, Resolved { value, source: Source::CommandLine });
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Resolved)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }

    pub fn notes(&self) -> impl Iterator<Item = (&String, &String)> {
        self.notes.iter()
    }

    pub fn note(&mut self, key: impl Into<String>, text: impl Into<String>) {
        self.notes.insert(key.into(), text.into());
    }

    fn value(&self, key: &str) -> &Value {
        &self
            .values
            .get(key)
            .unwrap_or_else(|| panic!("scenario reads undeclared key {key}"))
            .value
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.value(key) {
            Value::Number(x) => Ok(*x),
            other => Err(SimError::Config(format!("`{key}` must be a single number, got `{other}`"))),
        }
    }

    /// A number, or `None` for the word `auto`.
    pub fn f64_or_auto(&self, key: &str) -> Result<Option<f64>> {
        match self.value(key) {
            Value::Word(w) if w == "auto" => Ok(None),
            _ => self.f64(key).map(Some),
        }
    }

    /// A number, or `None` for the word `none`.
    pub fn f64_or_none(&self, key: &str) -> Result<Option<f64>> {
        match self.value(key) {
            Value::Word(w) if w == "none" => Ok(None),
            _ => self.f64(key).map(Some),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.value(key) {
            Value::Number(x) => Ok(vec![*x]),
            Value::List(xs) => Ok(xs.clone()),
            Value::Word(w) if w == "none" => Ok(Vec::new()),
            Value::Word(w) => Err(SimError::Config(format!("`{key}` must be numeric, got `{w}`"))),
        }
    }

    fn to_count(key: &str, x: f64) -> Result<usize> {
        if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
            Ok(x as usize)
        } else {
            Err(SimError::Config(format!("`{key}` must be a non-negative integer, got {x}")))
        }
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        Self::to_count(key, self.f64(key)?)
    }

    pub fn count_list(&self, key: &str) -> Result<Vec<usize>> {
        self.list(key)?.into_iter().map(|x| Self::to_count(key, x)).collect()
    }

    pub fn count_or_auto(&self, key: &str) -> Result<Option<usize>> {
        self.f64_or_auto(key)?.map(|x| Self::to_count(key, x)).transpose()
    }

    pub fn word(&self, key: &str, allowed: &[&str]) -> Result<String> {
        match self.value(key) {
            Value::Word(w) if allowed.contains(&w.as_str()) => Ok(w.clone()),
            other => Err(SimError::Config(format!(
                "`{key}` must be one of {}, got `{other}`",
                allowed.join(", ")
            ))),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        let x = self.f64("run.seed")?;
        if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) {
            Ok(x as u64)
        } else {
            Err(SimError::Config(format!("`run.seed` must be a non-negative integer below 2^53, got {x}")))
        }
    }
}
