//! Named experiments. Each turns resolved parameters into CSV tables and a
//! short text report.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;

use iontrap_core::apparatus::{
    addressability_report, crosstalk_probability, detection_error, optimal_threshold,
    poisson_pmf, sample_counts, threshold_scan_limit, BeamProfile, Deflector, DetectionConfig,
    DetectionErrors,
};
use iontrap_core::chain::{axial_modes, max_com_frequency, ChainGeometry};
use iontrap_core::cooling::{
    doppler_limit, eit_cooling_steady_state, quench_linewidth, sideband_cooling_rates,
    sideband_cooling_simulate, SidebandCoolingParams,
};
use iontrap_core::dynamics::{
    excitation_probability, fit_flop_frequency, prepare_fock_one, rabi_frequency,
    ramsey_decay_time, sideband_ratio_to_nbar, simulate_flops, DecoherenceModel, Pulse,
    Qubit, QubitMotionState, Sideband,
};
use iontrap_core::fock::{default_n_max, thermal_distribution};
use iontrap_core::liouville::{
    ac_stark_shift, dressing_rabi_for_shift, probe_spectrum, EitDressing, Manifold,
};
use iontrap_core::species::lamb_dicke_parameter;
use iontrap_core::apparatus::dark_pmf;
use iontrap_core::{FockDistribution, RandomSeed, SpeciesConstants, TAU};

use crate::error::{Result, SimError};
use crate::output::{Cell, Table};
use crate::params::{self, Param, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    ChainGeometry,
    SidebandScan,
    RabiFlops,
    CoolingSim,
    EitSpectrum,
    EitCooling,
    DetectionHistogram,
    Addressability,
    Timescales,
}

/// Tables and a text summary produced by one scenario.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub report: String,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::ChainGeometry,
        Scenario::SidebandScan,
        Scenario::RabiFlops,
        Scenario::CoolingSim,
        Scenario::EitSpectrum,
        Scenario::EitCooling,
        Scenario::DetectionHistogram,
        Scenario::Addressability,
        Scenario::Timescales,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ChainGeometry => "chain-geometry",
            Scenario::SidebandScan => "sideband-scan",
            Scenario::RabiFlops => "rabi-flops",
            Scenario::CoolingSim => "cooling-sim",
            Scenario::EitSpectrum => "eit-spectrum",
            Scenario::EitCooling => "eit-cooling",
            Scenario::DetectionHistogram => "detection-histogram",
            Scenario::Addressability => "addressability",
            Scenario::Timescales => "timescales",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::ChainGeometry => "equilibrium positions, spacings and axial modes of ion strings",
            Scenario::SidebandScan => "red/blue sideband spectra of Doppler- and sideband-cooled states",
            Scenario::RabiFlops => "sideband Rabi oscillations, fitted frequencies, Fock |1> preparation",
            Scenario::CoolingSim => "resolved-sideband cooling of one mode with anomalous heating",
            Scenario::EitSpectrum => "probe absorption of the dressed S-P manifold (Fano profile)",
            Scenario::EitCooling => "EIT cooling limits of one or more modes",
            Scenario::DetectionHistogram => "photon-count histograms and state-detection errors",
            Scenario::Addressability => "neighbour spacing, resolvability and addressing crosstalk",
            Scenario::Timescales => "ordered table of the characteristic experimental timescales",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn groups(self) -> Vec<&'static [Param]> {
        use params::*;
        let mut g: Vec<&'static [Param]> = vec![RUN];
        g.extend_from_slice(match self {
            Scenario::ChainGeometry => &[TRAP, CHAIN, LASER][..],
            Scenario::SidebandScan => &[MODE, LASER, DECOHERENCE, SIDEBAND_SCAN][..],
            Scenario::RabiFlops => &[MODE, LASER, DECOHERENCE, RABI_FLOPS][..],
            Scenario::CoolingSim => &[MODE, LASER, DECOHERENCE, COOLING][..],
            Scenario::EitSpectrum => &[EIT, EIT_SPECTRUM][..],
            Scenario::EitCooling => &[EIT, EIT_COOLING][..],
            Scenario::DetectionHistogram => &[DETECTION][..],
            Scenario::Addressability => &[TRAP, CHAIN, ADDRESSING][..],
            Scenario::Timescales => &[TRAP, DECOHERENCE, TIMESCALES][..],
        });
        g
    }

    /// Every key any scenario reads.
    pub fn all_groups() -> Vec<&'static [Param]> {
        let mut all: Vec<&'static [Param]> = Vec::new();
        for s in Self::ALL {
            for g in s.groups() {
                if !all.iter().any(|a| std::ptr::eq(*a, g)) {
                    all.push(g);
                }
            }
        }
        all
    }

    pub fn execute(self, p: &mut Params, seed: u64) -> Result<Outcome> {
        match self {
            Scenario::ChainGeometry => chain_geometry(p),
            Scenario::SidebandScan => sideband_scan(p),
            Scenario::RabiFlops => rabi_flops(p),
            Scenario::CoolingSim => cooling_sim(p),
            Scenario::EitSpectrum => eit_spectrum(p),
            Scenario::EitCooling => eit_cooling(p),
            Scenario::DetectionHistogram => detection_histogram(p, seed),
            Scenario::Addressability => addressability(p),
            Scenario::Timescales => timescales(p),
        }
    }
}

fn species() -> SpeciesConstants {
    SpeciesConstants::calcium40()
}

fn hz(x: f64) -> String {
    if x.abs() >= 1e6 {
        format!("{:.4} MHz", x / 1e6)
    } else if x.abs() >= 1e3 {
        format!("{:.4} kHz", x / 1e3)
    } else {
        format!("{x:.4} Hz")
    }
}

fn seconds(t: f64) -> String {
    if t >= 1.0 {
        format!("{t:.3} s")
    } else if t >= 1e-3 {
        format!("{:.3} ms", t * 1e3)
    } else {
        format!("{:.3} µs", t * 1e6)
    }
}

fn chain_geometry(p: &mut Params) -> Result<Outcome> {
    let ca = species();
    let freq = p.f64("trap.axial_freq_hz")?;
    let d_min = p.f64("chain.min_spacing_m")?;
    let lambda = p.f64("laser.wavelength_m")?;
    let angle = p.f64("laser.angle_rad")?;

    let mut positions = Table::new("positions", &["n_ions", "ion", "position_m", "dimensionless_position"]);
    let mut modes = Table::new(
        "modes",
        &["n_ions", "mode", "frequency_hz", "frequency_ratio", "ion", "participation", "lamb_dicke"],
    );
    let mut summary = Table::new(
        "summary",
        &["n_ions", "com_frequency_hz", "length_scale_m", "min_spacing_m", "max_com_frequency_hz"],
    );
    let mut report = String::new();
    for n in p.count_list("chain.n_ions")? {
        let geo = ChainGeometry::new(&ca, n, freq)?;
        let spectrum = axial_modes(&geo)?;
        for (i, (x, u)) in geo.positions.iter().zip(&geo.dimensionless_positions).enumerate() {
            positions.push(vec![n.into(), i.into(), (*x).into(), (*u).into()]);
        }
        for (m, f) in spectrum.frequencies.iter().enumerate() {
            for ion in 0..n {
                modes.push(vec![
                    n.into(),
                    m.into(),
                    (*f).into(),
                    (f / freq).into(),
                    ion.into(),
                    spectrum.participation(ion, m).into(),
                    spectrum.lamb_dicke(&ca, lambda, angle, ion, m)?.into(),
                ]);
            }
        }
        let (min_cell, max_cell, max_f) = if n >= 2 {
            let f_max = max_com_frequency(n, d_min, &ca)?;
            (Cell::from(geo.min_spacing().unwrap_or(f64::NAN)), Cell::from(f_max), Some(f_max))
        } else {
            (Cell::Text(String::new()), Cell::Text(String::new()), None)
        };
        summary.push(vec![n.into(), freq.into(), geo.length_scale.into(), min_cell, max_cell]);
        let _ = write!(report, "N = {n}: ");
        if let (Some(d), Some(f)) = (geo.min_spacing(), max_f) {
            let _ = write!(
                report,
                "min spacing {:.3} µm at {}; spacing {:.2} µm allows up to {}",
                d * 1e6,
                hz(freq),
                d_min * 1e6,
                hz(f)
            );
        } else {
            report.push_str("single ion");
        }
        let freqs: Vec<String> = spectrum.frequencies.iter().map(|f| format!("{:.4}", f / freq)).collect();
        let _ = writeln!(report, "; mode ratios {}", freqs.join(", "));
    }
    Ok(Outcome { tables: vec![positions, modes, summary], report })
}

fn decoherence(p: &Params) -> Result<DecoherenceModel> {
    let model = DecoherenceModel {
        contrast_time: p.f64("decoherence.contrast_time_s")?,
        heating_rate: p.f64("decoherence.heating_rate_per_s")?,
        d_lifetime: p.f64("decoherence.d_lifetime_s")?,
    };
    model.validate()?;
    Ok(model)
}

fn mode_eta(p: &Params, ca: &SpeciesConstants) -> Result<(f64, f64)> {
    let f = p.f64("mode.freq_hz")?;
    let eta = lamb_dicke_parameter(ca, p.f64("laser.wavelength_m")?, p.f64("laser.angle_rad")?, f)?;
    Ok((f, eta))
}

fn sideband_scan(p: &mut Params) -> Result<Outcome> {
    let ca = species();
    let (f, eta) = mode_eta(p, &ca)?;
    let omega0 = TAU * p.f64("laser.rabi_hz")?;
    let deco = match p.word("sideband_scan.decoherence", &["on", "off"])?.as_str() {
        "on" => decoherence(p)?,
        _ => DecoherenceModel::none(),
    };
    let pulse = match p.f64_or_auto("sideband_scan.pulse_s")? {
        Some(t) => t,
        None => {
            let t = PI / rabi_frequency(0, Sideband::Blue(1), eta, omega0)?;
            p.note("sideband_scan.pulse_s", format!("{t:e}"));
            t
        }
    };
    let doppler = match p.f64_or_auto("sideband_scan.doppler_nbar")? {
        Some(n) => n,
        None => {
            let n = doppler_limit(ca.gamma_p, TAU * f)?;
            p.note("sideband_scan.doppler_nbar", format!("{n:e}"));
            n
        }
    };
    let p0 = p.f64("sideband_scan.cooled_ground_population")?;
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(SimError::Config(format!(
            "`sideband_scan.cooled_ground_population` must lie in (0, 1], got {p0}"
        )));
    }
    let cooled = (1.0 - p0) / p0;
    p.note("eta", format!("{eta:e}"));
    p.note("sideband_scan.cooled_nbar", format!("{cooled:e}"));

    let detunings = p.list("sideband_scan.detuning_hz")?;
    let mut scan = Table::new(
        "scan",
        &["state", "nbar", "detuning_hz", "p_excite_red_regime", "p_excite_blue_regime"],
    );
    let mut thermo = Table::new(
        "thermometry",
        &["state", "nbar", "p_red_peak", "p_blue_peak", "ratio", "nbar_recovered", "ground_population_recovered"],
    );
    let mut report = format!("η = {eta:.5}, probe {}\n", seconds(pulse));
    for (label, nbar) in [("doppler", doppler), ("sideband_cooled", cooled)] {
        let state = QubitMotionState::ground(thermal_distribution(nbar, default_n_max(nbar))?);
        let (mut red_peak, mut blue_peak) = (0.0_f64, 0.0_f64);
        for &x in &detunings {
            let red = excitation_probability(&state, Sideband::Red(1), eta, omega0, TAU * x, pulse, &deco)?;
            let blue = excitation_probability(&state, Sideband::Blue(1), eta, omega0, TAU * x, pulse, &deco)?;
            red_peak = red_peak.max(red);
            blue_peak = blue_peak.max(blue);
            scan.push(vec![label.into(), nbar.into(), x.into(), red.into(), blue.into()]);
        }
        let (ratio, recovered, ground) = match sideband_ratio_to_nbar(red_peak, blue_peak) {
            Ok(t) => (t.ratio, t.mean, t.ground_population),
            Err(_) => (red_peak / blue_peak, f64::NAN, f64::NAN),
        };
        thermo.push(vec![
            label.into(),
            nbar.into(),
            red_peak.into(),
            blue_peak.into(),
            ratio.into(),
            recovered.into(),
            ground.into(),
        ]);
        let _ = writeln!(
            report,
            "{label}: n̄ = {nbar:.4}, red/blue peak ratio {ratio:.4e} -> n̄ = {recovered:.4}"
        );
    }
    Ok(Outcome { tables: vec![scan, thermo], report })
}

fn rabi_flops(p: &mut Params) -> Result<Outcome> {
    let ca = species();
    let (_, eta) = mode_eta(p, &ca)?;
    let omega0 = TAU * p.f64("laser.rabi_hz")?;
    let deco = decoherence(p)?;
    let order = p.count("rabi_flops.sideband_order")? as u32;
    let sideband = match p.word("rabi_flops.sideband", &["carrier", "red", "blue"])?.as_str() {
        "carrier" => Sideband::Carrier,
        "red" => Sideband::Red(order),
        _ => Sideband::Blue(order),
    };
    let times = p.list("rabi_flops.time_s")?;

    let mut states: Vec<(String, QubitMotionState, Option<usize>)> = Vec::new();
    for n in p.count_list("rabi_flops.fock_n")? {
        states.push((format!("fock_{n}"), QubitMotionState::ground(FockDistribution::fock(n, n)?), Some(n)));
    }
    for nbar in p.list("rabi_flops.thermal_nbar")? {
        let motion = thermal_distribution(nbar, default_n_max(nbar))?;
        states.push((format!("thermal_{nbar}"), QubitMotionState::ground(motion), None));
    }
    if states.is_empty() {
        return Err(SimError::Config("rabi-flops needs at least one initial state".into()));
    }

    let pulse = Pulse::new(sideband, omega0, 0.0);
    let mut header = vec!["time_s".to_string()];
    header.extend(states.iter().map(|s| format!("p_d_{}", s.0)));
    let mut columns = Vec::new();
    for (_, state, _) in &states {
        columns.push(simulate_flops(state, &pulse, eta, &deco, &times)?);
    }
    let mut flops = Table { name: "flops".into(), header, rows: Vec::new() };
    for (k, t) in times.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(*t).into()];
        row.extend(columns.iter().map(|c| Cell::from(c[k].1)));
        flops.push(row);
    }

    let mut fits = Table::new("fits", &["state", "fitted_rabi_hz", "closed_form_rabi_hz", "ratio_to_first"]);
    let mut report = format!("η = {eta:.5}\n");
    let mut first = None;
    for ((label, _, fock), column) in states.iter().zip(&columns) {
        let values: Vec<f64> = column.iter().map(|x| x.1).collect();
        let fitted = fit_flop_frequency(&times, &values)
            .map(|f| f.frequency / TAU)
            .unwrap_or(f64::NAN);
        let closed = match fock {
            Some(n) => Cell::from(rabi_frequency(*n, sideband, eta, omega0)? / TAU),
            None => Cell::Text(String::new()),
        };
        let base = *first.get_or_insert(fitted);
        fits.push(vec![label.as_str().into(), fitted.into(), closed, (fitted / base).into()]);
        let _ = writeln!(report, "{label}: fitted Rabi frequency {}, ratio {:.6}", hz(fitted), fitted / base);
    }

    let prep = prepare_fock_one(eta, omega0, &deco, p.f64("rabi_flops.fock_prep_scale")?)?;
    let mut fock = Table::new("fock_preparation", &["pi_time_s", "pulse_s", "fidelity", "contrast_time_s"]);
    fock.push(vec![
        prep.pi_time.into(),
        prep.pulse_duration.into(),
        prep.fidelity.into(),
        deco.contrast_time.into(),
    ]);
    let _ = writeln!(
        report,
        "Fock |1> preparation: π-time {}, population {:.4}",
        seconds(prep.pi_time),
        prep.fidelity
    );
    Ok(Outcome { tables: vec![flops, fits, fock], report })
}

fn cooling_sim(p: &mut Params) -> Result<Outcome> {
    let ca = species();
    let (f, eta) = mode_eta(p, &ca)?;
    let nu = TAU * f;
    let gamma_eff = match p.f64_or_none("cooling.quench_rabi_hz")? {
        Some(q) => {
            let g = quench_linewidth(TAU * q, ca.gamma_p32)?;
            p.note("cooling.gamma_eff_hz", format!("{:e}", g / TAU));
            g
        }
        None => TAU * p.f64("cooling.gamma_eff_hz")?,
    };
    let detuning = match p.f64_or_auto("cooling.detuning_hz")? {
        Some(d) => TAU * d,
        None => {
            p.note("cooling.detuning_hz", format!("{:e}", -f));
            -nu
        }
    };
    let params = SidebandCoolingParams {
        eta,
        omega: TAU * p.f64("cooling.rabi_hz")?,
        gamma_eff,
        detuning,
        nu,
        recoil: p.f64("cooling.recoil")?,
    };
    let heating = p.f64("decoherence.heating_rate_per_s")?;
    let initial_mean = p.f64("cooling.initial_nbar")?;
    let initial = thermal_distribution(initial_mean, default_n_max(initial_mean))?;
    let samples = p.count("cooling.samples")?;
    let target = p.f64("cooling.target_ground_population")?;
    let rates = sideband_cooling_rates(&params)?;
    let traj = sideband_cooling_simulate(&params, &initial, heating, p.f64("cooling.duration_s")?, samples)?;
    p.note("eta", format!("{eta:e}"));

    let mut trajectory = Table::new("trajectory", &["time_s", "mean_n", "ground_population"]);
    for k in 0..traj.times.len() {
        trajectory.push(vec![traj.times[k].into(), traj.mean[k].into(), traj.ground_population[k].into()]);
    }
    let reached = traj
        .times
        .iter()
        .zip(&traj.ground_population)
        .find(|(_, p0)| **p0 >= target)
        .map(|(t, _)| *t);
    let analytic = traj.steady_state_mean.unwrap_or(f64::INFINITY);
    let final_mean = *traj.mean.last().unwrap_or(&f64::NAN);
    let final_p0 = *traj.ground_population.last().unwrap_or(&f64::NAN);
    let mut summary = Table::new(
        "summary",
        &[
            "eta",
            "gamma_eff_hz",
            "cool_rate_per_s",
            "heat_rate_per_s",
            "heating_rate_per_s",
            "nbar_ss_analytic",
            "final_nbar",
            "final_ground_population",
            "time_to_target_s",
        ],
    );
    summary.push(vec![
        eta.into(),
        (gamma_eff / TAU).into(),
        rates.cool.into(),
        rates.heat.into(),
        heating.into(),
        analytic.into(),
        final_mean.into(),
        final_p0.into(),
        reached.unwrap_or(f64::NAN).into(),
    ]);
    let mut report = format!(
        "A- = {:.4e}/s, A+ = {:.4e}/s, heating {heating:.4}/s; analytic n̄_ss = {analytic:.4e}\n",
        rates.cool, rates.heat
    );
    let _ = writeln!(report, "final n̄ = {final_mean:.4e}, p0 = {final_p0:.6}");
    match reached {
        Some(t) => {
            let _ = writeln!(report, "p0 ≥ {target} after {}", seconds(t));
        }
        None => {
            let _ = writeln!(report, "p0 never reached {target}");
        }
    }
    Ok(Outcome { tables: vec![trajectory, summary], report })
}

fn dressing(p: &mut Params) -> Result<EitDressing> {
    let delta_sigma = TAU * p.f64("eit.delta_sigma_hz")?;
    let omega_sigma = dressing_rabi_for_shift(delta_sigma, TAU * p.f64("eit.light_shift_hz")?)?;
    let ratio = p.f64("eit.probe_ratio")?;
    let manifold = match p.word("eit.manifold", &["three", "four"])?.as_str() {
        "three" => Manifold::ThreeLevel,
        _ => Manifold::FourLevel,
    };
    let mut d = EitDressing::calcium(delta_sigma, omega_sigma, ratio * omega_sigma).with_manifold(manifold);
    d.b_field = p.f64("eit.b_field_gauss")? * 1e-4;
    d.ground_dephasing = p.f64("eit.ground_dephasing_per_s")?;
    p.note("eit.omega_sigma_hz", format!("{:e}", omega_sigma / TAU));
    p.note("eit.omega_pi_hz", format!("{:e}", d.omega_pi / TAU));
    Ok(d)
}

fn eit_spectrum(p: &mut Params) -> Result<Outcome> {
    let d = dressing(p)?;
    let x = p.list("eit_spectrum.two_photon_detuning_hz")?;
    let probe: Vec<f64> = x.iter().map(|v| d.delta_sigma + TAU * v).collect();
    let s = probe_spectrum(&d, &probe)?;
    let peak = s.peak().map(|q| q.1).unwrap_or(0.0);
    let mut spectrum = Table::new(
        "spectrum",
        &["two_photon_detuning_hz", "probe_detuning_hz", "scattering_rate_per_s", "relative"],
    );
    for (xi, (dp, rate)) in x.iter().zip(&s.points) {
        let rel = if peak > 0.0 { rate / peak } else { 0.0 };
        spectrum.push(vec![(*xi).into(), (dp / TAU).into(), (*rate).into(), rel.into()]);
    }
    let shift = ac_stark_shift(d.delta_sigma, d.omega_sigma)? / TAU;
    let (peak_at, peak_rate) = s.peak().unwrap_or((f64::NAN, f64::NAN));
    let (min_at, min_rate) = s
        .points
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((f64::NAN, f64::NAN));
    let mut summary = Table::new("summary", &["quantity", "value"]);
    let peak_x = (peak_at - d.delta_sigma) / TAU;
    let min_x = (min_at - d.delta_sigma) / TAU;
    for (k, v) in [
        ("light_shift_hz", Cell::from(shift)),
        ("omega_sigma_hz", (d.omega_sigma / TAU).into()),
        ("omega_pi_hz", (d.omega_pi / TAU).into()),
        ("weak_probe", s.weak_probe.into()),
        ("peak_two_photon_detuning_hz", peak_x.into()),
        ("peak_scattering_rate_per_s", peak_rate.into()),
        ("min_two_photon_detuning_hz", min_x.into()),
        ("min_scattering_rate_per_s", min_rate.into()),
    ] {
        summary.push(vec![k.into(), v]);
    }
    let mut report = format!(
        "light shift {}; bright peak at two-photon detuning {}; minimum {:.3e} of peak at {}\n",
        hz(shift),
        hz(peak_x),
        min_rate / peak_rate,
        hz(min_x)
    );
    if !s.weak_probe {
        report.push_str("warning: probe is not weak (Ωπ > Ωσ/10); the profile is saturated\n");
    }
    Ok(Outcome { tables: vec![spectrum, summary], report })
}

fn eit_cooling(p: &mut Params) -> Result<Outcome> {
    let d = dressing(p)?;
    let recoil = p.f64("eit_cooling.recoil")?;
    let mut modes = Table::new(
        "modes",
        &[
            "mode_freq_hz",
            "red_scattering_per_s",
            "blue_scattering_per_s",
            "carrier_scattering_per_s",
            "nbar_ss",
            "ground_population",
            "doppler_limit_nbar",
            "heating_regime",
        ],
    );
    let mut report = format!("light shift {}\n", hz(ac_stark_shift(d.delta_sigma, d.omega_sigma)? / TAU));
    for f in p.list("eit_cooling.mode_freq_hz")? {
        let eit = eit_cooling_steady_state(&d, TAU * f, recoil)?;
        let doppler = doppler_limit(d.gamma_p, TAU * f)?;
        modes.push(vec![
            f.into(),
            eit.red_scattering.into(),
            eit.blue_scattering.into(),
            eit.carrier_scattering.into(),
            eit.mean.into(),
            eit.ground_population().into(),
            doppler.into(),
            eit.heating_regime.into(),
        ]);
        let _ = writeln!(
            report,
            "mode {}: n̄ = {:.4} (p0 = {:.3}), Doppler limit {:.3}",
            hz(f),
            eit.mean,
            eit.ground_population(),
            doppler
        );
    }
    Ok(Outcome { tables: vec![modes], report })
}

fn detection_histogram(p: &mut Params, seed: u64) -> Result<Outcome> {
    let cfg = DetectionConfig {
        collection_fraction: p.f64("detection.collection_fraction")?,
        quantum_efficiency: p.f64("detection.quantum_efficiency")?,
        scattering_rate_bright: p.f64("detection.bright_scattering_per_s")?,
        background_rate: p.f64("detection.background_per_s")?,
        window: p.f64("detection.window_s")?,
        d_lifetime: p.f64("detection.d_lifetime_s")?,
    };
    let best = optimal_threshold(&cfg)?;
    let chosen = match p.count_or_auto("detection.threshold")? {
        Some(t) => detection_error(&cfg, t as u64)?,
        None => {
            p.note("detection.threshold", best.threshold.to_string());
            best
        }
    };
    let shots = p.count("detection.shots")?;
    let bright = sample_counts(&cfg, Qubit::S, shots, RandomSeed(seed))?;
    let dark = sample_counts(&cfg, Qubit::D, shots, RandomSeed(seed.wrapping_add(1)))?;

    let top = bright
        .iter()
        .chain(&dark)
        .copied()
        .max()
        .unwrap_or(0)
        .max(threshold_scan_limit(&cfg));
    let mut bright_hist = vec![0u64; top as usize + 1];
    let mut dark_hist = vec![0u64; top as usize + 1];
    for &c in &bright {
        bright_hist[c as usize] += 1;
    }
    for &c in &dark {
        dark_hist[c as usize] += 1;
    }
    let mut hist = Table::new(
        "histogram",
        &["counts", "p_bright_exact", "p_dark_exact", "n_bright_sampled", "n_dark_sampled"],
    );
    for k in 0..=top {
        hist.push(vec![
            k.into(),
            poisson_pmf(k, cfg.bright_mean()).into(),
            dark_pmf(&cfg, k).into(),
            bright_hist[k as usize].into(),
            dark_hist[k as usize].into(),
        ]);
    }

    let n = shots.max(1) as f64;
    let sampled = DetectionErrors {
        threshold: chosen.threshold,
        bright: bright.iter().filter(|&&c| c < chosen.threshold).count() as f64 / n,
        dark: dark.iter().filter(|&&c| c >= chosen.threshold).count() as f64 / n,
    };
    let mut errors = Table::new(
        "errors",
        &["method", "threshold", "error_bright", "error_dark", "error_total"],
    );
    for (label, e) in [("exact_chosen", chosen), ("exact_optimal", best), ("sampled_chosen", sampled)] {
        errors.push(vec![
            label.into(),
            e.threshold.into(),
            e.bright.into(),
            e.dark.into(),
            e.total().into(),
        ]);
    }
    let report = format!(
        "bright mean {:.2} counts, background {:.2}; threshold {}: exact error {:.3e} (bright {:.3e}, dark {:.3e}); sampled {:.3e} from {shots} shots\n",
        cfg.bright_mean(),
        cfg.background_counts(),
        chosen.threshold,
        chosen.total(),
        chosen.bright,
        chosen.dark,
        sampled.total()
    );
    Ok(Outcome { tables: vec![hist, errors], report })
}

fn addressability(p: &mut Params) -> Result<Outcome> {
    let ca = species();
    let freq = p.f64("trap.axial_freq_hz")?;
    let beam = BeamProfile { width_1e: p.f64("beam.width_1e_m")?, center: 0.0 };
    let area = p.f64("beam.pulse_area_rad")?;
    let deflector = Deflector {
        displacement_per_volt: p.f64("deflector.displacement_m_per_v")?,
        angle_per_volt: p.f64("deflector.angle_rad_per_v")?,
        max_voltage: p.f64("deflector.max_voltage_v")?,
    };
    let mut pairs = Table::new(
        "pairs",
        &["n_ions", "left", "right", "spacing_m", "resolvable", "crosstalk", "deflector_step_v"],
    );
    let mut report = String::new();
    for n in p.count_list("chain.n_ions")? {
        let geo = ChainGeometry::new(&ca, n, freq)?;
        let rows = addressability_report(&geo, &beam)?;
        for r in &rows {
            let crosstalk = crosstalk_probability(&beam, r.spacing, area)?;
            let volts = deflector.voltage_for(r.spacing).unwrap_or(f64::NAN);
            pairs.push(vec![
                n.into(),
                r.left.into(),
                r.right.into(),
                r.spacing.into(),
                r.resolvable.into(),
                crosstalk.into(),
                volts.into(),
            ]);
        }
        if let Some(worst) = rows.iter().max_by(|a, b| a.crosstalk.total_cmp(&b.crosstalk)) {
            let _ = writeln!(
                report,
                "N = {n}: worst pair {}-{} at {:.3} µm, crosstalk {:.4}",
                worst.left,
                worst.right,
                worst.spacing * 1e6,
                crosstalk_probability(&beam, worst.spacing, area)?
            );
        } else {
            let _ = writeln!(report, "N = {n}: no neighbouring pairs");
        }
    }

    let mut curve = Table::new("crosstalk_curve", &["distance_m", "relative_rabi", "crosstalk"]);
    for d in p.list("addressing.curve_distance_m")? {
        curve.push(vec![d.into(), beam.relative_rabi(d).into(), crosstalk_probability(&beam, d, area)?.into()]);
    }

    let d_ref = p.f64("addressing.reference_distance_m")?;
    let model = crosstalk_probability(&beam, d_ref, area)?;
    let quoted = p.f64("addressing.reference_crosstalk")?;
    let mut summary = Table::new("summary", &["quantity", "value"]);
    for (k, v) in [
        ("reference_distance_m", d_ref),
        ("model_crosstalk_at_reference", model),
        ("quoted_crosstalk_at_reference", quoted),
        ("deflector_voltage_for_reference_v", deflector.voltage_for(d_ref).unwrap_or(f64::NAN)),
        ("deflector_focal_length_m", deflector.effective_focal_length()),
    ] {
        summary.push(vec![k.into(), v.into()]);
    }
    let _ = writeln!(
        report,
        "at {:.2} µm the Gaussian model gives {:.4}; quoted figure {:.4}",
        d_ref * 1e6,
        model,
        quoted
    );
    Ok(Outcome { tables: vec![pairs, curve, summary], report })
}

fn timescales(p: &mut Params) -> Result<Outcome> {
    let freq = p.f64("trap.axial_freq_hz")?;
    let deco = decoherence(p)?;
    let linewidth = p.f64("timescales.laser_linewidth_hz")?;
    let ramsey = ramsey_decay_time(linewidth)?;
    p.note("timescales.ramsey_model_decay_s", format!("{ramsey:e}"));
    let entries = [
        ("trap_period", 1.0 / freq, "1 / trap.axial_freq_hz"),
        ("sideband_pi_pulse", p.f64("timescales.sideband_pi_s")?, "timescales.sideband_pi_s"),
        ("cnot_budget", p.f64("timescales.cnot_budget_s")?, "timescales.cnot_budget_s"),
        ("qubit_coherence", deco.contrast_time * LN_2, "50% contrast time of the decoherence envelope"),
        ("laser_coherence", p.f64("timescales.laser_coherence_s")?, "timescales.laser_coherence_s"),
        ("heating_one_phonon", 1.0 / deco.heating_rate, "1 / decoherence.heating_rate_per_s"),
        ("d_lifetime", deco.d_lifetime, "decoherence.d_lifetime_s"),
    ];
    let mut table = Table::new("timescales", &["rank", "name", "time_s", "basis"]);
    let mut report = String::from("characteristic timescales\n");
    for (k, (name, t, basis)) in entries.iter().enumerate() {
        table.push(vec![(k + 1).into(), (*name).into(), (*t).into(), (*basis).into()]);
        let _ = writeln!(report, "  {:>2}  {:<20} {:>12}", k + 1, name, seconds(*t));
    }
    let ordered = entries.windows(2).all(|w| w[1].1 > w[0].1);
    let _ = writeln!(
        report,
        "strictly increasing: {}\nRamsey model 1/e time for a {linewidth} Hz laser: {}",
        if ordered { "yes" } else { "no" },
        seconds(ramsey)
    );
    Ok(Outcome { tables: vec![table], report })
}
