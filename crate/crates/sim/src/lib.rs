//! Configuration, scenarios and file output for the `iontrap-sim` tool.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod scenarios;

use std::fs;
use std::path::Path;
use std::time::Instant;

pub use error::{Result, SimError};
pub use output::RunRecord;
pub use scenarios::Scenario;

use config::{Config, Value};
use params::Params;

/// Runs one scenario and writes its CSV tables plus `manifest.txt` into `out`.
pub fn run(config_path: &Path, scenario: Scenario, out: &Path, seed_override: Option<u64>) -> Result<RunRecord> {
    let start = Instant::now();
    let text = fs::read_to_string(config_path).map_err(|e| SimError::io(config_path, e))?;
    let config = Config::parse(&text)?;
    params::check_known(&config, &Scenario::all_groups())?;
    let mut params = Params::resolve(&config, &scenario.groups())?;
    if let Some(seed) = seed_override {
        params.set_from_command_line("run.seed", Value::Number(seed as f64));
    }
    let seed = params.seed()?;
    let outcome = scenario.execute(&mut params, seed)?;

    fs::create_dir_all(out).map_err(|e| SimError::io(out, e))?;
    let mut outputs = Vec::new();
    for t in &outcome.tables {
        outputs.push(t.write(out)?);
    }
    let report_path = out.join("report.txt");
    fs::write(&report_path, &outcome.report).map_err(|e| SimError::io(&report_path, e))?;
    outputs.push(report_path);

    let mut record = RunRecord {
        scenario: scenario.name().to_string(),
        config_path: config_path.to_path_buf(),
        seed,
        params,
        outputs,
        wall_time: start.elapsed(),
        report: Some(outcome.report),
    };
    record.wall_time = start.elapsed();
    record.write_manifest(out)?;
    Ok(record)
}
