use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iontrap_sim::compare::compare_dirs;
use iontrap_sim::{run, Scenario, SimError};

#[derive(Parser)]
#[command(name = "iontrap-sim", version, about = "Trapped-ion experiment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write CSV tables and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `run.seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the CSV outputs of two runs; exits 1 when outside tolerance.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Restrict the verdict to these columns (repeatable).
        #[arg(long)]
        column: Vec<String>,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn fail(e: SimError) -> ExitCode {
    eprintln!("iontrap-sim: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<22}{}", s.name(), s.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, scenario, out, seed } => {
            let Some(scenario) = Scenario::from_name(&scenario) else {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                return fail(SimError::Config(format!(
                    "unknown scenario `{scenario}`; expected one of {}",
                    names.join(", ")
                )));
            };
            match run(&config, scenario, &out, seed) {
                Ok(record) => {
                    if let Some(r) = &record.report {
                        print!("{r}");
                    }
                    println!("wrote {} files to {}", record.outputs.len() + 1, out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Compare { a, b, tol, column } => match compare_dirs(&a, &b, tol, &column) {
            Ok(c) => {
                print!("{}", c.report());
                if c.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) }
            }
            Err(e) => fail(e),
        },
    }
}
