//! `autoion`: scenario-driven photoelectron spectra and negativity maps.

mod commands;
mod error;
mod output;
mod scenario;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use autoion::Preset;
use clap::{Args, Parser, Subcommand};

use commands::FockNormalization;
use error::CliError;
use scenario::{load_file, preset_file, Overrides, Scenario};

#[derive(Debug, Parser)]
#[command(name = "autoion", version, about = "Long-time photoelectron spectra and atom-atom negativity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Unconditioned, conditional and total spectra plus marginal populations.
    Spectra(Common),
    /// Negativity map over the map grid.
    Negativity(Common),
    /// Invariant and oracle checks; exits with status 3 if any fails.
    Verify(Common),
    /// Spectrum contributed by each pump photon number, one file per N.
    FockComponents {
        #[command(flatten)]
        common: Common,
        /// `weighted` scales each component by |α_N|² so they sum to the total.
        #[arg(long, value_enum, default_value = "weighted")]
        normalization: FockNormalization,
    },
    /// Discretized-continuum run of one subspace against the closed form.
    #[command(hide = true)]
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["scenario", "preset"]))]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Built-in parameter set: a, a-prime, b or c.
    #[arg(long)]
    preset: Option<String>,
    /// Time at which the long-time amplitudes are evaluated.
    #[arg(long)]
    t: Option<f64>,
    /// Spectrum grid `min:max:count`, or `auto`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Negativity map grid `min:max:count`.
    #[arg(long, allow_hyphen_values = true)]
    map_grid: Option<String>,
    /// `coherent:MEAN` or `fock:N`.
    #[arg(long)]
    pump: Option<String>,
    /// `literal` or `trace`.
    #[arg(long)]
    pairing: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces Ω of a reduced parameter set.
    #[arg(long)]
    omega: Option<f64>,
    /// Oracle time step.
    #[arg(long)]
    h: Option<f64>,
    /// Largest photon number a coherent pump may need (raise for large means).
    #[arg(long)]
    cap: Option<usize>,
    /// Probability a coherent pump's truncation may discard.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let file = match (&self.scenario, &self.preset) {
            (Some(path), _) => load_file(path)?,
            (None, Some(name)) => {
                let p: Preset = name.parse().map_err(|msg| CliError::Config { op: "resolve", msg })?;
                preset_file(p)
            }
            (None, None) => unreachable!("clap requires one source"),
        };
        file.resolve(&Overrides {
            t: self.t,
            grid: self.grid.clone(),
            map_grid: self.map_grid.clone(),
            pump: self.pump.clone(),
            pairing: self.pairing.clone(),
            out: self.out.clone(),
            omega: self.omega,
            h: self.h,
            cap: self.cap,
            epsilon: self.epsilon,
        })
    }
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectra(c) => print_paths(&commands::run_spectra(&c.scenario()?)?),
        Command::Negativity(c) => print_paths(&commands::run_negativity(&c.scenario()?)?),
        Command::FockComponents { common, normalization } => {
            print_paths(&commands::run_fock_components(&common.scenario()?, normalization)?)
        }
        Command::Verify(c) => {
            let sc = c.scenario()?;
            let (report, failed) = verify::run_verify(&sc)?;
            let path = output::artifact(&sc.out, &sc.name, "verify.json");
            output::write_json(&path, &report)?;
            for check in report["checks"].as_array().expect("array") {
                let verdict = if check["pass"].as_bool() == Some(true) { "pass" } else { "FAIL" };
                println!("{verdict} {} measured={} tolerance={}", check["name"].as_str().unwrap_or("?"), check["measured"], check["tolerance"]);
            }
            println!("{}", path.display());
            if failed > 0 {
                return Err(CliError::VerifyFailed(failed));
            }
        }
        Command::Oracle { common, n } => {
            let sc = common.scenario()?;
            let report = commands::run_oracle(&sc, n)?;
            let path = output::artifact(&sc.out, &sc.name, &format!("oracle_n{n}.json"));
            output::write_json(&path, &report)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
