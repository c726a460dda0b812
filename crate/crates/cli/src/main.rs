//! `noisy-designs`: sweep, tabulate and map the quality of the binary
//! icosahedral 5-design under single-qubit noise.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Output, VerifyOptions};
use config::ExperimentArgs;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "noisy-designs", version, about = "Quality of exact unitary t-designs under noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ε against the noise parameter over a truncated spherical grid.
    Sweep(ExperimentArgs),
    /// ε for t = 1..=5 at a fixed noise parameter.
    Ttable(ExperimentArgs),
    /// Per-state ε over the cube lattice inside the Bloch ball.
    Region(ExperimentArgs),
    /// Self-checks: design orders, channel validity and known identities.
    Verify {
        /// Also certify an ensemble stored in the text format of `ensemble`.
        #[arg(long)]
        ensemble: Option<PathBuf>,
        /// Skip the Haar oracle; certification checks then fail.
        #[arg(long)]
        disable_oracle: bool,
    },
    /// Print a built-in ensemble in its text format.
    Ensemble {
        /// pauli, clifford or icosahedral.
        name: String,
    },
}

fn write_output(out: &Output, path: Option<&PathBuf>) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, &out.csv).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{}", out.csv);
            Ok(())
        }
    }
}

fn run_experiment(
    args: ExperimentArgs,
    default_grid_n: usize,
    run: fn(&config::Experiment) -> Result<Output, noisy_designs::Error>,
) -> ExitCode {
    let exp = match args.resolve(default_grid_n) {
        Ok(exp) => exp,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let out = match run(&exp) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    if let Err(e) = write_output(&out, exp.out.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if out.infeasible {
        eprintln!("warning: some states admit no finite epsilon in {} mode", exp.mode.name());
        return ExitCode::from(EXIT_INFEASIBLE);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => run_experiment(args, 11, commands::sweep),
        Command::Ttable(args) => run_experiment(args, 11, commands::ttable),
        Command::Region(args) => run_experiment(args, 20, commands::region),
        Command::Verify { ensemble, disable_oracle } => {
            let checks = commands::verify(&VerifyOptions {
                ensemble_file: ensemble.as_deref(),
                oracle_enabled: !disable_oracle,
            });
            print!("{}", commands::render_checks(&checks));
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                println!("all {} checks passed", checks.len());
                ExitCode::SUCCESS
            } else {
                println!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join(", "));
                ExitCode::from(EXIT_FAILURE)
            }
        }
        Command::Ensemble { name } => {
            let ens = match name.as_str() {
                "pauli" => noisy_designs::pauli_design(),
                "clifford" => noisy_designs::clifford_design(),
                "icosahedral" => noisy_designs::icosahedral_design(),
                other => {
                    eprintln!("error: unknown ensemble '{other}' (pauli, clifford, icosahedral)");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            print!("{}", ens.to_text());
            ExitCode::SUCCESS
        }
    }
}
