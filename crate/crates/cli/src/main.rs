//! Command-line front end for the backhaul scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use backhaul::experiments::{run_and_emit, seed_report, ScenarioConfig, ScenarioKind, OUTPUT_DIR_ENV};
use backhaul::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "backhaul", version, about = "Wireless backhaul capacity-scaling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV/SVG files.
    Run {
        config: PathBuf,
    },
    /// Check a config file without running it.
    Validate {
        config: PathBuf,
    },
    /// List the scenario kinds.
    ListScenarios,
    /// Print the derived per-stream seeds of a config.
    SeedReport {
        config: PathBuf,
        /// Seeds per stream.
        #[arg(long, default_value_t = 4)]
        count: u64,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parameter { .. } | Error::Domain { .. } | Error::MatrixCap { .. } => EXIT_CONFIG,
        e if e.is_numerical() => EXIT_NUMERICAL,
        Error::Dimension(_) | Error::CoincidentAntennas { .. } => EXIT_NUMERICAL,
        _ => 1,
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, (u8, String)> {
    ScenarioConfig::load(path).map_err(|e| {
        let code = if matches!(e, Error::Io { .. }) { EXIT_CONFIG } else { exit_code(&e) };
        (code, e.to_string())
    })
}

fn run(cmd: Command) -> Result<(), (u8, String)> {
    match cmd {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let (out, files) = run_and_emit(&cfg).map_err(|e| (exit_code(&e), e.to_string()))?;
            for n in &out.notices {
                eprintln!("warning: {n}");
            }
            for f in &files {
                println!("{}", f.display());
            }
            eprintln!("{} finished in {:.1} s", cfg.kind().name(), out.sweep.runtime.as_secs_f64());
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("# {}: ok", cfg.kind().name());
            print!("{}", cfg.to_flat_string().map_err(|e| (exit_code(&e), e.to_string()))?);
        }
        Command::ListScenarios => {
            for k in ScenarioKind::ALL {
                println!("{:<18} {}", k.name(), k.description());
            }
        }
        Command::SeedReport { config, count } => {
            let cfg = load(&config)?;
            let master = cfg.scenario.master_seed;
            println!("# master_seed = {master}; seed = splitmix64 counter over (master, stream, index)");
            println!("stream,index,seed");
            for e in seed_report(master, count) {
                println!("{},{},{}", e.stream, e.index, e.seed);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            if code == EXIT_CONFIG {
                eprintln!("(output_dir can be overridden with {OUTPUT_DIR_ENV})");
            }
            ExitCode::from(code)
        }
    }
}
