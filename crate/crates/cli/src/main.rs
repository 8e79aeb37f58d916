use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rci_cli::{exit, report, simulate, synth, verify, CliError, ProjectConfig, VerifyTolerances};

/// Robust invariant-set synthesis, verification and quadrotor simulation.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 synthesis
/// infeasible for every λ, 3 verification failed, 4 artifact missing,
/// 5 no metrics in the run directory.
#[derive(Parser)]
#[command(name = "rci", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the set and write rci.json into the output directory.
    Synth { config: PathBuf },
    /// Check an artifact and print a JSON report.
    Verify {
        artifact: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one scenario and write its trajectory CSV and metrics JSON.
    Simulate {
        config: PathBuf,
        scenario: String,
        #[arg(long, value_enum)]
        filter: Option<Switch>,
    },
    /// Tabulate every metrics file in a run directory.
    Report { dir: PathBuf },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth { config } => {
            let cfg = ProjectConfig::load(&config)?;
            let out = synth(&cfg)?;
            println!("wrote {}", out.artifact_path.display());
            println!("lambda* = {:.6e}", out.lambda);
            println!("trace Q = {:.6e}", out.trace_q);
            for s in &out.input_slacks {
                println!("input[{}]  sqrt(k'Qk) = {:.6e}  bound {:.6e}  slack {:.3e}", s.index, s.value, s.bound, s.slack);
            }
            for s in &out.output_slacks {
                println!("output[{}] sqrt(c'Qc) = {:.6e}  bound {:.6e}  slack {:.3e}", s.index, s.value, s.bound, s.slack);
            }
        }
        Command::Verify { artifact, samples, seed } => {
            let rep = verify(&artifact, samples, seed, &VerifyTolerances::default())?;
            print!("{}", rep.to_json());
            rep.into_result()?;
        }
        Command::Simulate {
            config,
            scenario,
            filter,
        } => {
            let cfg = ProjectConfig::load(&config)?;
            let out = simulate(&cfg, &scenario, filter.map(|s| matches!(s, Switch::On)))?;
            eprintln!("wrote {} and {}", out.csv_path.display(), out.metrics_path.display());
            print!("{}", out.record.to_json());
        }
        Command::Report { dir } => {
            let out = report(&dir).with_context(|| format!("reporting on {}", dir.display()))?;
            println!("wrote {} and {} ({} runs)", out.markdown_path.display(), out.csv_path.display(), out.records.len());
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<CliError>())
        .map_or(exit::CONFIG, CliError::exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(err) => {
            if let Some(CliError::Infeasible { diagnostics }) = err.downcast_ref::<CliError>() {
                eprintln!("{:>12} {:>10} {:>12} {:>12} {:>6}", "lambda", "status", "shift", "violation", "steps");
                for d in diagnostics {
                    eprintln!(
                        "{:>12.5e} {:>10} {:>12.4e} {:>12.4e} {:>6}",
                        d.lambda,
                        format!("{:?}", d.status),
                        d.phase1_shift,
                        d.max_block_violation,
                        d.newton_steps
                    );
                }
            }
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
