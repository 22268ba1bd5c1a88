use std::path::PathBuf;
use std::process::ExitCode;

use ahnls_cli::{execute, CliError, Format, Outcome, RunConfig, Verb};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ahnls", version, about = "Weyl-function brackets for the Zakharov-Shabat problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured verification suites.
    Verify(Common),
    /// Tabulate X(y, Q) over the λ grid on both sheets.
    Scan(Common),
    /// Compare closed-form gradients with finite differences.
    Gradients(Common),
    /// Run the delta-limit convergence study.
    DeltaProbe(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn run(verb: Verb, args: Common) -> Result<Outcome, CliError> {
    let mut config = RunConfig::load(&args.config, args.seed)?;
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    if let Some(format) = args.format {
        config.format = format;
    }
    execute(verb, &config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, args) = match cli.command {
        Command::Verify(a) => (Verb::Verify, a),
        Command::Scan(a) => (Verb::Scan, a),
        Command::Gradients(a) => (Verb::Gradients, a),
        Command::DeltaProbe(a) => (Verb::DeltaProbe, a),
    };
    match run(verb, args) {
        Ok(outcome) => {
            for r in &outcome.reports {
                println!(
                    "{:<22} {:>4}/{:<4} max abs {:.3e}  max rel {:.3e}  {:.2?}",
                    r.suite.name(),
                    r.passes,
                    r.cases,
                    r.max_abs_residual,
                    r.max_rel_residual,
                    r.wall_time
                );
                for row in r.failures().take(20) {
                    eprintln!(
                        "  FAIL {} case {}: residual {:e} > {:e} {}",
                        row.invariant, row.case_id, row.abs_error, row.budget, row.detail
                    );
                }
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
