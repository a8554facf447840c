use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unipotent_cli::commands;
use unipotent_cli::config::{ConfigError, Format, Overrides, RunConfig};
use unipotent_cli::Report;

#[derive(Debug, Parser)]
#[command(
    name = "unipotent",
    version,
    about = "Verification harness for regular representations of B(N)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact polynomial identities and the bracket ladder
    VerifySymbolic(Args),
    /// Criteria series and the resulting regime
    Classify(Args),
    /// Pointwise operator identities and Monte Carlo checks
    CheckRepresentation(Args),
    /// All of the above
    Report(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// TOML file; its keys override flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

type Handler = fn(&RunConfig) -> Result<Report, ConfigError>;

fn run(cli: &Cli) -> Result<(RunConfig, Report), ConfigError> {
    let (args, cmd): (&Args, Handler) = match &cli.command {
        Command::VerifySymbolic(a) => (a, commands::verify_symbolic),
        Command::Classify(a) => (a, commands::classify),
        Command::CheckRepresentation(a) => (a, commands::check_representation),
        Command::Report(a) => (a, commands::report),
    };
    let cfg = RunConfig::resolve(&args.overrides, args.config.as_deref())?;
    let report = cmd(&cfg)?;
    Ok((cfg, report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((cfg, report)) => {
            let text = match cfg.format {
                Format::Text => report.to_text(),
                Format::Structured => report.to_json(),
            };
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    print!(
                        "{}",
                        report
                            .to_text()
                            .lines()
                            .last()
                            .map(|l| format!("{l}\n"))
                            .unwrap_or_default()
                    );
                }
                None => print!("{text}"),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
