use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bermudan_snell::config::ExperimentConfig;
use bermudan_snell::runner::{exit_code, export_tables, run, Command, Overrides, TableFormat};

#[derive(Parser)]
#[command(
    name = "bermudan",
    version,
    about = "Bermudan optimal stopping under non-linear evaluations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    args: Args,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Backward induction, hitting times and DPP residual.
    Solve,
    /// Brute-force value by enumeration, compared with backward induction.
    Oracle,
    /// Run the configured checks.
    Verify,
    /// Property-test the configured operators.
    Axioms,
    /// Random corpus sweep with pass counts per operator.
    Sweep,
}

#[derive(clap::Args)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    cap: Option<u128>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also export the value, hitting-time and residual tables into this directory.
    #[arg(long, global = true)]
    tables: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Oracle => Command::Oracle,
        Cmd::Verify => Command::Verify,
        Cmd::Axioms => Command::Axioms,
        Cmd::Sweep => Command::Sweep,
    };
    let Some(path) = cli.args.config.as_ref() else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    let result = ExperimentConfig::load(path).and_then(|mut cfg| {
        Overrides {
            seed: cli.args.seed,
            tol: cli.args.tol,
            cap: cli.args.cap,
        }
        .apply(&mut cfg);
        run(&cfg, command)
    });
    let code = exit_code(&result);
    match &result {
        Ok(report) => {
            let text = report.to_json();
            if let Some(out) = &cli.args.out {
                if let Err(e) = std::fs::write(out, text + "\n") {
                    eprintln!("error: {}: {e}", out.display());
                    return ExitCode::from(2);
                }
            } else {
                println!("{text}");
            }
            if let Some(dir) = &cli.args.tables {
                let format = match cli.args.format {
                    Format::Csv => TableFormat::Csv,
                    Format::Json => TableFormat::Json,
                };
                if let Err(e) = export_tables(report, dir, format) {
                    eprintln!("error: {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
