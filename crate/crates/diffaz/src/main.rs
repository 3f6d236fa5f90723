use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use diffaz::{run_examples, verify_text, ScenarioError, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "diffaz", version, about = "Verify differential Azumaya algebra scenarios")]
struct Cli {
    /// Seed for randomized property checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output format. Machine reports are JSON without timings.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    report: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario file.
    Verify { file: std::path::PathBuf },
    /// Run the bundled example suites.
    Examples {
        /// Run a single suite.
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify { file } => std::fs::read_to_string(file)
            .map_err(|e| ScenarioError::Io(format!("{}: {e}", file.display())))
            .and_then(|text| verify_text(&text, cli.seed)),
        Command::Examples { only } => run_examples(only.as_deref(), cli.seed),
    };
    match result {
        Ok(report) => {
            match cli.report {
                Format::Text => print!("{}", report.render_text()),
                Format::Machine => print!("{}", report.render_machine()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
