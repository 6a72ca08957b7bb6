use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use metaplectic::cli::suite::SuiteConfig;
use metaplectic::cli::{emit, run_experiment, verify_all, Artifact, CliResult, Format, ScenarioFile};

#[derive(Parser)]
#[command(name = "metaplectic", version, about = "Run phase-space experiments and oracle checks")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the oracle verification suite.
    Verify {
        /// Fock cutoff for every check (default 30 single-mode, 15 two-mode).
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn finish(artifact: &Artifact, format: Format, path: Option<PathBuf>) -> CliResult<()> {
    emit(&artifact.render(format), path.as_deref())?;
    artifact.status()
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Run { scenario, output, format } => {
            let file = ScenarioFile::load(&scenario)?;
            let artifact = run_experiment(&file)?;
            let format = format.or(file.output.format).unwrap_or_default();
            finish(&artifact, format, output.or(file.output.path))
        }
        Command::Verify { cutoff, seed, output, format } => {
            let base = cutoff.map_or_else(SuiteConfig::default, SuiteConfig::uniform);
            let artifact = verify_all(&SuiteConfig { seed, ..base })?;
            finish(&artifact, format.unwrap_or_default(), output)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("metaplectic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
