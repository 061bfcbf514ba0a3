//! `qswarm` — command-line front end for the library: density/mission/surface
//! exports, evolution-operator recovery between snapshots, and the embedded
//! reference-value check. Exit codes: 0 success, 1 validation failure,
//! 2 I/O failure, 3 reference-ledger mismatch.

use clap::{Parser, Subcommand, ValueEnum};
use qswarm::cli::{
    cmd_density, cmd_evolve, cmd_mission, cmd_paper_check, cmd_surface, OutputFormat,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qswarm",
    version,
    about = "Density-matrix modeling of robotic swarms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Swarm density matrix, purity, barycenter probabilities, and reduced
    /// position matrices for a scenario
    Density {
        /// Scenario JSON file
        scenario: PathBuf,
        /// Write output here instead of stdout (csv: base path, one matrix
        /// per file)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Recover the evolution operator between two scenario snapshots
    /// (composition and least-squares variants, with residuals)
    Evolve {
        /// Scenario JSON for the earlier snapshot
        scenario0: PathBuf,
        /// Scenario JSON for the later snapshot
        scenario1: PathBuf,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario's target-reaching mission and emit the per-iteration
    /// trace as JSON lines
    Mission {
        /// Scenario JSON file (must contain a mission block)
        scenario: PathBuf,
        /// Write the trace here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a one-line outcome summary (iterations, final distance)
        #[arg(long)]
        summary: bool,
        /// Override the scenario's sensor seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export position-probability surfaces as CSV for plotting
    Surface {
        /// Scenario JSON file
        scenario: PathBuf,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples per axis (≥ 2)
        #[arg(long, default_value_t = 50)]
        resolution: usize,
    },
    /// Recompute the embedded reference-value table; PASS rows reproduce,
    /// DIVERGES rows show both numbers
    #[command(name = "paper-check")]
    PaperCheck {
        /// Exit nonzero if any divergence is present, even expected ones
        #[arg(long = "strict-paper")]
        strict_paper: bool,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Usage errors are validation failures (exit 1); --help/--version are
    // successes (exit 0).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Density {
            scenario,
            out,
            format,
        } => cmd_density(&scenario, out.as_deref(), format.into()),
        Command::Evolve {
            scenario0,
            scenario1,
            out,
        } => cmd_evolve(&scenario0, &scenario1, out.as_deref()),
        Command::Mission {
            scenario,
            out,
            summary,
            seed,
        } => cmd_mission(&scenario, out.as_deref(), summary, seed),
        Command::Surface {
            scenario,
            out,
            resolution,
        } => cmd_surface(&scenario, out.as_deref(), resolution),
        Command::PaperCheck {
            strict_paper,
            json,
            out,
        } => cmd_paper_check(strict_paper, json, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
