//! `vlogic`: associative-table queries, fault diagnosis, spare repair
//! planning, sequencer simulation and design-quality estimates.
//!
//! Exit status: 0 success, 1 domain failure, 2 input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vlogic::assoc::DiagnosisMode;
use vlogic::dq::DesignQualityInput;
use vlogic::lamp::DEFAULT_MAX_STEPS;

#[derive(Parser)]
#[command(name = "vlogic", version, about = "Vector-logic associative analysis toolkit")]
struct Cli {
    /// Emit one JSON document instead of `key: value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Single,
    Multiple,
}

impl From<Mode> for DiagnosisMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Single => DiagnosisMode::Single,
            Mode::Multiple => DiagnosisMode::Multiple,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Feasible rows and best match for a query. A query or table containing
    /// `x` switches to ternary interaction analysis.
    Query { table: PathBuf, query: String },
    /// Candidate faults for a test response (bit i = 1: test i failed).
    Diagnose {
        table: PathBuf,
        response: String,
        #[arg(long, value_enum, default_value = "single")]
        mode: Mode,
    },
    /// Greedy spare allocation for a faulty memory, validated against budgets.
    Repair {
        instance: PathBuf,
        /// Also list every minimum cover found by exhaustive search.
        #[arg(long)]
        oracle: bool,
    },
    /// Run a sequencer program on a data file, or a 4x4 grid from a manifest.
    Sim {
        #[arg(required_unless_present = "grid")]
        program: Option<PathBuf>,
        #[arg(required_unless_present = "grid")]
        data: Option<PathBuf>,
        /// Manifest of 16 `<program> <data>` lines, row-major.
        #[arg(long, conflicts_with_all = ["program", "data"])]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Print registers with a dot between nibbles.
        #[arg(long)]
        dots: bool,
    },
    /// Design-solution quality estimate.
    Quality {
        /// Probability of a faulty component.
        #[arg(long)]
        p: f64,
        /// Number of undetected faults.
        #[arg(long)]
        n: u64,
        /// Testability.
        #[arg(long)]
        k: f64,
        /// Assertion / scan hardware complexity.
        #[arg(long)]
        hs: f64,
        /// Functional logic complexity.
        #[arg(long)]
        ha: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = match cli.command {
        Command::Query { table, query } => commands::query(&argv, &table, &query),
        Command::Diagnose { table, response, mode } => commands::diagnose_cmd(&argv, &table, &response, mode.into()),
        Command::Repair { instance, oracle } => commands::repair(&argv, &instance, oracle),
        Command::Sim {
            grid: Some(manifest),
            max_steps,
            dots,
            ..
        } => commands::sim_grid(&argv, &manifest, max_steps, dots),
        Command::Sim {
            program,
            data,
            max_steps,
            dots,
            ..
        } => commands::sim(
            &argv,
            &program.expect("required without --grid"),
            &data.expect("required without --grid"),
            max_steps,
            dots,
        ),
        Command::Quality { p, n, k, hs, ha } => commands::quality(
            &argv,
            DesignQualityInput {
                fault_probability: p,
                undetected_faults: n,
                testability: k,
                scan_complexity: hs,
                logic_complexity: ha,
            },
        ),
    };
    match result {
        Ok(report) => {
            print!("{}", if cli.json { report.to_json() } else { report.to_text() });
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
