use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chiplink_cli::commands::{assign, ecc_sweep, link_metrics, oracle_check};
use chiplink_cli::config::{Overrides, ScenarioConfig};
use chiplink_cli::Outcome;

/// Exit status for unreadable or invalid inputs.
const EXIT_INPUT: u8 = 2;
/// Exit status when `oracle-check` finds a disagreement.
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "chiplink", version, about = "ECC-aware die-to-die link characterization and link assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Selected code, goodput, ECC energy and densities over a raw-BER grid.
    EccSweep(Common),
    /// ECC-corrected delivered metrics and figure of merit per link.
    LinkMetrics(Common),
    /// Exact and greedy link assignment, case studies, greedy-vs-exact comparison.
    Assign(Common),
    /// Cross-check the engines against the independent oracles.
    OracleCheck(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    All,
    Electrical,
    Optical,
}

#[derive(Args)]
struct Common {
    /// Scenario file (flat TOML); built-in baseline when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Link filter, overriding `filter`.
    #[arg(long, value_enum)]
    filter: Option<FilterArg>,
    /// Solver time budget in seconds, overriding `time_budget_s`.
    #[arg(long = "time-budget")]
    time_budget: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            filter: self.filter.map(|f| {
                match f {
                    FilterArg::All => "all",
                    FilterArg::Electrical => "electrical",
                    FilterArg::Optical => "optical",
                }
                .to_string()
            }),
            time_budget_s: self.time_budget,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&ScenarioConfig) -> anyhow::Result<Outcome>) = match &cli.command {
        Command::EccSweep(c) => (c, ecc_sweep::run),
        Command::LinkMetrics(c) => (c, link_metrics::run),
        Command::Assign(c) => (c, assign::run),
        Command::OracleCheck(c) => (c, oracle_check::run),
    };
    let result = ScenarioConfig::load(common.config.as_deref(), &common.overrides()).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            for l in &outcome.lines {
                println!("{l}");
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.failed {
                ExitCode::from(EXIT_VERIFY)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
