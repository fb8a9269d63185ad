//! Command-line front end: solve scenario files, verify proposed
//! assignments, replay the built-in benchmark tests, and run the
//! exhaustive enumeration oracle.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rebalance_core::baselines::SearchStatus;
use rebalance_core::builtin::known_optimal;
use rebalance_core::experiment::{render_report, ReportFormat};
use rebalance_core::{
    builtin_scenario, oracle_enumerate, parse_assignment, parse_scenario, run_experiment,
    ExperimentPlan, ExperimentReport, Scenario, SearchBudget, StrategyKind,
};

#[derive(Parser)]
#[command(
    name = "rebalance",
    version,
    about = "Multi-resource load balancing: agent-based, exact, and heuristic solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario file with one or more strategies.
    Solve {
        /// Scenario file to solve.
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Check a proposed assignment against a scenario: stability verdict,
    /// per-node remaining resources, and the transformation cost.
    Verify {
        /// Scenario file declaring the system and its initial assignment.
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Assignment file (`assign <task> <node>` lines) to check.
        #[arg(long, value_name = "PATH")]
        assignment: PathBuf,
    },
    /// Run one of the built-in benchmark tests (1-7).
    Paper {
        /// Benchmark test number.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        test: u8,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Exhaustively enumerate every assignment of a small scenario and
    /// report the exact optimum (no pruning; guarded by instance size).
    Oracle {
        /// Scenario file to enumerate.
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        /// Output format.
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Strategies to run, comma separated.
    #[arg(
        short = 's',
        long = "strategy",
        visible_alias = "strategies",
        value_delimiter = ',',
        value_parser = StrategyKind::from_str,
        default_values_t = StrategyKind::ALL
    )]
    strategy: Vec<StrategyKind>,
    /// Base seed; stochastic run k uses seed + k.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Derive the seed from the clock instead (prints the chosen seed).
    #[arg(long, conflicts_with = "seed")]
    random_seed: bool,
    /// Runs per stochastic strategy.
    #[arg(long, default_value_t = 5)]
    runs: u32,
    /// Per-run budget in seconds for agent and heuristic strategies.
    #[arg(long, value_name = "SECONDS", default_value_t = 300)]
    timeout: u64,
    /// Budget in seconds for the exact FULLSCAN search.
    #[arg(long, value_name = "SECONDS", default_value_t = 600)]
    fullscan_timeout: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

impl From<OutputFormat> for ReportFormat {
    fn from(format: OutputFormat) -> Self {
        match format {
            OutputFormat::Table => ReportFormat::Table,
            OutputFormat::Json => ReportFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { scenario, opts } => {
            let scenario = load_scenario(&scenario)?;
            solve_and_render(scenario, None, &opts)
        }
        Command::Paper { test, opts } => {
            let scenario = builtin_scenario(test).expect("clap validated the range");
            solve_and_render(scenario, known_optimal(test), &opts)
        }
        Command::Verify {
            scenario,
            assignment,
        } => verify(&scenario, &assignment),
        Command::Oracle { scenario, format } => oracle(&scenario, format),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("parsing {}", path.display()))
}

fn solve_and_render(scenario: Scenario, optimum: Option<u64>, opts: &RunOpts) -> Result<ExitCode> {
    let mut plan = ExperimentPlan::new(scenario);
    plan.strategies = opts.strategy.clone();
    plan.runs_per_stochastic = opts.runs;
    plan.base_seed = if opts.random_seed {
        let seed = clock_seed();
        eprintln!("random seed: {seed}");
        seed
    } else {
        opts.seed
    };
    plan.known_optimal = optimum;
    plan.agent_config.timeout = Duration::from_secs(opts.timeout);
    plan.heuristic_budget = SearchBudget::with_timeout(Duration::from_secs(opts.timeout));
    plan.fullscan_budget = SearchBudget::with_timeout(Duration::from_secs(opts.fullscan_timeout));

    let report = run_experiment(&plan)?;
    print!("{}", render_report(&report, opts.format.into()));
    Ok(solution_exit_code(&report))
}

fn solution_exit_code(report: &ExperimentReport) -> ExitCode {
    if report.any_solution() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn verify(scenario_path: &Path, assignment_path: &Path) -> Result<ExitCode> {
    let scenario = load_scenario(scenario_path)?;
    let text = std::fs::read_to_string(assignment_path)
        .with_context(|| format!("reading {}", assignment_path.display()))?;
    let proposed = parse_assignment(&text, &scenario.space)
        .with_context(|| format!("parsing {}", assignment_path.display()))?;

    let space = &scenario.space;
    let stable = space.is_stable(&proposed);
    let cost = space
        .transformation_cost(&scenario.initial, &proposed)
        .expect("parse_assignment covers every task");

    let mut out = String::new();
    let _ = writeln!(
        out,
        "verdict: {}",
        if stable { "stable" } else { "overloaded" }
    );
    let id_width = space.nodes().iter().map(|n| n.id.len()).max().unwrap_or(0);
    for (idx, node) in space.nodes().iter().enumerate() {
        let remaining = space.remaining_by_index(&proposed, idx);
        let _ = write!(out, "node {:<id_width$} ", node.id);
        for (resource, value) in space.resources().iter().zip(&remaining) {
            let _ = write!(out, " {}={}", resource.name, value);
        }
        if remaining.iter().any(|&f| f < 0) {
            out.push_str("  [overloaded]");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "transformation cost vs initial: {cost}");
    print!("{out}");

    Ok(if stable {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn oracle(scenario_path: &Path, format: OutputFormat) -> Result<ExitCode> {
    let scenario = load_scenario(scenario_path)?;
    let result = oracle_enumerate(&scenario)?;
    let space = &scenario.space;

    match format {
        OutputFormat::Table => {
            let status = match result.status {
                SearchStatus::Optimal => "optimal",
                SearchStatus::Infeasible => "infeasible",
                SearchStatus::TimedOut => "timed out",
            };
            println!("status: {status}");
            if let Some(cost) = result.cost {
                println!("cost: {cost}");
            }
            println!("assignments enumerated: {}", result.visited);
            if let Some(best) = &result.best {
                print!("{}", rebalance_core::serialize_assignment(space, best));
            }
        }
        OutputFormat::Json => {
            let assignment = result.best.as_ref().map(|best| {
                space
                    .tasks()
                    .iter()
                    .enumerate()
                    .map(|(t, task)| {
                        serde_json::json!({
                            "task": task.id,
                            "node": space.node(best.node_of(t)).id,
                        })
                    })
                    .collect::<Vec<_>>()
            });
            let doc = serde_json::json!({
                "status": match result.status {
                    SearchStatus::Optimal => "optimal",
                    SearchStatus::Infeasible => "infeasible",
                    SearchStatus::TimedOut => "timed_out",
                },
                "cost": result.cost,
                "visited": result.visited,
                "assignment": assignment,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }

    Ok(match result.status {
        SearchStatus::Optimal => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

/// Clock-derived seed for explicitly non-reproducible runs.
fn clock_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    now.as_nanos() as u64
}
