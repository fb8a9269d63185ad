//! Experiment driver and report rendering.
//!
//! An [`ExperimentPlan`] runs a set of strategies against one scenario:
//! stochastic strategies are repeated with consecutive seeds, deterministic
//! ones run once, and the exact search runs under its own budget. Reports
//! render either as a human table mirroring the two-part benchmark layout
//! (initial configuration, then one cost row per strategy) or as JSON.
//! The JSON rendering carries no wall-clock timings, so rerunning the same
//! plan with the same seeds reproduces it byte for byte.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::agents::{run_strategy, StrategyConfig, StrategyStatus, Variant};
use crate::baselines::{balance_solve, fullscan, greedy_solve, SearchBudget, SearchStatus};
use crate::error::ExperimentError;
use crate::model::{Assignment, Scenario};

/// Strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    FullScan,
    Ijiids08,
    Kesamsta07,
    Greedy,
    Balance,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::FullScan,
        StrategyKind::Ijiids08,
        StrategyKind::Kesamsta07,
        StrategyKind::Greedy,
        StrategyKind::Balance,
    ];

    /// Stochastic strategies are repeated per plan; the rest run once.
    pub fn is_stochastic(self) -> bool {
        matches!(self, StrategyKind::Ijiids08 | StrategyKind::Kesamsta07)
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::FullScan => "FULLSCAN",
            StrategyKind::Ijiids08 => "IJIIDS08",
            StrategyKind::Kesamsta07 => "KESAMSTA07",
            StrategyKind::Greedy => "GREEDY",
            StrategyKind::Balance => "BALANCE",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fullscan" => Ok(StrategyKind::FullScan),
            "ijiids08" => Ok(StrategyKind::Ijiids08),
            "kesamsta07" => Ok(StrategyKind::Kesamsta07),
            "greedy" => Ok(StrategyKind::Greedy),
            "balance" => Ok(StrategyKind::Balance),
            other => Err(format!(
                "unknown strategy `{other}` (expected fullscan, ijiids08, kesamsta07, greedy, or balance)"
            )),
        }
    }
}

/// What to run: scenario, strategy list, repetition and seeding policy,
/// plus the two budgets (agent/heuristic runs and the exact search).
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    pub strategies: Vec<StrategyKind>,
    pub runs_per_stochastic: u32,
    pub base_seed: u64,
    pub agent_config: StrategyConfig,
    pub fullscan_budget: SearchBudget,
    pub heuristic_budget: SearchBudget,
    /// Externally known optimum, echoed into the report when present.
    pub known_optimal: Option<u64>,
}

impl ExperimentPlan {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            strategies: StrategyKind::ALL.to_vec(),
            runs_per_stochastic: 5,
            base_seed: 42,
            agent_config: StrategyConfig::default(),
            fullscan_budget: SearchBudget::default(),
            heuristic_budget: SearchBudget::with_timeout(Duration::from_secs(300)),
            known_optimal: None,
        }
    }
}

/// Unified terminal status across exact and heuristic runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Stable,
    NoSolution,
    Optimal,
    Infeasible,
    TimedOut,
}

impl RunStatus {
    /// True when the record carries a stable assignment.
    pub fn found_solution(self) -> bool {
        matches!(self, RunStatus::Stable | RunStatus::Optimal)
    }
}

/// One strategy invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Seed used for stochastic runs; deterministic runs have none.
    pub seed: Option<u64>,
    pub status: RunStatus,
    /// Transformation cost of the solution, when one was found. A timed-out
    /// exact search reports its incumbent cost here without optimality.
    pub cost: Option<u64>,
    pub final_assignment: Option<Assignment>,
    /// Simulation cycles, relocation moves, or search descents.
    pub steps: u64,
    pub migrations: Option<u64>,
    pub elapsed: Duration,
}

/// All runs of one strategy, or the error that kept it from running.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRecord {
    pub kind: StrategyKind,
    pub error: Option<String>,
    pub runs: Vec<RunRecord>,
}

/// Results of an experiment over one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    pub max_cost: u64,
    pub known_optimal: Option<u64>,
    pub strategies: Vec<StrategyRecord>,
    pub total_elapsed: Duration,
}

impl ExperimentReport {
    /// Lowest cost among runs that found a stable assignment.
    pub fn best_cost(&self) -> Option<u64> {
        self.strategies
            .iter()
            .flat_map(|s| &s.runs)
            .filter(|r| r.status.found_solution())
            .filter_map(|r| r.cost)
            .min()
    }

    /// True when at least one run found a stable assignment.
    pub fn any_solution(&self) -> bool {
        self.strategies
            .iter()
            .flat_map(|s| &s.runs)
            .any(|r| r.status.found_solution())
    }
}

/// Executes the plan: strategies in declaration order, stochastic ones with
/// seeds `base_seed + k`. A failing strategy is recorded and never aborts
/// the rest. The input scenario is only ever read.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport, ExperimentError> {
    if plan.runs_per_stochastic == 0 {
        return Err(ExperimentError::ZeroRuns);
    }
    let started = Instant::now();
    let scenario = &plan.scenario;
    let mut strategies = Vec::with_capacity(plan.strategies.len());

    for &kind in &plan.strategies {
        let mut record = StrategyRecord {
            kind,
            error: None,
            runs: Vec::new(),
        };
        match kind {
            StrategyKind::FullScan => {
                let search_started = Instant::now();
                let result = fullscan(scenario, &plan.fullscan_budget);
                let status = match result.status {
                    SearchStatus::Optimal => RunStatus::Optimal,
                    SearchStatus::Infeasible => RunStatus::Infeasible,
                    SearchStatus::TimedOut => RunStatus::TimedOut,
                };
                record.runs.push(RunRecord {
                    seed: None,
                    status,
                    cost: result.cost,
                    final_assignment: result.best,
                    steps: result.visited,
                    migrations: None,
                    elapsed: search_started.elapsed(),
                });
            }
            StrategyKind::Greedy | StrategyKind::Balance => {
                let result = if kind == StrategyKind::Greedy {
                    greedy_solve(scenario, &plan.heuristic_budget)
                } else {
                    balance_solve(scenario, &plan.heuristic_budget)
                };
                record.runs.push(strategy_run_record(None, result));
            }
            StrategyKind::Ijiids08 | StrategyKind::Kesamsta07 => {
                let variant = if kind == StrategyKind::Ijiids08 {
                    Variant::Ijiids08
                } else {
                    Variant::Kesamsta07
                };
                for k in 0..u64::from(plan.runs_per_stochastic) {
                    let seed = plan.base_seed.wrapping_add(k);
                    let config = plan.agent_config.clone().with_seed(seed);
                    match run_strategy(scenario, &config, variant) {
                        Ok(result) => record.runs.push(strategy_run_record(Some(seed), result)),
                        Err(err) => {
                            record.error = Some(err.to_string());
                            break;
                        }
                    }
                }
            }
        }
        strategies.push(record);
    }

    Ok(ExperimentReport {
        scenario: scenario.clone(),
        max_cost: scenario.space.max_transformation_cost(),
        known_optimal: plan.known_optimal,
        strategies,
        total_elapsed: started.elapsed(),
    })
}

fn strategy_run_record(seed: Option<u64>, result: crate::agents::StrategyResult) -> RunRecord {
    let solved = result.status == StrategyStatus::Stable;
    RunRecord {
        seed,
        status: match result.status {
            StrategyStatus::Stable => RunStatus::Stable,
            StrategyStatus::NoSolution => RunStatus::NoSolution,
        },
        cost: solved.then_some(result.cost),
        final_assignment: solved.then_some(result.final_assignment),
        steps: result.cycles_run,
        migrations: Some(result.migrations.len() as u64),
        elapsed: result.elapsed,
    }
}

/// Output flavour for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

/// Renders a report. The table mirrors the benchmark layout; JSON is
/// machine-stable with fixed key order and no timing fields.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(report),
        ReportFormat::Json => {
            let doc = ReportDoc::from_report(report);
            let mut text =
                serde_json::to_string_pretty(&doc).expect("report serialization is total");
            text.push('\n');
            text
        }
    }
}

fn render_table(report: &ExperimentReport) -> String {
    use std::fmt::Write as _;

    let space = &report.scenario.space;
    let mut out = String::new();
    out.push_str("Initial configuration\n");
    let id_width = space
        .nodes()
        .iter()
        .map(|n| n.id.len())
        .chain(["Node name".len()])
        .max()
        .unwrap_or(0);
    let _ = writeln!(out, "  {:<id_width$}  Tasks", "Node name");
    for (idx, node) in space.nodes().iter().enumerate() {
        let hosted: Vec<&str> = report
            .scenario
            .initial
            .tasks_on(idx)
            .map(|t| space.task(t).id.as_str())
            .collect();
        let _ = writeln!(out, "  {:<id_width$}  {}", node.id, hosted.join(", "));
    }

    out.push_str("\nExperiment results\n");
    let label_width = "Highest possible migration cost (all tasks migrated)".len();
    let _ = writeln!(
        out,
        "  {:<label_width$}  System transformation cost",
        "Strategy name"
    );
    let _ = writeln!(
        out,
        "  {:<label_width$}  {}",
        "Highest possible migration cost (all tasks migrated)", report.max_cost
    );
    if let Some(optimal) = report.known_optimal {
        let _ = writeln!(out, "  {:<label_width$}  {}", "Known optimal cost", optimal);
    }
    for strategy in &report.strategies {
        let label = match strategy.kind {
            StrategyKind::FullScan => "FULLSCAN strategy (optimal cost)".to_string(),
            other => format!("{other} strategy"),
        };
        let cell = match &strategy.error {
            Some(error) => format!("(error: {error})"),
            None => strategy
                .runs
                .iter()
                .map(run_cell)
                .collect::<Vec<_>>()
                .join(", "),
        };
        let _ = writeln!(out, "  {label:<label_width$}  {cell}");
    }
    out
}

fn run_cell(run: &RunRecord) -> String {
    match run.status {
        RunStatus::Stable | RunStatus::Optimal => run
            .cost
            .map(|c| c.to_string())
            .unwrap_or_else(|| "?".to_string()),
        RunStatus::NoSolution => {
            format!("(no solution within {:.0?})", run.elapsed)
        }
        RunStatus::Infeasible => "(infeasible)".to_string(),
        RunStatus::TimedOut => match run.cost {
            Some(c) => format!("(timed out; best found {c}, not proven optimal)"),
            None => "(timed out; no solution found)".to_string(),
        },
    }
}

/// JSON projection of a report. Field order is fixed by declaration and
/// nothing here depends on the wall clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub max_cost: u64,
    pub known_optimal: Option<u64>,
    pub initial: Vec<NodeTasksDoc>,
    pub strategies: Vec<StrategyDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTasksDoc {
    pub node: String,
    pub tasks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyDoc {
    pub strategy: String,
    pub error: Option<String>,
    pub runs: Vec<RunDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDoc {
    pub seed: Option<u64>,
    pub status: RunStatus,
    pub cost: Option<u64>,
    pub steps: u64,
    pub migrations: Option<u64>,
    pub assignment: Option<Vec<AssignmentDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentDoc {
    pub task: String,
    pub node: String,
}

impl ReportDoc {
    pub fn from_report(report: &ExperimentReport) -> Self {
        let space = &report.scenario.space;
        let initial = space
            .nodes()
            .iter()
            .enumerate()
            .map(|(idx, node)| NodeTasksDoc {
                node: node.id.clone(),
                tasks: report
                    .scenario
                    .initial
                    .tasks_on(idx)
                    .map(|t| space.task(t).id.clone())
                    .collect(),
            })
            .collect();
        let strategies = report
            .strategies
            .iter()
            .map(|record| StrategyDoc {
                strategy: record.kind.name().to_string(),
                error: record.error.clone(),
                runs: record
                    .runs
                    .iter()
                    .map(|run| RunDoc {
                        seed: run.seed,
                        status: run.status,
                        cost: run.cost,
                        steps: run.steps,
                        migrations: run.migrations,
                        assignment: run.final_assignment.as_ref().map(|assignment| {
                            space
                                .tasks()
                                .iter()
                                .enumerate()
                                .map(|(t, task)| AssignmentDoc {
                                    task: task.id.clone(),
                                    node: space.node(assignment.node_of(t)).id.clone(),
                                })
                                .collect()
                        }),
                    })
                    .collect(),
            })
            .collect();
        ReportDoc {
            max_cost: report.max_cost,
            known_optimal: report.known_optimal,
            initial,
            strategies,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{builtin_scenario, known_optimal};

    fn quick_plan(test: u8) -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(builtin_scenario(test).unwrap());
        plan.known_optimal = known_optimal(test);
        plan.agent_config.max_cycles = Some(50_000);
        plan
    }

    #[test]
    fn test1_report_fullscan_is_lower_bound() {
        let plan = quick_plan(1);
        let report = run_experiment(&plan).unwrap();
        let fullscan_cost = report.strategies[0].runs[0].cost.unwrap();
        assert_eq!(fullscan_cost, 7);
        for strategy in &report.strategies {
            for run in &strategy.runs {
                if run.status.found_solution() {
                    assert!(run.cost.unwrap() >= 7, "{:?}", strategy.kind);
                    let assignment = run.final_assignment.as_ref().unwrap();
                    assert!(report.scenario.space.is_stable(assignment));
                }
            }
        }
    }

    #[test]
    fn zero_strategy_plan_reports_max_cost() {
        let mut plan = quick_plan(1);
        plan.strategies.clear();
        let report = run_experiment(&plan).unwrap();
        assert_eq!(report.max_cost, 45);
        assert!(report.strategies.is_empty());
        assert!(!report.any_solution());
    }

    #[test]
    fn zero_runs_is_rejected() {
        let mut plan = quick_plan(1);
        plan.runs_per_stochastic = 0;
        assert!(matches!(
            run_experiment(&plan),
            Err(ExperimentError::ZeroRuns)
        ));
    }

    #[test]
    fn repeated_plans_produce_identical_reports() {
        let mut plan = quick_plan(2);
        plan.strategies = vec![StrategyKind::Ijiids08, StrategyKind::Kesamsta07];
        let a = run_experiment(&plan).unwrap();
        let b = run_experiment(&plan).unwrap();
        assert_eq!(ReportDoc::from_report(&a), ReportDoc::from_report(&b));
        assert_eq!(
            render_report(&a, ReportFormat::Json),
            render_report(&b, ReportFormat::Json)
        );
    }

    #[test]
    fn strategy_failure_never_aborts_the_others() {
        let mut plan = quick_plan(1);
        plan.strategies = vec![StrategyKind::Ijiids08, StrategyKind::Greedy];
        plan.agent_config.result_significance = 1.0;
        let report = run_experiment(&plan).unwrap();
        assert!(report.strategies[0].error.is_some());
        assert!(report.strategies[0].runs.is_empty());
        assert!(report.strategies[1].error.is_none());
        assert_eq!(report.strategies[1].runs[0].cost, Some(7));
    }

    #[test]
    fn experiment_does_not_mutate_the_scenario() {
        let plan = quick_plan(1);
        let before = plan.scenario.clone();
        let _ = run_experiment(&plan).unwrap();
        assert_eq!(plan.scenario, before);
    }

    #[test]
    fn table_contains_paper_style_rows() {
        let plan = quick_plan(1);
        let report = run_experiment(&plan).unwrap();
        let table = render_report(&report, ReportFormat::Table);
        assert!(table.contains("Initial configuration"));
        assert!(table.contains("Highest possible migration cost (all tasks migrated)  45"));
        assert!(table.contains("FULLSCAN strategy (optimal cost)"));
        assert!(table.contains("J01, J02, J03, J04, J06, J07"));
    }

    #[test]
    fn empty_report_renders_header_only_table() {
        let mut plan = quick_plan(1);
        plan.strategies.clear();
        let report = run_experiment(&plan).unwrap();
        let table = render_report(&report, ReportFormat::Table);
        assert!(table.contains("Experiment results"));
        assert!(table.contains("45"));
    }

    #[test]
    fn json_round_trips_field_for_field() {
        let plan = quick_plan(1);
        let report = run_experiment(&plan).unwrap();
        let text = render_report(&report, ReportFormat::Json);
        let parsed: ReportDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, ReportDoc::from_report(&report));
    }
}
