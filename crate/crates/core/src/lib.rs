//! Multi-resource load balancing with migration costs.
//!
//! A system is a set of nodes with fixed per-resource capacities and a set
//! of tasks with per-resource requirements, each task assigned to one node.
//! The system is *stable* when no node is asked for more of any resource
//! than it has. Starting from an initial assignment, the goal is to reach a
//! stable assignment while paying the least total migration cost — each
//! task has a fixed price for ending up anywhere other than where it
//! started.
//!
//! The crate provides:
//!
//! - the exact integer [`model`](crate::model) (remaining resources,
//!   stability, transformation cost);
//! - an [agent-based stochastic strategy](crate::agents) in two flavours,
//!   driven by exponentially weighted [roulette selection](crate::selection);
//! - [baselines](crate::baselines): an exhaustive branch-and-bound
//!   (`fullscan`), an unpruned enumeration oracle, and deterministic
//!   greedy / balance relocation heuristics;
//! - a [scenario text format](crate::scenario), the
//!   [built-in benchmark scenarios](crate::builtin), and an
//!   [experiment driver](crate::experiment) with table and JSON reports.

pub mod agents;
pub mod baselines;
pub mod builtin;
pub mod error;
pub mod experiment;
pub mod gen;
pub mod model;
pub mod scenario;
pub mod selection;

pub use agents::{
    run_strategy, AgentState, MigrationEvent, StrategyConfig, StrategyResult, StrategyStatus,
    Variant,
};
pub use baselines::{
    balance_solve, fullscan, greedy_solve, oracle_enumerate, OptimalResult, SearchBudget,
    SearchStatus,
};
pub use builtin::{builtin_scenario, known_optimal, InvalidTestNumber};
pub use error::{ExperimentError, ModelError, ParseError, StrategyError};
pub use experiment::{
    render_report, run_experiment, ExperimentPlan, ExperimentReport, ReportDoc, ReportFormat,
    RunRecord, RunStatus, StrategyKind, StrategyRecord,
};
pub use model::{
    Assignment, NodeIdx, NodeSpec, ProblemSpace, ResourceKind, Scenario, TaskIdx, TaskSpec,
};
pub use scenario::{parse_assignment, parse_scenario, serialize_assignment, serialize_scenario};
