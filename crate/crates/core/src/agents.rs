//! Agent-based stochastic rebalancing.
//!
//! Each task is represented by an agent living on its assigned node. The
//! simulation advances in synchronous cycles: every node that is overloaded
//! at the start of a cycle asks its agents how willing they are to leave,
//! picks one candidate by exponentially weighted roulette, and the candidate
//! picks a target node the same way, migrating immediately. Remaining
//! resource statistics are refreshed after every migration within a cycle,
//! and overloaded nodes are processed in ascending index order so a run is
//! fully determined by its seed.
//!
//! Two variants share the pipeline. [`Variant::Ijiids08`] scores agents on
//! how much of the node's overload they would relieve, discounted by their
//! migration cost, with a bonus for agents that already migrated once (they
//! are eager to move again, usually back home, where their points are
//! multiplied by the migration cost). [`Variant::Kesamsta07`] scores agents
//! on raw requirement levels over the overloaded resources only and has no
//! cost awareness and no home-node bias.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::StrategyError;
use crate::model::{Assignment, NodeIdx, ProblemSpace, Scenario, TaskIdx, TaskSpec};
use crate::selection::select_weighted;

/// Which strategy flavour drives agent scoring and target weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    Ijiids08,
    Kesamsta07,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Ijiids08 => f.write_str("IJIIDS08"),
            Variant::Kesamsta07 => f.write_str("KESAMSTA07"),
        }
    }
}

/// Tunables for a strategy run.
#[derive(Debug, Clone)]
pub struct StrategyConfig {
    /// Base of the exponential score transform; must be > 1. Values too
    /// high starve low scorers, values near 1 make every draw uniform.
    pub result_significance: f64,
    /// Weight of the overload-relief term in agent willingness.
    pub overload_weight: f64,
    /// Weight of the migration-cost reluctance term.
    pub cost_weight: f64,
    /// Flat willingness bonus for agents that have migrated before.
    pub return_bonus: f64,
    /// Wall-clock budget before the run gives up with `NoSolution`.
    pub timeout: Duration,
    /// Cycle budget; `None` leaves only the timeout. The default caps the
    /// migration log on infeasible instances.
    pub max_cycles: Option<u64>,
    /// Seed for the run's random stream.
    pub seed: u64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            result_significance: 1.02,
            overload_weight: 1.0,
            cost_weight: 1.0,
            return_bonus: 10.0,
            timeout: Duration::from_secs(300),
            max_cycles: Some(1_000_000),
            seed: 42,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<(), StrategyError> {
        if self.result_significance <= 1.0 || self.result_significance.is_nan() {
            return Err(StrategyError::InvalidSignificance(self.result_significance));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Per-task simulation state.
///
/// `home_node` is the node under the initial assignment and never changes;
/// `migrated_before` flips to true on the agent's first migration of the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentState {
    pub task: TaskIdx,
    pub current_node: NodeIdx,
    pub home_node: NodeIdx,
    pub migrated_before: bool,
}

/// One migration in the audit trail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MigrationEvent {
    pub cycle: u64,
    pub task: TaskIdx,
    pub from_node: NodeIdx,
    pub to_node: NodeIdx,
}

/// Terminal state of a strategy run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StrategyStatus {
    /// A stable assignment was reached.
    Stable,
    /// Budget exhausted (or no migration target exists) before stability.
    NoSolution,
}

/// Outcome of a run: final assignment, its transformation cost, and the
/// complete migration log. Replaying the log from the initial assignment
/// reproduces `final_assignment` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult {
    pub status: StrategyStatus,
    pub final_assignment: Assignment,
    pub cost: u64,
    pub migrations: Vec<MigrationEvent>,
    pub cycles_run: u64,
    pub elapsed: Duration,
}

/// Willingness of an agent to leave its (overloaded) node: relief it would
/// bring to the overloaded resources, minus its migration cost, plus the
/// return bonus once it has migrated.
pub fn agent_evaluation(
    agent: &AgentState,
    node_remaining: &[i64],
    space: &ProblemSpace,
    config: &StrategyConfig,
) -> f64 {
    let task = space.task(agent.task);
    let relief: i64 = task
        .requirements
        .iter()
        .zip(node_remaining)
        .filter(|&(_, &f)| f < 0)
        .map(|(&r, &f)| i64::from(r).min(-f))
        .sum();
    let bonus = if agent.migrated_before {
        config.return_bonus
    } else {
        0.0
    };
    config.overload_weight * relief as f64 - config.cost_weight * f64::from(task.migration_cost)
        + bonus
}

/// Requirements-only willingness used by [`Variant::Kesamsta07`]: the sum of
/// the agent's requirements over the node's overloaded resources.
pub fn kesamsta07_evaluation(
    agent: &AgentState,
    node_remaining: &[i64],
    space: &ProblemSpace,
) -> f64 {
    space
        .task(agent.task)
        .requirements
        .iter()
        .zip(node_remaining)
        .filter(|&(_, &f)| f < 0)
        .map(|(&r, _)| f64::from(r))
        .sum()
}

/// Picks the migration candidate among the agents of one overloaded node.
///
/// `evaluations` is positional; a `None` entry stands for an agent that did
/// not report an opinion and counts as zero. Returns the index into `agents`.
pub fn select_candidate<R: Rng + ?Sized>(
    agents: &[AgentState],
    evaluations: &[Option<f64>],
    config: &StrategyConfig,
    rng: &mut R,
) -> Result<usize, StrategyError> {
    if agents.is_empty() {
        return Err(StrategyError::NoAgents);
    }
    let scores: Vec<f64> = (0..agents.len())
        .map(|i| evaluations.get(i).copied().flatten().unwrap_or(0.0))
        .collect();
    select_weighted(&scores, config.result_significance, rng)
}

/// Candidate selection for the KESAMSTA07 variant: evaluations are derived
/// from requirement levels alone, then the usual pipeline applies.
pub fn kesamsta07_candidate<R: Rng + ?Sized>(
    agents: &[AgentState],
    node_remaining: &[i64],
    space: &ProblemSpace,
    config: &StrategyConfig,
    rng: &mut R,
) -> Result<usize, StrategyError> {
    let evaluations: Vec<Option<f64>> = agents
        .iter()
        .map(|a| Some(kesamsta07_evaluation(a, node_remaining, space)))
        .collect();
    select_candidate(agents, &evaluations, config, rng)
}

/// Points a candidate agent assigns to one prospective node: the dot product
/// of its requirements with the node's remaining resources, multiplied by
/// the migration cost (floored at 1) when the node is the home node of a
/// previously migrated agent.
///
/// The agent's current node must not be offered as a candidate.
pub fn node_points(
    task: &TaskSpec,
    candidate_node: NodeIdx,
    remaining: &[i64],
    home_node: NodeIdx,
    migrated_before: bool,
) -> f64 {
    let mut points: f64 = task
        .requirements
        .iter()
        .zip(remaining)
        .map(|(&r, &f)| f64::from(r) * f as f64)
        .sum();
    if candidate_node == home_node && migrated_before {
        points *= f64::from(task.migration_cost.max(1));
    }
    points
}

/// Draws the migration target for `agent` among all nodes except its
/// current one. Fails with [`StrategyError::NoTargetNode`] on a single-node
/// system.
pub fn select_target_node<R: Rng + ?Sized>(
    agent: &AgentState,
    space: &ProblemSpace,
    assignment: &Assignment,
    config: &StrategyConfig,
    rng: &mut R,
) -> Result<NodeIdx, StrategyError> {
    let remaining: Vec<Vec<i64>> = (0..space.nodes().len())
        .map(|n| space.remaining_by_index(assignment, n))
        .collect();
    select_target_from_remaining(agent, space, &remaining, Variant::Ijiids08, config, rng)
}

fn select_target_from_remaining<R: Rng + ?Sized>(
    agent: &AgentState,
    space: &ProblemSpace,
    remaining: &[Vec<i64>],
    variant: Variant,
    config: &StrategyConfig,
    rng: &mut R,
) -> Result<NodeIdx, StrategyError> {
    let candidates: Vec<NodeIdx> = (0..space.nodes().len())
        .filter(|&n| n != agent.current_node)
        .collect();
    if candidates.is_empty() {
        return Err(StrategyError::NoTargetNode);
    }
    let task = space.task(agent.task);
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&n| match variant {
            Variant::Ijiids08 => node_points(
                task,
                n,
                &remaining[n],
                agent.home_node,
                agent.migrated_before,
            ),
            // KESAMSTA07 has no home-node favouritism.
            Variant::Kesamsta07 => node_points(task, n, &remaining[n], agent.home_node, false),
        })
        .collect();
    let picked = select_weighted(&scores, config.result_significance, rng)?;
    Ok(candidates[picked])
}

/// Live state of one simulation run.
#[derive(Debug, Clone)]
pub struct SimState<'a> {
    space: &'a ProblemSpace,
    assignment: Assignment,
    agents: Vec<AgentState>,
    remaining: Vec<Vec<i64>>,
}

impl<'a> SimState<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let space = &scenario.space;
        let assignment = scenario.initial.clone();
        let agents = assignment
            .as_slice()
            .iter()
            .enumerate()
            .map(|(task, &node)| AgentState {
                task,
                current_node: node,
                home_node: node,
                migrated_before: false,
            })
            .collect();
        let remaining = (0..space.nodes().len())
            .map(|n| space.remaining_by_index(&assignment, n))
            .collect();
        Self {
            space,
            assignment,
            agents,
            remaining,
        }
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn remaining(&self, node: NodeIdx) -> &[i64] {
        &self.remaining[node]
    }

    pub fn is_stable(&self) -> bool {
        self.remaining
            .iter()
            .all(|node| node.iter().all(|&f| f >= 0))
    }

    fn node_overloaded(&self, node: NodeIdx) -> bool {
        self.remaining[node].iter().any(|&f| f < 0)
    }

    /// Overloaded node indices in ascending order.
    pub fn overloaded_nodes(&self) -> Vec<NodeIdx> {
        (0..self.remaining.len())
            .filter(|&n| self.node_overloaded(n))
            .collect()
    }

    fn migrate(&mut self, task: TaskIdx, to: NodeIdx) {
        let from = self.assignment.node_of(task);
        debug_assert_ne!(from, to);
        for (i, &r) in self.space.task(task).requirements.iter().enumerate() {
            self.remaining[from][i] += i64::from(r);
            self.remaining[to][i] -= i64::from(r);
        }
        self.assignment.reassign(task, to);
        let agent = &mut self.agents[task];
        agent.current_node = to;
        agent.migrated_before = true;
    }
}

/// Runs one synchronous simulation round.
///
/// The set of overloaded nodes is snapshotted at cycle start and processed
/// in ascending index order; each yields exactly one migration. Statistics
/// are refreshed after every migration, so later selections within the
/// cycle observe earlier moves.
pub fn run_cycle<R: Rng + ?Sized>(
    state: &mut SimState<'_>,
    cycle: u64,
    variant: Variant,
    config: &StrategyConfig,
    rng: &mut R,
) -> Result<Vec<MigrationEvent>, StrategyError> {
    let mut events = Vec::new();
    for node in state.overloaded_nodes() {
        // Migrations so far in this cycle only shed load from already
        // processed nodes, so a snapshotted node is still overloaded here.
        debug_assert!(state.node_overloaded(node));
        let local: Vec<AgentState> = state
            .assignment
            .tasks_on(node)
            .map(|t| state.agents[t])
            .collect();
        let evaluations: Vec<Option<f64>> = local
            .iter()
            .map(|agent| {
                Some(match variant {
                    Variant::Ijiids08 => {
                        agent_evaluation(agent, &state.remaining[node], state.space, config)
                    }
                    Variant::Kesamsta07 => {
                        kesamsta07_evaluation(agent, &state.remaining[node], state.space)
                    }
                })
            })
            .collect();
        let candidate = local[select_candidate(&local, &evaluations, config, rng)?];
        let target = select_target_from_remaining(
            &candidate,
            state.space,
            &state.remaining,
            variant,
            config,
            rng,
        )?;
        state.migrate(candidate.task, target);
        events.push(MigrationEvent {
            cycle,
            task: candidate.task,
            from_node: node,
            to_node: target,
        });
    }
    Ok(events)
}

/// Runs the agent strategy to completion: cycles until the system is stable
/// or the budget (timeout or cycle cap) runs out. Deterministic for a fixed
/// `(scenario, config, variant)` including the seed.
pub fn run_strategy(
    scenario: &Scenario,
    config: &StrategyConfig,
    variant: Variant,
) -> Result<StrategyResult, StrategyError> {
    config.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = SimState::new(scenario);
    let mut migrations = Vec::new();
    let mut cycle = 0u64;

    let status = loop {
        if state.is_stable() {
            break StrategyStatus::Stable;
        }
        if config.max_cycles.is_some_and(|cap| cycle >= cap) || start.elapsed() >= config.timeout {
            break StrategyStatus::NoSolution;
        }
        match run_cycle(&mut state, cycle, variant, config, &mut rng) {
            Ok(events) => migrations.extend(events),
            Err(StrategyError::NoTargetNode) => break StrategyStatus::NoSolution,
            Err(other) => return Err(other),
        }
        cycle += 1;
    };

    let cost = scenario
        .space
        .transformation_cost(&scenario.initial, state.assignment())?;
    Ok(StrategyResult {
        status,
        final_assignment: state.assignment,
        cost,
        migrations,
        cycles_run: cycle,
        elapsed: start.elapsed(),
    })
}
