//! Exact and deterministic baseline solvers.
//!
//! [`fullscan`] is a depth-first branch-and-bound over all task placements
//! and is the reference for optimal transformation costs on small setups.
//! [`oracle_enumerate`] is an intentionally unpruned enumerator used to
//! cross-check it. [`greedy_solve`] and [`balance_solve`] are fast
//! deterministic relocation heuristics.

use std::cmp::Reverse;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::agents::{MigrationEvent, StrategyResult, StrategyStatus};
use crate::model::{Assignment, NodeIdx, ProblemSpace, Scenario, TaskIdx};

/// Bounds on an exact or heuristic search.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub timeout: Duration,
    pub node_visit_limit: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(600),
            node_visit_limit: None,
        }
    }
}

impl SearchBudget {
    pub fn with_timeout(timeout: Duration) -> Self {
        Self {
            timeout,
            node_visit_limit: None,
        }
    }
}

/// Terminal state of an exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The search completed; `best` is the global minimum-cost stable
    /// assignment (and is absent only when none exists — see `Infeasible`).
    Optimal,
    /// The search completed and no stable assignment exists.
    Infeasible,
    /// The budget ran out; `best` holds the incumbent found so far, if any.
    TimedOut,
}

/// Result of [`fullscan`] or [`oracle_enumerate`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalResult {
    pub status: SearchStatus,
    pub best: Option<Assignment>,
    pub cost: Option<u64>,
    /// Search tree nodes descended into (fullscan) or assignments
    /// enumerated (oracle).
    pub visited: u64,
}

/// Instance too large for the unpruned enumeration guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("enumeration guard: {nodes} nodes ^ {tasks} tasks exceeds {limit} assignments")]
pub struct InstanceTooLarge {
    pub nodes: usize,
    pub tasks: usize,
    pub limit: u64,
}

const ORACLE_GUARD: u64 = 10_000_000;

struct Dfs {
    /// Tasks in search order: descending migration cost, ties by index.
    order: Vec<TaskIdx>,
    /// Requirements flattened per task for the hot loop.
    requirements: Vec<Vec<i64>>,
    costs: Vec<u64>,
    home: Vec<NodeIdx>,
    remaining: Vec<i64>,
    dim: usize,
    node_count: usize,
    placed: Vec<NodeIdx>,
    incumbent: Option<(Vec<NodeIdx>, u64)>,
    visited: u64,
    visit_limit: u64,
    deadline: Instant,
    out_of_budget: bool,
}

impl Dfs {
    fn search(&mut self, depth: usize, partial_cost: u64) {
        if self.out_of_budget {
            return;
        }
        if depth == self.order.len() {
            // Cost pruning guarantees improvement over any incumbent.
            self.incumbent = Some((self.placed.clone(), partial_cost));
            return;
        }
        let task = self.order[depth];
        let home = self.home[task];
        let nodes = std::iter::once(home).chain((0..self.node_count).filter(move |&n| n != home));
        for node in nodes {
            let step = if node == home { 0 } else { self.costs[task] };
            let cost = partial_cost + step;
            if self
                .incumbent
                .as_ref()
                .is_some_and(|(_, best)| cost >= *best)
            {
                continue;
            }
            if !self.place(task, node) {
                continue;
            }
            self.placed[task] = node;
            self.visited += 1;
            if self.visited & 4095 == 0 && Instant::now() >= self.deadline {
                self.out_of_budget = true;
            }
            if self.visited >= self.visit_limit {
                self.out_of_budget = true;
            }
            self.search(depth + 1, cost);
            self.unplace(task, node);
            if self.out_of_budget {
                return;
            }
        }
    }

    /// Subtracts the task from the node's remainder; backs out and reports
    /// false if any resource would go negative.
    fn place(&mut self, task: TaskIdx, node: NodeIdx) -> bool {
        let base = node * self.dim;
        let reqs = &self.requirements[task];
        for (i, &r) in reqs.iter().enumerate() {
            self.remaining[base + i] -= r;
        }
        if self.remaining[base..base + self.dim].iter().any(|&f| f < 0) {
            for (i, &r) in reqs.iter().enumerate() {
                self.remaining[base + i] += r;
            }
            return false;
        }
        true
    }

    fn unplace(&mut self, task: TaskIdx, node: NodeIdx) {
        let base = node * self.dim;
        for (i, &r) in self.requirements[task].iter().enumerate() {
            self.remaining[base + i] += r;
        }
    }
}

/// Exhaustive search for the minimum-cost stable assignment.
///
/// Depth-first branch-and-bound: tasks are branched in descending
/// migration-cost order with the initial node tried first (the zero-cost
/// branch), so a cheap incumbent is found early; branches are cut as soon
/// as their partial cost cannot beat the incumbent or a partial placement
/// already overloads a node. The wall clock is polled every 4096 descents.
pub fn fullscan(scenario: &Scenario, budget: &SearchBudget) -> OptimalResult {
    let space = &scenario.space;
    let dim = space.resources().len();
    let node_count = space.nodes().len();

    let mut order: Vec<TaskIdx> = (0..space.tasks().len()).collect();
    order.sort_by_key(|&t| Reverse(space.task(t).migration_cost));

    let mut dfs = Dfs {
        order,
        requirements: space
            .tasks()
            .iter()
            .map(|t| t.requirements.iter().map(|&r| i64::from(r)).collect())
            .collect(),
        costs: space
            .tasks()
            .iter()
            .map(|t| u64::from(t.migration_cost))
            .collect(),
        home: scenario.initial.as_slice().to_vec(),
        remaining: space
            .nodes()
            .iter()
            .flat_map(|n| n.capacities.iter().map(|&c| i64::from(c)))
            .collect(),
        dim,
        node_count,
        placed: vec![0; space.tasks().len()],
        incumbent: None,
        visited: 0,
        visit_limit: budget.node_visit_limit.unwrap_or(u64::MAX),
        deadline: Instant::now() + budget.timeout,
        out_of_budget: false,
    };
    dfs.search(0, 0);

    let (best, cost) = match &dfs.incumbent {
        Some((placed, cost)) => (
            Some(
                Assignment::from_node_indices(space, placed.clone())
                    .expect("search placements are in range"),
            ),
            Some(*cost),
        ),
        None => (None, None),
    };
    let status = if dfs.out_of_budget {
        SearchStatus::TimedOut
    } else if best.is_some() {
        SearchStatus::Optimal
    } else {
        SearchStatus::Infeasible
    };
    OptimalResult {
        status,
        best,
        cost,
        visited: dfs.visited,
    }
}

/// Unpruned exhaustive enumeration, kept deliberately independent of
/// [`fullscan`] so the two can validate each other. Every one of the
/// `nodes^tasks` assignments is generated and checked against capacity;
/// the guard refuses instances beyond 10^7 assignments.
pub fn oracle_enumerate(scenario: &Scenario) -> Result<OptimalResult, InstanceTooLarge> {
    let space = &scenario.space;
    let node_count = space.nodes().len();
    let task_count = space.tasks().len();
    let dim = space.resources().len();

    let mut total: u64 = 1;
    for _ in 0..task_count {
        total = total.saturating_mul(node_count as u64);
        if total > ORACLE_GUARD {
            return Err(InstanceTooLarge {
                nodes: node_count,
                tasks: task_count,
                limit: ORACLE_GUARD,
            });
        }
    }

    let capacities: Vec<i64> = space
        .nodes()
        .iter()
        .flat_map(|n| n.capacities.iter().map(|&c| i64::from(c)))
        .collect();
    let requirements: Vec<i64> = space
        .tasks()
        .iter()
        .flat_map(|t| t.requirements.iter().map(|&r| i64::from(r)))
        .collect();

    let mut current = vec![0usize; task_count];
    let mut load = vec![0i64; capacities.len()];
    let mut best: Option<(Vec<usize>, u64)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;

        load.iter_mut().for_each(|l| *l = 0);
        for (task, &node) in current.iter().enumerate() {
            for i in 0..dim {
                load[node * dim + i] += requirements[task * dim + i];
            }
        }
        let stable = load.iter().zip(&capacities).all(|(l, c)| l <= c);
        if stable {
            let cost: u64 = current
                .iter()
                .enumerate()
                .filter(|&(task, &node)| node != scenario.initial.node_of(task))
                .map(|(task, _)| u64::from(space.task(task).migration_cost))
                .sum();
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((current.clone(), cost));
            }
        }

        // Odometer step over node indices.
        let mut pos = 0;
        loop {
            if pos == task_count {
                let (best, cost) = match best {
                    Some((placed, cost)) => (
                        Some(
                            Assignment::from_node_indices(space, placed)
                                .expect("enumerated placements are in range"),
                        ),
                        Some(cost),
                    ),
                    None => (None, None),
                };
                let status = if best.is_some() {
                    SearchStatus::Optimal
                } else {
                    SearchStatus::Infeasible
                };
                return Ok(OptimalResult {
                    status,
                    best,
                    cost,
                    visited,
                });
            }
            current[pos] += 1;
            if current[pos] < node_count {
                break;
            }
            current[pos] = 0;
            pos += 1;
        }
    }
}

/// Destination rule shared by the relocation heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlacementRule {
    /// First node (in index order) where the task fits entirely.
    FirstFit,
    /// Node maximizing the post-placement balance score
    /// `min_i remaining_i / capacity_i` over resources with capacity > 0.
    BestBalance,
}

/// Relocation loop: repeatedly pick the most-overloaded node (largest total
/// negative remainder, ties to the lower index), take its cheapest task that
/// fits entirely on some other node (ties prefer the larger requirement sum,
/// then the lower task index), and place it per the rule. Stops when the
/// system is stable, or fails fast when no task on any overloaded node fits
/// anywhere.
fn relocate_solve(
    scenario: &Scenario,
    budget: &SearchBudget,
    rule: PlacementRule,
) -> StrategyResult {
    let space = &scenario.space;
    let node_count = space.nodes().len();
    let start = Instant::now();

    let mut assignment = scenario.initial.clone();
    let mut remaining: Vec<Vec<i64>> = (0..node_count)
        .map(|n| space.remaining_by_index(&assignment, n))
        .collect();
    let mut migrations = Vec::new();
    let mut moves = 0u64;

    let fits = |task: TaskIdx, remaining: &[i64]| {
        space
            .task(task)
            .requirements
            .iter()
            .zip(remaining)
            .all(|(&r, &f)| i64::from(r) <= f)
    };

    let status = loop {
        let mut overloaded: Vec<(i64, NodeIdx)> = remaining
            .iter()
            .enumerate()
            .map(|(n, rem)| (rem.iter().map(|&f| f.min(0)).sum::<i64>(), n))
            .filter(|&(deficit, _)| deficit < 0)
            .collect();
        if overloaded.is_empty() {
            break StrategyStatus::Stable;
        }
        if start.elapsed() >= budget.timeout {
            break StrategyStatus::NoSolution;
        }
        overloaded.sort_by_key(|&(deficit, node)| (deficit, node));

        let mut best_move: Option<(TaskIdx, NodeIdx, NodeIdx)> = None;
        'nodes: for &(_, node) in &overloaded {
            let mut tasks: Vec<TaskIdx> = assignment.tasks_on(node).collect();
            tasks.sort_by_key(|&t| {
                let spec = space.task(t);
                let total: u32 = spec.requirements.iter().sum();
                (spec.migration_cost, Reverse(total), t)
            });
            for task in tasks {
                let destinations = (0..node_count)
                    .filter(|&n| n != node)
                    .filter(|&n| fits(task, &remaining[n]));
                let destination = match rule {
                    PlacementRule::FirstFit => destinations.into_iter().next(),
                    PlacementRule::BestBalance => {
                        let mut best: Option<(f64, NodeIdx)> = None;
                        for n in destinations {
                            let score = balance_score(space, task, n, &remaining[n]);
                            if best.is_none_or(|(s, _)| score > s) {
                                best = Some((score, n));
                            }
                        }
                        best.map(|(_, n)| n)
                    }
                };
                if let Some(destination) = destination {
                    best_move = Some((task, node, destination));
                    break 'nodes;
                }
            }
        }

        match best_move {
            Some((task, from, to)) => {
                for (i, &r) in space.task(task).requirements.iter().enumerate() {
                    remaining[from][i] += i64::from(r);
                    remaining[to][i] -= i64::from(r);
                }
                assignment.reassign(task, to);
                migrations.push(MigrationEvent {
                    cycle: moves,
                    task,
                    from_node: from,
                    to_node: to,
                });
                moves += 1;
            }
            None => break StrategyStatus::NoSolution,
        }
    };

    let cost = space
        .transformation_cost(&scenario.initial, &assignment)
        .expect("assignment stays aligned with the space");
    StrategyResult {
        status,
        final_assignment: assignment,
        cost,
        migrations,
        cycles_run: moves,
        elapsed: start.elapsed(),
    }
}

/// Post-placement balance score: the worst fractional headroom across
/// resources the node actually provides. Nodes with no positive capacity
/// score infinite (the empty minimum), which only zero-requirement tasks
/// can reach anyway.
fn balance_score(space: &ProblemSpace, task: TaskIdx, node: NodeIdx, remaining: &[i64]) -> f64 {
    let capacities = &space.node(node).capacities;
    space
        .task(task)
        .requirements
        .iter()
        .zip(remaining)
        .zip(capacities)
        .filter(|&(_, &cap)| cap > 0)
        .map(|((&r, &f), &cap)| (f - i64::from(r)) as f64 / f64::from(cap))
        .fold(f64::INFINITY, f64::min)
}

/// Deterministic greedy relocation: destination is the first node where the
/// task fits.
pub fn greedy_solve(scenario: &Scenario, budget: &SearchBudget) -> StrategyResult {
    relocate_solve(scenario, budget, PlacementRule::FirstFit)
}

/// Deterministic balance-driven relocation: destination keeps the best
/// worst-case fractional headroom.
pub fn balance_solve(scenario: &Scenario, budget: &SearchBudget) -> StrategyResult {
    relocate_solve(scenario, budget, PlacementRule::BestBalance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_scenario;
    use crate::model::{NodeSpec, ResourceKind, TaskSpec};

    fn stable_test1() -> Scenario {
        let scenario = builtin_scenario(1).unwrap();
        let mut moved = scenario.initial.clone();
        moved.reassign(scenario.space.task_idx("J03").unwrap(), 1);
        moved.reassign(scenario.space.task_idx("J06").unwrap(), 1);
        Scenario::new(scenario.space, moved).unwrap()
    }

    fn infeasible_micro() -> Scenario {
        let space = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![NodeSpec::new("a", vec![1])],
            vec![TaskSpec::new("t", vec![2], 1)],
        )
        .unwrap();
        let initial = Assignment::from_pairs(&space, &[("t", "a")]).unwrap();
        Scenario::new(space, initial).unwrap()
    }

    #[test]
    fn fullscan_test1_finds_cost_seven() {
        let scenario = builtin_scenario(1).unwrap();
        let started = Instant::now();
        let result = fullscan(&scenario, &SearchBudget::default());
        assert!(started.elapsed() < Duration::from_secs(1));
        assert_eq!(result.status, SearchStatus::Optimal);
        assert_eq!(result.cost, Some(7));
        let best = result.best.unwrap();
        assert!(scenario.space.is_stable(&best));
        assert_eq!(
            scenario
                .space
                .transformation_cost(&scenario.initial, &best)
                .unwrap(),
            7
        );
    }

    #[test]
    fn fullscan_test2_finds_cost_ten() {
        let scenario = builtin_scenario(2).unwrap();
        let result = fullscan(&scenario, &SearchBudget::default());
        assert_eq!(result.status, SearchStatus::Optimal);
        assert_eq!(result.cost, Some(10));
    }

    #[test]
    fn fullscan_stable_initial_short_circuits() {
        let scenario = stable_test1();
        let result = fullscan(&scenario, &SearchBudget::default());
        assert_eq!(result.status, SearchStatus::Optimal);
        assert_eq!(result.cost, Some(0));
        assert_eq!(result.best.as_ref(), Some(&scenario.initial));
        // The zero-cost branch is completed first and every alternative is
        // pruned at the edge, so descents equal the task count.
        assert_eq!(result.visited, scenario.space.tasks().len() as u64);
    }

    #[test]
    fn fullscan_detects_infeasibility() {
        let result = fullscan(&infeasible_micro(), &SearchBudget::default());
        assert_eq!(result.status, SearchStatus::Infeasible);
        assert_eq!(result.best, None);
        assert_eq!(result.cost, None);
    }

    #[test]
    fn fullscan_honors_visit_limit() {
        let scenario = builtin_scenario(2).unwrap();
        let budget = SearchBudget {
            timeout: Duration::from_secs(600),
            node_visit_limit: Some(5),
        };
        let result = fullscan(&scenario, &budget);
        assert_eq!(result.status, SearchStatus::TimedOut);
    }

    #[test]
    fn oracle_matches_fullscan_on_test1() {
        let scenario = builtin_scenario(1).unwrap();
        let oracle = oracle_enumerate(&scenario).unwrap();
        assert_eq!(oracle.status, SearchStatus::Optimal);
        assert_eq!(oracle.cost, Some(7));
        assert_eq!(oracle.visited, 256);
    }

    #[test]
    fn oracle_detects_infeasibility() {
        let oracle = oracle_enumerate(&infeasible_micro()).unwrap();
        assert_eq!(oracle.status, SearchStatus::Infeasible);
    }

    #[test]
    fn oracle_guards_large_instances() {
        let scenario = builtin_scenario(4).unwrap();
        // 5^20 assignments is far over the guard.
        assert!(oracle_enumerate(&scenario).is_err());
    }

    #[test]
    fn greedy_on_stable_scenario_is_free() {
        let result = greedy_solve(&stable_test1(), &SearchBudget::default());
        assert_eq!(result.status, StrategyStatus::Stable);
        assert_eq!(result.cost, 0);
        assert!(result.migrations.is_empty());
    }

    #[test]
    fn greedy_forced_single_move() {
        let space = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![NodeSpec::new("a", vec![1]), NodeSpec::new("b", vec![5])],
            vec![TaskSpec::new("t", vec![3], 2)],
        )
        .unwrap();
        let initial = Assignment::from_pairs(&space, &[("t", "a")]).unwrap();
        let scenario = Scenario::new(space, initial).unwrap();
        let result = greedy_solve(&scenario, &SearchBudget::default());
        assert_eq!(result.status, StrategyStatus::Stable);
        assert_eq!(result.cost, 2);
        assert_eq!(result.migrations.len(), 1);
        assert_eq!(result.final_assignment.node_of(0), 1);
    }

    #[test]
    fn greedy_test1_matches_published_row() {
        let scenario = builtin_scenario(1).unwrap();
        let result = greedy_solve(&scenario, &SearchBudget::default());
        assert_eq!(result.status, StrategyStatus::Stable);
        assert!(scenario.space.is_stable(&result.final_assignment));
        assert_eq!(result.cost, 7);
    }

    #[test]
    fn greedy_reports_no_solution_fast() {
        let started = Instant::now();
        let result = greedy_solve(&infeasible_micro(), &SearchBudget::default());
        assert_eq!(result.status, StrategyStatus::NoSolution);
        assert!(started.elapsed() < Duration::from_secs(1));
    }

    #[test]
    fn balance_test1_matches_published_row() {
        let scenario = builtin_scenario(1).unwrap();
        let result = balance_solve(&scenario, &SearchBudget::default());
        assert_eq!(result.status, StrategyStatus::Stable);
        assert_eq!(result.cost, 7);
    }

    #[test]
    fn balance_prefers_roomier_destination() {
        // Task leaves node a; node c keeps more fractional headroom than b.
        let space = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![
                NodeSpec::new("a", vec![0]),
                NodeSpec::new("b", vec![10]),
                NodeSpec::new("c", vec![100]),
            ],
            vec![TaskSpec::new("t", vec![8], 1)],
        )
        .unwrap();
        let initial = Assignment::from_pairs(&space, &[("t", "a")]).unwrap();
        let scenario = Scenario::new(space, initial).unwrap();
        let result = balance_solve(&scenario, &SearchBudget::default());
        assert_eq!(result.final_assignment.node_of(0), 2);
    }

    #[test]
    fn balance_breaks_score_ties_by_node_index() {
        let space = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![
                NodeSpec::new("a", vec![0]),
                NodeSpec::new("b", vec![10]),
                NodeSpec::new("c", vec![10]),
            ],
            vec![TaskSpec::new("t", vec![4], 1)],
        )
        .unwrap();
        let initial = Assignment::from_pairs(&space, &[("t", "a")]).unwrap();
        let scenario = Scenario::new(space, initial).unwrap();
        let result = balance_solve(&scenario, &SearchBudget::default());
        assert_eq!(result.final_assignment.node_of(0), 1);
    }

    #[test]
    fn deterministic_heuristics_repeat_exactly() {
        let scenario = builtin_scenario(3).unwrap();
        let a = greedy_solve(&scenario, &SearchBudget::default());
        let b = greedy_solve(&scenario, &SearchBudget::default());
        assert_eq!(a.final_assignment, b.final_assignment);
        assert_eq!(a.cost, b.cost);
        let a = balance_solve(&scenario, &SearchBudget::default());
        let b = balance_solve(&scenario, &SearchBudget::default());
        assert_eq!(a.final_assignment, b.final_assignment);
        assert_eq!(a.cost, b.cost);
    }
}
