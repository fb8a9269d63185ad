//! Random scenario generation for tests, fuzzing, and benchmarks.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::model::{Assignment, NodeSpec, ProblemSpace, ResourceKind, Scenario, TaskSpec};

/// Ranges for [`random_scenario`]. The defaults describe instances small
/// enough for unpruned enumeration, which is what the solver
/// cross-validation suites use.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub resources: RangeInclusive<usize>,
    pub nodes: RangeInclusive<usize>,
    pub tasks: RangeInclusive<usize>,
    pub max_capacity: u32,
    pub max_requirement: u32,
    pub max_cost: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            resources: 1..=3,
            nodes: 1..=3,
            tasks: 1..=6,
            max_capacity: 30,
            max_requirement: 15,
            max_cost: 10,
        }
    }
}

/// Draws a scenario uniformly within `params`, including a uniform random
/// initial assignment.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R, params: &GenParams) -> Scenario {
    let dim = rng.random_range(params.resources.clone());
    let node_count = rng.random_range(params.nodes.clone());
    let task_count = rng.random_range(params.tasks.clone());

    let resources = (0..dim)
        .map(|i| ResourceKind::new(i, format!("r{i}")))
        .collect();
    let nodes = (0..node_count)
        .map(|n| {
            let capacities = (0..dim)
                .map(|_| rng.random_range(0..=params.max_capacity))
                .collect();
            NodeSpec::new(format!("n{n}"), capacities)
        })
        .collect();
    let tasks = (0..task_count)
        .map(|t| {
            let requirements = (0..dim)
                .map(|_| rng.random_range(0..=params.max_requirement))
                .collect();
            TaskSpec::new(
                format!("t{t}"),
                requirements,
                rng.random_range(0..=params.max_cost),
            )
        })
        .collect();

    let space =
        ProblemSpace::new(resources, nodes, tasks).expect("generated instances are well-formed");
    let placements = (0..task_count)
        .map(|_| rng.random_range(0..node_count))
        .collect();
    let initial = Assignment::from_node_indices(&space, placements)
        .expect("generated placements are in range");
    Scenario::new(space, initial).expect("generated scenarios are valid")
}
