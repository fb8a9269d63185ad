//! Problem model: resources, nodes, tasks, assignments, and the cost and
//! stability arithmetic everything else is built on.
//!
//! All resource levels, requirements, and migration costs are exact integers;
//! there is no floating point in this layer. Remaining resources may go
//! negative — the magnitude of an overload is meaningful to the strategies,
//! so it is never clamped.

use std::collections::HashMap;

use crate::error::ModelError;

/// Index of a node within its [`ProblemSpace`].
pub type NodeIdx = usize;
/// Index of a task within its [`ProblemSpace`].
pub type TaskIdx = usize;

/// One kind of consumable resource, e.g. `cpu` or `memory`.
///
/// The index is the position of the resource in every capacity and
/// requirement vector; indices must be contiguous from zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceKind {
    pub index: usize,
    pub name: String,
}

impl ResourceKind {
    pub fn new(index: usize, name: impl Into<String>) -> Self {
        Self {
            index,
            name: name.into(),
        }
    }
}

/// A fixed node with one capacity entry per resource kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpec {
    pub id: String,
    pub capacities: Vec<u32>,
}

impl NodeSpec {
    pub fn new(id: impl Into<String>, capacities: Vec<u32>) -> Self {
        Self {
            id: id.into(),
            capacities,
        }
    }
}

/// A mobile task: one requirement entry per resource kind plus the flat
/// migration cost charged whenever the task ends up off its initial node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub id: String,
    pub requirements: Vec<u32>,
    pub migration_cost: u32,
}

impl TaskSpec {
    pub fn new(id: impl Into<String>, requirements: Vec<u32>, migration_cost: u32) -> Self {
        Self {
            id: id.into(),
            requirements,
            migration_cost,
        }
    }
}

/// The static part of a problem instance: resource kinds, node capacities,
/// and task requirements with migration costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpace {
    resources: Vec<ResourceKind>,
    nodes: Vec<NodeSpec>,
    tasks: Vec<TaskSpec>,
    node_lookup: HashMap<String, NodeIdx>,
    task_lookup: HashMap<String, TaskIdx>,
}

impl ProblemSpace {
    /// Validates and assembles a problem space.
    ///
    /// Rejects empty or non-contiguous resource declarations, duplicate ids,
    /// and capacity or requirement vectors whose length does not match the
    /// number of resources. Zero capacities and zero requirements are legal.
    pub fn new(
        resources: Vec<ResourceKind>,
        nodes: Vec<NodeSpec>,
        tasks: Vec<TaskSpec>,
    ) -> Result<Self, ModelError> {
        if resources.is_empty() {
            return Err(ModelError::NoResources);
        }
        let mut seen = HashMap::new();
        for (pos, res) in resources.iter().enumerate() {
            if res.name.is_empty() {
                return Err(ModelError::EmptyResourceName { index: pos });
            }
            if res.index != pos {
                return Err(ModelError::NonContiguousResourceIndex {
                    name: res.name.clone(),
                    index: res.index,
                    expected: pos,
                });
            }
            if seen.insert(res.name.clone(), pos).is_some() {
                return Err(ModelError::DuplicateResource(res.name.clone()));
            }
        }

        let dim = resources.len();
        let mut node_lookup = HashMap::with_capacity(nodes.len());
        for (idx, node) in nodes.iter().enumerate() {
            if node.capacities.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    id: node.id.clone(),
                    expected: dim,
                    found: node.capacities.len(),
                });
            }
            if node_lookup.insert(node.id.clone(), idx).is_some() {
                return Err(ModelError::DuplicateNode(node.id.clone()));
            }
        }
        let mut task_lookup = HashMap::with_capacity(tasks.len());
        for (idx, task) in tasks.iter().enumerate() {
            if task.requirements.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    id: task.id.clone(),
                    expected: dim,
                    found: task.requirements.len(),
                });
            }
            if task_lookup.insert(task.id.clone(), idx).is_some() {
                return Err(ModelError::DuplicateTask(task.id.clone()));
            }
        }

        Ok(Self {
            resources,
            nodes,
            tasks,
            node_lookup,
            task_lookup,
        })
    }

    pub fn resources(&self) -> &[ResourceKind] {
        &self.resources
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn node(&self, idx: NodeIdx) -> &NodeSpec {
        &self.nodes[idx]
    }

    pub fn task(&self, idx: TaskIdx) -> &TaskSpec {
        &self.tasks[idx]
    }

    pub fn node_idx(&self, id: &str) -> Option<NodeIdx> {
        self.node_lookup.get(id).copied()
    }

    pub fn task_idx(&self, id: &str) -> Option<TaskIdx> {
        self.task_lookup.get(id).copied()
    }

    /// Per-resource remainder `capacity - sum(requirements of hosted tasks)`
    /// for the named node. Negative entries signal an overload.
    pub fn remaining_resources(
        &self,
        assignment: &Assignment,
        node_id: &str,
    ) -> Result<Vec<i64>, ModelError> {
        let idx = self
            .node_idx(node_id)
            .ok_or_else(|| ModelError::UnknownNode(node_id.to_string()))?;
        Ok(self.remaining_by_index(assignment, idx))
    }

    /// Index-addressed variant of [`Self::remaining_resources`].
    pub fn remaining_by_index(&self, assignment: &Assignment, node: NodeIdx) -> Vec<i64> {
        self.check_assignment_len(assignment);
        let mut remaining: Vec<i64> = self.nodes[node]
            .capacities
            .iter()
            .map(|&c| i64::from(c))
            .collect();
        for (task, &assigned) in assignment.node_of.iter().enumerate() {
            if assigned == node {
                for (slot, &req) in remaining.iter_mut().zip(&self.tasks[task].requirements) {
                    *slot -= i64::from(req);
                }
            }
        }
        remaining
    }

    /// True iff every node has non-negative remaining resources for every
    /// resource kind; otherwise the system is overloaded.
    pub fn is_stable(&self, assignment: &Assignment) -> bool {
        self.check_assignment_len(assignment);
        let dim = self.resources.len();
        let mut load = vec![0i64; self.nodes.len() * dim];
        for (task, &node) in assignment.node_of.iter().enumerate() {
            for (i, &req) in self.tasks[task].requirements.iter().enumerate() {
                load[node * dim + i] += i64::from(req);
            }
        }
        self.nodes.iter().enumerate().all(|(n, node)| {
            node.capacities
                .iter()
                .enumerate()
                .all(|(i, &cap)| load[n * dim + i] <= i64::from(cap))
        })
    }

    /// Sum of migration costs over tasks whose final node differs from the
    /// initial one. A task moved away and back contributes nothing.
    pub fn transformation_cost(
        &self,
        initial: &Assignment,
        final_: &Assignment,
    ) -> Result<u64, ModelError> {
        if initial.node_of.len() != self.tasks.len() || final_.node_of.len() != self.tasks.len() {
            return Err(ModelError::AssignmentSizeMismatch {
                expected: self.tasks.len(),
                found: initial.node_of.len().max(final_.node_of.len()),
            });
        }
        Ok(initial
            .node_of
            .iter()
            .zip(&final_.node_of)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(task, _)| u64::from(self.tasks[task].migration_cost))
            .sum())
    }

    /// Cost of migrating every task: the upper bound on any transformation.
    pub fn max_transformation_cost(&self) -> u64 {
        self.tasks.iter().map(|t| u64::from(t.migration_cost)).sum()
    }

    fn check_assignment_len(&self, assignment: &Assignment) {
        assert_eq!(
            assignment.node_of.len(),
            self.tasks.len(),
            "assignment built for a different problem space"
        );
    }
}

/// A total mapping from tasks to nodes, stored as one node index per task in
/// task declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    node_of: Vec<NodeIdx>,
}

impl Assignment {
    /// Builds an assignment from `(task id, node id)` pairs. Every task of
    /// the space must appear exactly once and every node must exist.
    pub fn from_pairs<S: AsRef<str>, T: AsRef<str>>(
        space: &ProblemSpace,
        pairs: &[(S, T)],
    ) -> Result<Self, ModelError> {
        let mut node_of = vec![usize::MAX; space.tasks().len()];
        for (task_id, node_id) in pairs {
            let task = space
                .task_idx(task_id.as_ref())
                .ok_or_else(|| ModelError::UnknownTask(task_id.as_ref().to_string()))?;
            let node = space
                .node_idx(node_id.as_ref())
                .ok_or_else(|| ModelError::UnknownNode(node_id.as_ref().to_string()))?;
            if node_of[task] != usize::MAX {
                return Err(ModelError::TaskAssignedTwice(task_id.as_ref().to_string()));
            }
            node_of[task] = node;
        }
        if let Some(task) = node_of.iter().position(|&n| n == usize::MAX) {
            return Err(ModelError::TaskUnassigned(space.task(task).id.clone()));
        }
        Ok(Self { node_of })
    }

    /// Builds an assignment from node indices in task order.
    pub fn from_node_indices(
        space: &ProblemSpace,
        node_of: Vec<NodeIdx>,
    ) -> Result<Self, ModelError> {
        if node_of.len() != space.tasks().len() {
            return Err(ModelError::AssignmentSizeMismatch {
                expected: space.tasks().len(),
                found: node_of.len(),
            });
        }
        for (task, &node) in node_of.iter().enumerate() {
            if node >= space.nodes().len() {
                return Err(ModelError::UnknownNode(format!(
                    "index {node} (task {})",
                    space.task(task).id
                )));
            }
        }
        Ok(Self { node_of })
    }

    pub fn node_of(&self, task: TaskIdx) -> NodeIdx {
        self.node_of[task]
    }

    /// Node index per task, in task declaration order.
    pub fn as_slice(&self) -> &[NodeIdx] {
        &self.node_of
    }

    pub fn len(&self) -> usize {
        self.node_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_of.is_empty()
    }

    /// Tasks currently placed on `node`, in task order.
    pub fn tasks_on(&self, node: NodeIdx) -> impl Iterator<Item = TaskIdx> + '_ {
        self.node_of
            .iter()
            .enumerate()
            .filter(move |(_, &n)| n == node)
            .map(|(t, _)| t)
    }

    /// Reassigns one task. Callers are responsible for index validity.
    pub fn reassign(&mut self, task: TaskIdx, node: NodeIdx) {
        self.node_of[task] = node;
    }
}

/// A problem space together with its initial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub space: ProblemSpace,
    pub initial: Assignment,
}

impl Scenario {
    pub fn new(space: ProblemSpace, initial: Assignment) -> Result<Self, ModelError> {
        if initial.len() != space.tasks().len() {
            return Err(ModelError::AssignmentSizeMismatch {
                expected: space.tasks().len(),
                found: initial.len(),
            });
        }
        if let Some(&bad) = initial
            .as_slice()
            .iter()
            .find(|&&n| n >= space.nodes().len())
        {
            return Err(ModelError::UnknownNode(format!("index {bad}")));
        }
        Ok(Self { space, initial })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_scenario;

    fn two_node_space() -> ProblemSpace {
        ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu"), ResourceKind::new(1, "memory")],
            vec![
                NodeSpec::new("a", vec![10, 10]),
                NodeSpec::new("b", vec![5, 5]),
            ],
            vec![
                TaskSpec::new("t1", vec![10, 10], 3),
                TaskSpec::new("t2", vec![1, 1], 2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn remaining_resources_test1_node01() {
        let scenario = builtin_scenario(1).unwrap();
        let remaining = scenario
            .space
            .remaining_resources(&scenario.initial, "Node01")
            .unwrap();
        assert_eq!(remaining, vec![-26, 38]);
    }

    #[test]
    fn remaining_resources_empty_node_equals_capacity() {
        let space = two_node_space();
        // Both tasks on node a leaves node b untouched.
        let assignment = Assignment::from_pairs(&space, &[("t1", "a"), ("t2", "a")]).unwrap();
        assert_eq!(
            space.remaining_resources(&assignment, "b").unwrap(),
            vec![5, 5]
        );
    }

    #[test]
    fn remaining_resources_exact_fit_is_zero() {
        let space = two_node_space();
        let assignment = Assignment::from_pairs(&space, &[("t1", "a"), ("t2", "b")]).unwrap();
        assert_eq!(
            space.remaining_resources(&assignment, "a").unwrap(),
            vec![0, 0]
        );
    }

    #[test]
    fn remaining_resources_unknown_node_errors() {
        let space = two_node_space();
        let assignment = Assignment::from_pairs(&space, &[("t1", "a"), ("t2", "b")]).unwrap();
        assert!(matches!(
            space.remaining_resources(&assignment, "nope"),
            Err(ModelError::UnknownNode(_))
        ));
    }

    #[test]
    fn test1_initial_is_overloaded() {
        let scenario = builtin_scenario(1).unwrap();
        assert!(!scenario.space.is_stable(&scenario.initial));
    }

    #[test]
    fn no_tasks_is_vacuously_stable() {
        let space = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![NodeSpec::new("a", vec![0])],
            vec![],
        )
        .unwrap();
        let assignment = Assignment::from_node_indices(&space, vec![]).unwrap();
        assert!(space.is_stable(&assignment));
    }

    #[test]
    fn test1_with_j03_j06_on_node02_is_stable() {
        let scenario = builtin_scenario(1).unwrap();
        let mut moved = scenario.initial.clone();
        let node02 = scenario.space.node_idx("Node02").unwrap();
        moved.reassign(scenario.space.task_idx("J03").unwrap(), node02);
        moved.reassign(scenario.space.task_idx("J06").unwrap(), node02);
        assert!(scenario.space.is_stable(&moved));
        assert_eq!(
            scenario
                .space
                .transformation_cost(&scenario.initial, &moved)
                .unwrap(),
            7
        );
    }

    #[test]
    fn transformation_cost_identity_is_zero() {
        let scenario = builtin_scenario(1).unwrap();
        assert_eq!(
            scenario
                .space
                .transformation_cost(&scenario.initial, &scenario.initial)
                .unwrap(),
            0
        );
    }

    #[test]
    fn transformation_cost_all_tasks_moved_test1() {
        let scenario = builtin_scenario(1).unwrap();
        let flipped: Vec<NodeIdx> = scenario.initial.as_slice().iter().map(|&n| 1 - n).collect();
        let flipped = Assignment::from_node_indices(&scenario.space, flipped).unwrap();
        assert_eq!(
            scenario
                .space
                .transformation_cost(&scenario.initial, &flipped)
                .unwrap(),
            45
        );
    }

    #[test]
    fn transformation_cost_mismatched_sets_error() {
        let scenario = builtin_scenario(1).unwrap();
        let other = Assignment {
            node_of: vec![0; 3],
        };
        assert!(matches!(
            scenario
                .space
                .transformation_cost(&scenario.initial, &other),
            Err(ModelError::AssignmentSizeMismatch { .. })
        ));
    }

    #[test]
    fn max_transformation_cost_matches_tables() {
        assert_eq!(
            builtin_scenario(2).unwrap().space.max_transformation_cost(),
            67
        );
        assert_eq!(
            builtin_scenario(7).unwrap().space.max_transformation_cost(),
            170
        );
    }

    #[test]
    fn max_transformation_cost_empty_task_set() {
        let space = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![NodeSpec::new("a", vec![1])],
            vec![],
        )
        .unwrap();
        assert_eq!(space.max_transformation_cost(), 0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![NodeSpec::new("a", vec![1]), NodeSpec::new("a", vec![2])],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DuplicateNode(_)));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = ProblemSpace::new(
            vec![ResourceKind::new(0, "cpu")],
            vec![NodeSpec::new("a", vec![1, 2])],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DimensionMismatch { .. }));
    }

    #[test]
    fn assignment_must_cover_every_task() {
        let space = two_node_space();
        assert!(matches!(
            Assignment::from_pairs(&space, &[("t1", "a")]),
            Err(ModelError::TaskUnassigned(_))
        ));
        assert!(matches!(
            Assignment::from_pairs(&space, &[("t1", "a"), ("t1", "b"), ("t2", "a")]),
            Err(ModelError::TaskAssignedTwice(_))
        ));
    }
}
