//! Built-in benchmark scenarios.
//!
//! Seven bundled test setups over a shared pool of eight nodes and
//! thirty-two tasks with two resource kinds (cpu, memory). Test N uses the
//! first N+1 nodes and the first 4N+4 tasks; nodes outside a test are
//! excluded from the problem space entirely, so no strategy can migrate
//! onto them.

use thiserror::Error;

use crate::model::{Assignment, NodeSpec, ProblemSpace, ResourceKind, Scenario, TaskSpec};

/// Requested test number outside `1..=7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("test number {0} out of range 1..=7")]
pub struct InvalidTestNumber(pub u8);

/// `(id, cpu capacity, memory capacity)` for the full node pool.
const NODES: [(&str, u32, u32); 8] = [
    ("Node01", 40, 80),
    ("Node02", 60, 40),
    ("Node03", 50, 80),
    ("Node04", 20, 50),
    ("Node05", 40, 20),
    ("Node06", 40, 40),
    ("Node07", 30, 50),
    ("Node08", 40, 20),
];

/// `(cpu, memory, migration cost)` for tasks J01..J32.
const TASKS: [(u32, u32, u32); 32] = [
    (4, 5, 4),    // J01
    (14, 7, 5),   // J02
    (10, 3, 4),   // J03
    (16, 6, 7),   // J04
    (14, 14, 10), // J05
    (18, 6, 3),   // J06
    (4, 15, 6),   // J07
    (11, 9, 6),   // J08
    (5, 15, 4),   // J09
    (7, 11, 4),   // J10
    (17, 12, 8),  // J11
    (5, 3, 6),    // J12
    (4, 20, 4),   // J13
    (2, 18, 5),   // J14
    (16, 15, 1),  // J15
    (14, 20, 9),  // J16
    (2, 4, 5),    // J17
    (9, 4, 5),    // J18
    (12, 2, 7),   // J19
    (8, 20, 1),   // J20
    (11, 2, 7),   // J21
    (20, 6, 2),   // J22
    (2, 12, 5),   // J23
    (6, 6, 3),    // J24
    (1, 9, 4),    // J25
    (3, 9, 10),   // J26
    (9, 10, 2),   // J27
    (6, 6, 8),    // J28
    (1, 20, 6),   // J29
    (7, 4, 5),    // J30
    (11, 18, 4),  // J31
    (17, 17, 10), // J32
];

/// Initial placements per test: task number -> node number, 1-based.
const INITIAL: [&[(u8, u8)]; 7] = [
    // Test 1: two nodes, eight tasks.
    &[
        (1, 1),
        (2, 1),
        (3, 1),
        (4, 1),
        (6, 1),
        (7, 1),
        (5, 2),
        (8, 2),
    ],
    // Test 2: three nodes, twelve tasks.
    &[
        (1, 1),
        (3, 1),
        (4, 1),
        (6, 1),
        (10, 1),
        (11, 1),
        (2, 2),
        (8, 2),
        (9, 2),
        (5, 3),
        (7, 3),
        (12, 3),
    ],
    // Test 3: four nodes, sixteen tasks.
    &[
        (1, 1),
        (4, 1),
        (14, 1),
        (16, 1),
        (8, 2),
        (11, 2),
        (12, 2),
        (15, 2),
        (2, 3),
        (3, 3),
        (6, 3),
        (7, 3),
        (13, 3),
        (5, 4),
        (9, 4),
        (10, 4),
    ],
    // Test 4: five nodes, twenty tasks.
    &[
        (1, 1),
        (3, 1),
        (4, 1),
        (5, 1),
        (9, 1),
        (10, 1),
        (17, 1),
        (18, 1),
        (2, 2),
        (6, 2),
        (11, 2),
        (8, 3),
        (12, 3),
        (14, 3),
        (15, 3),
        (7, 4),
        (16, 4),
        (13, 5),
        (19, 5),
        (20, 5),
    ],
    // Test 5: six nodes, twenty-four tasks.
    &[
        (1, 1),
        (3, 1),
        (4, 1),
        (6, 1),
        (16, 1),
        (20, 1),
        (8, 2),
        (9, 2),
        (17, 2),
        (18, 2),
        (7, 3),
        (14, 3),
        (19, 3),
        (22, 3),
        (10, 4),
        (11, 4),
        (23, 4),
        (24, 4),
        (2, 5),
        (13, 5),
        (5, 6),
        (12, 6),
        (15, 6),
        (21, 6),
    ],
    // Test 6: seven nodes, twenty-eight tasks.
    &[
        (3, 1),
        (6, 1),
        (20, 1),
        (26, 1),
        (28, 1),
        (4, 2),
        (5, 2),
        (1, 3),
        (17, 3),
        (21, 3),
        (12, 4),
        (16, 4),
        (22, 4),
        (24, 4),
        (27, 4),
        (2, 5),
        (7, 5),
        (10, 5),
        (13, 5),
        (14, 5),
        (15, 5),
        (18, 5),
        (23, 5),
        (25, 5),
        (8, 6),
        (11, 6),
        (9, 7),
        (19, 7),
    ],
    // Test 7: all eight nodes, all thirty-two tasks.
    &[
        (1, 1),
        (4, 1),
        (16, 1),
        (11, 2),
        (18, 2),
        (27, 2),
        (28, 2),
        (2, 3),
        (6, 3),
        (7, 3),
        (19, 3),
        (5, 4),
        (9, 4),
        (10, 4),
        (17, 4),
        (24, 4),
        (14, 5),
        (31, 5),
        (8, 6),
        (12, 6),
        (15, 6),
        (21, 6),
        (25, 6),
        (30, 6),
        (3, 7),
        (13, 7),
        (20, 7),
        (22, 7),
        (26, 7),
        (29, 7),
        (23, 8),
        (32, 8),
    ],
];

/// Known optimal transformation costs, where the exact search has confirmed
/// one. Tests 5-7 have no confirmed optimum.
pub const KNOWN_OPTIMAL: [Option<u64>; 7] =
    [Some(7), Some(10), Some(12), Some(20), None, None, None];

fn task_id(number: u8) -> String {
    format!("J{number:02}")
}

/// Builds built-in scenario `test` (1..=7): test N spans nodes
/// `Node01..Node0{N+1}` and tasks `J01..J{4N+4}` with its fixed initial
/// assignment.
pub fn builtin_scenario(test: u8) -> Result<Scenario, InvalidTestNumber> {
    if !(1..=7).contains(&test) {
        return Err(InvalidTestNumber(test));
    }
    let node_count = usize::from(test) + 1;
    let task_count = 4 * usize::from(test) + 4;

    let resources = vec![ResourceKind::new(0, "cpu"), ResourceKind::new(1, "memory")];
    let nodes = NODES[..node_count]
        .iter()
        .map(|&(id, cpu, mem)| NodeSpec::new(id, vec![cpu, mem]))
        .collect();
    let tasks = (0..task_count)
        .map(|i| {
            let (cpu, mem, cost) = TASKS[i];
            TaskSpec::new(task_id(i as u8 + 1), vec![cpu, mem], cost)
        })
        .collect();
    let space =
        ProblemSpace::new(resources, nodes, tasks).expect("built-in tables are well-formed");

    let pairs: Vec<(String, &str)> = INITIAL[usize::from(test) - 1]
        .iter()
        .map(|&(task, node)| (task_id(task), NODES[usize::from(node) - 1].0))
        .collect();
    let initial = Assignment::from_pairs(&space, &pairs).expect("built-in assignments are total");
    Ok(Scenario::new(space, initial).expect("built-in scenarios are valid"))
}

/// Known optimum for built-in test `test`, if the exact search has one.
pub fn known_optimal(test: u8) -> Option<u64> {
    KNOWN_OPTIMAL
        .get(usize::from(test).checked_sub(1)?)
        .copied()
        .flatten()
}
