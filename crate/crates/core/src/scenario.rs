//! Line-oriented scenario text format.
//!
//! UTF-8, one directive per line, `#` starts a comment, blank lines are
//! ignored. The `resources` line comes first and fixes the vector positions
//! for every later directive; nodes and tasks must be declared before they
//! are referenced by `assign`, and every task is assigned exactly once:
//!
//! ```text
//! resources cpu memory
//! node Node01 40 80
//! task J01 4 5 4        # requirements per resource, then migration cost
//! assign J01 Node01
//! ```
//!
//! Assignment files (used to verify a proposed placement against a
//! scenario) contain `assign` lines only.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::model::{Assignment, NodeSpec, ProblemSpace, ResourceKind, Scenario, TaskSpec};

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut resources: Option<Vec<ResourceKind>> = None;
    let mut nodes: Vec<NodeSpec> = Vec::new();
    let mut tasks: Vec<TaskSpec> = Vec::new();
    let mut assigns: Vec<(String, String)> = Vec::new();
    let mut assigned_line: Vec<usize> = Vec::new();

    for (line_no, raw) in lines(text) {
        let mut fields = raw.iter();
        let directive = *fields.next().expect("lines() yields non-empty lines");
        match directive {
            "resources" => {
                if resources.is_some() {
                    return Err(ParseError::syntax(line_no, "resources declared twice"));
                }
                let names: Vec<&str> = fields.copied().collect();
                if names.is_empty() {
                    return Err(ParseError::syntax(
                        line_no,
                        "resources directive needs at least one name",
                    ));
                }
                resources = Some(
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, name)| ResourceKind::new(i, *name))
                        .collect(),
                );
            }
            "node" => {
                let dim = dimension_of(&resources, line_no)?;
                let id = require_id(fields.next(), "node", line_no)?;
                if nodes.iter().any(|n| n.id == id) {
                    return Err(ParseError::syntax(
                        line_no,
                        format!("duplicate node id `{id}`"),
                    ));
                }
                let capacities = parse_ints(&mut fields, dim, "capacity", line_no)?;
                expect_end(fields.next(), line_no)?;
                nodes.push(NodeSpec::new(id, capacities));
            }
            "task" => {
                let dim = dimension_of(&resources, line_no)?;
                let id = require_id(fields.next(), "task", line_no)?;
                if tasks.iter().any(|t| t.id == id) {
                    return Err(ParseError::syntax(
                        line_no,
                        format!("duplicate task id `{id}`"),
                    ));
                }
                let requirements = parse_ints(&mut fields, dim, "requirement", line_no)?;
                let cost = parse_int(fields.next(), "migration cost", line_no)?;
                expect_end(fields.next(), line_no)?;
                tasks.push(TaskSpec::new(id, requirements, cost));
            }
            "assign" => {
                let task = require_id(fields.next(), "assign", line_no)?;
                let node = require_id(fields.next(), "assign", line_no)?;
                expect_end(fields.next(), line_no)?;
                if !tasks.iter().any(|t| t.id == task) {
                    return Err(ParseError::syntax(
                        line_no,
                        format!("assign references undeclared task `{task}`"),
                    ));
                }
                if !nodes.iter().any(|n| n.id == node) {
                    return Err(ParseError::syntax(
                        line_no,
                        format!("assign references undeclared node `{node}`"),
                    ));
                }
                if let Some(pos) = assigns.iter().position(|(t, _)| *t == task) {
                    return Err(ParseError::syntax(
                        line_no,
                        format!(
                            "task `{task}` assigned twice (first at line {})",
                            assigned_line[pos]
                        ),
                    ));
                }
                assigns.push((task, node));
                assigned_line.push(line_no);
            }
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    let resources = resources.ok_or(crate::error::ModelError::NoResources)?;
    let space = ProblemSpace::new(resources, nodes, tasks)?;
    let initial = Assignment::from_pairs(&space, &assigns)?;
    Ok(Scenario::new(space, initial)?)
}

/// Parses an assignment document (`assign` lines only) against an existing
/// space. Every task of the space must be covered.
pub fn parse_assignment(text: &str, space: &ProblemSpace) -> Result<Assignment, ParseError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (line_no, raw) in lines(text) {
        let mut fields = raw.iter();
        match *fields.next().expect("lines() yields non-empty lines") {
            "assign" => {
                let task = require_id(fields.next(), "assign", line_no)?;
                let node = require_id(fields.next(), "assign", line_no)?;
                expect_end(fields.next(), line_no)?;
                pairs.push((task, node));
            }
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    format!("expected `assign`, found `{other}`"),
                ));
            }
        }
    }
    Ok(Assignment::from_pairs(space, &pairs)?)
}

/// Canonical text rendering: resources, nodes, tasks, then assignments in
/// task declaration order. Parsing the output reproduces the scenario
/// exactly.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let space = &scenario.space;
    let mut out = String::new();
    out.push_str("resources");
    for r in space.resources() {
        let _ = write!(out, " {}", r.name);
    }
    out.push('\n');
    for node in space.nodes() {
        let _ = write!(out, "node {}", node.id);
        for c in &node.capacities {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    for task in space.tasks() {
        let _ = write!(out, "task {}", task.id);
        for r in &task.requirements {
            let _ = write!(out, " {r}");
        }
        let _ = writeln!(out, " {}", task.migration_cost);
    }
    for (task_idx, task) in space.tasks().iter().enumerate() {
        let node = space.node(scenario.initial.node_of(task_idx));
        let _ = writeln!(out, "assign {} {}", task.id, node.id);
    }
    out
}

/// Renders an assignment as an `assign`-lines document.
pub fn serialize_assignment(space: &ProblemSpace, assignment: &Assignment) -> String {
    let mut out = String::new();
    for (task_idx, task) in space.tasks().iter().enumerate() {
        let node = space.node(assignment.node_of(task_idx));
        let _ = writeln!(out, "assign {} {}", task.id, node.id);
    }
    out
}

/// Comment-stripped, whitespace-split lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let code = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = code.split_whitespace().collect();
        if fields.is_empty() {
            None
        } else {
            Some((i + 1, fields))
        }
    })
}

fn dimension_of(
    resources: &Option<Vec<ResourceKind>>,
    line_no: usize,
) -> Result<usize, ParseError> {
    resources
        .as_ref()
        .map(Vec::len)
        .ok_or_else(|| ParseError::syntax(line_no, "resources must be declared first"))
}

fn require_id(field: Option<&&str>, directive: &str, line_no: usize) -> Result<String, ParseError> {
    field
        .map(|s| s.to_string())
        .ok_or_else(|| ParseError::syntax(line_no, format!("{directive}: missing identifier")))
}

fn parse_int(field: Option<&&str>, what: &str, line_no: usize) -> Result<u32, ParseError> {
    let raw = field.ok_or_else(|| ParseError::syntax(line_no, format!("missing {what} value")))?;
    raw.parse::<u32>().map_err(|_| {
        ParseError::syntax(
            line_no,
            format!("invalid {what} `{raw}`: expected a non-negative integer"),
        )
    })
}

fn parse_ints<'a>(
    fields: &mut impl Iterator<Item = &'a &'a str>,
    count: usize,
    what: &str,
    line_no: usize,
) -> Result<Vec<u32>, ParseError> {
    (0..count)
        .map(|_| parse_int(fields.next(), what, line_no))
        .collect()
}

fn expect_end(field: Option<&&str>, line_no: usize) -> Result<(), ParseError> {
    match field {
        None => Ok(()),
        Some(extra) => Err(ParseError::syntax(
            line_no,
            format!("unexpected trailing field `{extra}`"),
        )),
    }
}
