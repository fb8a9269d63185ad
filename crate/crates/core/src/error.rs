//! Error types shared across the crate.

use thiserror::Error;

/// Validation and lookup failures in the problem model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("unknown task id `{0}`")]
    UnknownTask(String),
    #[error("duplicate resource name `{0}`")]
    DuplicateResource(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("duplicate task id `{0}`")]
    DuplicateTask(String),
    #[error("no resources declared")]
    NoResources,
    #[error("resource at position {index} has an empty name")]
    EmptyResourceName { index: usize },
    #[error("resource `{name}` declares index {index}, expected {expected}")]
    NonContiguousResourceIndex {
        name: String,
        index: usize,
        expected: usize,
    },
    #[error("`{id}` has {found} resource entries, expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("task `{0}` assigned more than once")]
    TaskAssignedTwice(String),
    #[error("task `{0}` has no assignment")]
    TaskUnassigned(String),
    #[error("assignment covers {found} tasks, the space declares {expected}")]
    AssignmentSizeMismatch { expected: usize, found: usize },
}

/// Configuration and input failures in the strategy layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("result significance must be > 1, got {0}")]
    InvalidSignificance(f64),
    #[error("cannot normalize an empty value list")]
    EmptyValues,
    #[error("normalization requires strictly positive values, got {0}")]
    NonPositiveValue(f64),
    #[error("overloaded node hosts no agents")]
    NoAgents,
    #[error("no migration target exists: the system has a single node")]
    NoTargetNode,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Scenario / assignment file parse and validation failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Semantic {
        line: usize,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Validation(#[from] ModelError),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

/// Failures while assembling or running an experiment plan.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("runs per stochastic strategy must be at least 1")]
    ZeroRuns,
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
