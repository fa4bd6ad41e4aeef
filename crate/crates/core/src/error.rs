//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its mathematical domain.
    #[error("{name} must satisfy {constraint}, got {value}")]
    Domain {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("vocabulary mismatch: model has {model} terms, matrix has {matrix}")]
    VocabularyMismatch { model: usize, matrix: usize },

    #[error("training data contains a single class; both classes are required")]
    SingleClass,

    #[error("topic index {index} out of range (model has {n_topics} topics)")]
    TopicOutOfRange { index: usize, n_topics: usize },

    #[error("invalid label matrix: {0}")]
    InvalidLabelMatrix(String),

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, constraint: &'static str, value: f64) -> Self {
        Error::Domain {
            name,
            constraint,
            value,
        }
    }
}
