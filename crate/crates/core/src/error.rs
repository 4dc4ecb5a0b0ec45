use thiserror::Error;

use crate::companion::{CompanionPair, Violation};

/// Errors raised by the library.
///
/// Checks that falsify a claim (lemma and proposition verifiers) never use
/// this type; they return reports instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid defining set: {}", format_violations(.0))]
    InvalidDefiningSet(Vec<Violation>),

    #[error("invalid swap set: {0}")]
    InvalidSwapSet(String),

    #[error("companion pair {0} is not a balanced pair of four distinct ranks")]
    UnbalancedPair(CompanionPair),

    #[error("swap groups are only defined for type 1 and type 2 pairs, got type 3")]
    Type3Pair,

    #[error("{what} is outside the supported range: {constraint}")]
    OutOfRange { what: &'static str, constraint: String },

    #[error("size refused: {0}")]
    SizeRefused(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
