use crate::geometry::GeometryError;
use crate::problem::{MsgSet, ProblemError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{what}: {n} messages exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("support has {size} composite indices; at most {limit} are allowed")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rate point lies outside the unit box")]
    OutsideUnitBox,
    #[error("composite index {set} is empty or names an unknown message")]
    InvalidSupport { set: MsgSet },
    #[error("decoding set for receiver {receiver} must contain it")]
    InvalidDecodingSet { receiver: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
