//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("candidate {candidate} out of range for {num_candidates} candidates")]
    CandidateOutOfRange {
        candidate: usize,
        num_candidates: usize,
    },

    #[error("ranking is not a permutation of 0..{num_candidates}")]
    NotAPermutation { num_candidates: usize },

    #[error("voter {voter} ranks {got} candidates, expected {expected}")]
    RankingLengthMismatch {
        voter: usize,
        got: usize,
        expected: usize,
    },

    #[error("election must have at least one candidate and one voter")]
    EmptyElection,

    #[error("committee must not be empty")]
    EmptyCommittee,

    #[error("duplicate candidate {candidate} in committee")]
    DuplicateMember { candidate: usize },

    #[error("committee size {k} exceeds candidate count {num_candidates}")]
    CommitteeTooLarge { k: usize, num_candidates: usize },

    #[error("committee size {k} exceeds voter count {num_voters}")]
    MoreSeatsThanVoters { k: usize, num_voters: usize },

    #[error("approval threshold {t} outside 1..={num_candidates}")]
    ThresholdOutOfRange { t: usize, num_candidates: usize },

    #[error("representative of voter {voter} is not a committee member")]
    RepresentativeNotInCommittee { voter: usize },

    #[error("coordinates must be finite, got ({x}, {y})")]
    NonFinitePoint { x: f64, y: f64 },

    #[error("election carries no ideal-point data")]
    MissingPointData,

    #[error("{role} point count {got} does not match {expected}")]
    PointCountMismatch {
        role: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("argument must be positive, got {value}")]
    NonPositiveInput { value: f64 },

    #[error("search exceeded its node budget of {budget}")]
    BudgetExceeded { budget: u64 },

    #[error(
        "exact optimization refused at {num_candidates} candidates (limit {limit}); \
         use an approximation rule or raise the limit explicitly"
    )]
    InfeasibleScale { num_candidates: usize, limit: usize },

    #[error("histogram shapes differ: {0}")]
    GridMismatch(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
