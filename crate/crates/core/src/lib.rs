//! Multiwinner voting rules over two-dimensional Euclidean elections.
//!
//! The crate models elections in which every voter ranks every candidate,
//! and a rule selects a committee of `k` winners. Rankings can be given
//! directly or induced from ideal points in the plane, where each voter
//! prefers candidates closer in Euclidean distance.
//!
//! Three families of rules are provided:
//!
//! * sequential rules that run in polynomial time (SNTV, Bloc, k-Borda,
//!   STV), in [`rules::sequential`];
//! * exact optimization of NP-hard committee objectives
//!   (Chamberlin-Courant, Monroe, harmonic Borda), in [`rules::exact`];
//! * polynomial-time approximation algorithms for those objectives, in
//!   [`rules::approx`].
//!
//! All rules break ties uniformly at random and report how many random
//! decisions they took, so repeated runs over sampled elections can be
//! made reproducible by seeding. [`sampling`] generates elections from a
//! handful of planar point distributions, and [`metrics`] aggregates
//! winner positions into histograms and dispersion statistics.

pub mod election;
pub mod error;
mod flow;
pub mod metrics;
pub mod rules;
pub mod sampling;

pub use election::{
    candidate_score, cc_score, gyb_assignment, hb_score, monroe_assignment, Assignment,
    Committee, Election, Point, PreferenceOrder, ScoringFunction,
};
pub use error::{Error, Result};
pub use rules::{evaluate, RuleId, RuleOutcome};
pub use sampling::{generate_election, DistributionId, RngStream};
