//! Multiwinner rules. Every rule returns a [`RuleOutcome`]: the winning
//! committee plus a count of random tie-break events, since randomized
//! tie-breaking is part of each rule's definition here.

pub mod approx;
pub mod exact;
pub mod sequential;

use crate::election::{Committee, Election};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

pub use exact::{BoundKind, OptimizerConfig};

/// Result of running one rule on one election.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOutcome {
    pub committee: Committee,
    /// Number of decisions that required a random tie-break.
    pub tie_events: u64,
}

/// Every rule the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    Sntv,
    Bloc,
    KBorda,
    Stv,
    ExactCc,
    ExactMonroe,
    ExactHb,
    GreedyCc,
    AlgorithmP,
    RangingCc,
    GreedyMonroe,
}

impl RuleId {
    pub const ALL: [RuleId; 11] = [
        RuleId::Sntv,
        RuleId::Bloc,
        RuleId::KBorda,
        RuleId::Stv,
        RuleId::ExactCc,
        RuleId::ExactMonroe,
        RuleId::ExactHb,
        RuleId::GreedyCc,
        RuleId::AlgorithmP,
        RuleId::RangingCc,
        RuleId::GreedyMonroe,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RuleId::Sntv => "sntv",
            RuleId::Bloc => "bloc",
            RuleId::KBorda => "k_borda",
            RuleId::Stv => "stv",
            RuleId::ExactCc => "exact_cc",
            RuleId::ExactMonroe => "exact_monroe",
            RuleId::ExactHb => "exact_hb",
            RuleId::GreedyCc => "greedy_cc",
            RuleId::AlgorithmP => "algorithm_p",
            RuleId::RangingCc => "ranging_cc",
            RuleId::GreedyMonroe => "greedy_monroe",
        }
    }

    /// Exact rules refuse large instances rather than approximate.
    pub fn is_exact(&self) -> bool {
        matches!(self, RuleId::ExactCc | RuleId::ExactMonroe | RuleId::ExactHb)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = RuleId::ALL.iter().map(|r| r.name()).collect();
                format!("unknown rule '{s}' (expected one of: {})", names.join(", "))
            })
    }
}

/// Runs `rule` on one election. `cfg` only affects the exact rules.
pub fn evaluate<R: Rng>(
    rule: RuleId,
    election: &Election,
    k: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
) -> Result<RuleOutcome> {
    match rule {
        RuleId::Sntv => sequential::sntv(election, k, rng),
        RuleId::Bloc => sequential::bloc(election, k, rng),
        RuleId::KBorda => sequential::k_borda(election, k, rng),
        RuleId::Stv => sequential::stv(election, k, rng),
        RuleId::ExactCc => exact::exact_cc(election, k, rng, cfg),
        RuleId::ExactMonroe => exact::exact_monroe(election, k, rng, cfg),
        RuleId::ExactHb => exact::exact_hb(election, k, rng, cfg),
        RuleId::GreedyCc => approx::greedy_cc(election, k, rng),
        RuleId::AlgorithmP => {
            let schedule = approx::ThresholdSchedule::new(election.num_candidates(), k)?;
            approx::algorithm_p(election, k, schedule.x_max(), rng)
        }
        RuleId::RangingCc => approx::ranging_cc(election, k, rng),
        RuleId::GreedyMonroe => approx::greedy_monroe(election, k, rng),
    }
}

pub(crate) fn check_committee_size(election: &Election, k: usize) -> Result<()> {
    let m = election.num_candidates();
    if k == 0 || k > m {
        return Err(Error::CommitteeTooLarge {
            k,
            num_candidates: m,
        });
    }
    Ok(())
}

/// Index of a maximum of `scores` over the indices where `eligible` is
/// true, ties uniform at random. Returns `None` if nothing is eligible.
pub(crate) fn random_argmax_by<R, F>(
    len: usize,
    eligible: F,
    scores: &[u64],
    rng: &mut R,
    tie_events: &mut u64,
) -> Option<usize>
where
    R: Rng,
    F: Fn(usize) -> bool,
{
    reservoir_arg(len, eligible, rng, tie_events, |a, b| scores[a] > scores[b])
}

/// As [`random_argmax_by`], minimizing instead.
pub(crate) fn random_argmin_by<R, F>(
    len: usize,
    eligible: F,
    scores: &[u64],
    rng: &mut R,
    tie_events: &mut u64,
) -> Option<usize>
where
    R: Rng,
    F: Fn(usize) -> bool,
{
    reservoir_arg(len, eligible, rng, tie_events, |a, b| scores[a] < scores[b])
}

fn reservoir_arg<R, F, B>(
    len: usize,
    eligible: F,
    rng: &mut R,
    tie_events: &mut u64,
    better: B,
) -> Option<usize>
where
    R: Rng,
    F: Fn(usize) -> bool,
    B: Fn(usize, usize) -> bool,
{
    let mut pick = None;
    let mut tied = 0u64;
    for i in (0..len).filter(|&i| eligible(i)) {
        match pick {
            None => {
                pick = Some(i);
                tied = 1;
            }
            Some(p) if better(i, p) => {
                pick = Some(i);
                tied = 1;
            }
            Some(p) if !better(p, i) => {
                // i ties the incumbent: keep each candidate seen so far
                // with equal probability (reservoir of size one).
                tied += 1;
                if rng.gen_range(0..tied) == 0 {
                    pick = Some(i);
                }
            }
            Some(_) => {}
        }
    }
    if tied > 1 {
        *tie_events += 1;
    }
    pick
}

/// Selects the `k` highest-scoring candidates; candidates tied at the
/// score boundary are chosen uniformly at random.
pub(crate) fn top_k_by_score<R: Rng>(
    scores: &[u64],
    k: usize,
    rng: &mut R,
    tie_events: &mut u64,
) -> Vec<usize> {
    debug_assert!(k <= scores.len());
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let boundary = scores[order[k - 1]];
    let mut chosen: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&c| scores[c] > boundary)
        .collect();
    let tied: Vec<usize> = (0..scores.len()).filter(|&c| scores[c] == boundary).collect();
    let need = k - chosen.len();
    if need < tied.len() {
        *tie_events += 1;
        chosen.extend(tied.choose_multiple(rng, need).copied());
    } else {
        chosen.extend(tied);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn argmax_is_uniform_over_ties() {
        let scores = vec![3, 7, 7, 1, 7];
        let mut hits = [0u32; 5];
        for seed in 0..3000 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut ties = 0;
            let pick = random_argmax_by(5, |_| true, &scores, &mut rng, &mut ties).unwrap();
            assert_eq!(ties, 1);
            hits[pick] += 1;
        }
        assert_eq!(hits[0], 0);
        assert_eq!(hits[3], 0);
        for &h in &[hits[1], hits[2], hits[4]] {
            assert!((800..1200).contains(&h), "skewed tie-break: {hits:?}");
        }
    }

    #[test]
    fn argmax_without_ties_is_silent() {
        let scores = vec![3, 9, 4];
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let mut ties = 0;
        assert_eq!(
            random_argmax_by(3, |_| true, &scores, &mut rng, &mut ties),
            Some(1)
        );
        assert_eq!(ties, 0);
    }

    #[test]
    fn argmin_respects_eligibility() {
        let scores = vec![5, 0, 2, 0];
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let mut ties = 0;
        let pick = random_argmin_by(4, |i| i != 1, &scores, &mut rng, &mut ties);
        assert_eq!(pick, Some(3));
        assert!(random_argmin_by(4, |_| false, &scores, &mut rng, &mut ties).is_none());
    }

    #[test]
    fn top_k_keeps_clear_winners_and_randomizes_boundary() {
        let scores = vec![9, 4, 4, 4, 1];
        let mut boundary_hits = [0u32; 5];
        for seed in 0..3000 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut ties = 0;
            let picked = top_k_by_score(&scores, 2, &mut rng, &mut ties);
            assert_eq!(ties, 1);
            assert_eq!(picked.len(), 2);
            assert!(picked.contains(&0));
            for &c in &picked {
                if c != 0 {
                    boundary_hits[c] += 1;
                }
            }
        }
        assert_eq!(boundary_hits[4], 0);
        for &h in &boundary_hits[1..4] {
            assert!((800..1200).contains(&h), "skewed boundary: {boundary_hits:?}");
        }
    }

    #[test]
    fn top_k_exact_fit_has_no_tie_event() {
        let scores = vec![5, 5, 1];
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut ties = 0;
        let mut picked = top_k_by_score(&scores, 2, &mut rng, &mut ties);
        picked.sort_unstable();
        assert_eq!(picked, vec![0, 1]);
        assert_eq!(ties, 0);
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
        }
        assert!("unknown".parse::<RuleId>().is_err());
    }
}
