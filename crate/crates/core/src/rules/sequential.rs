//! Polynomial-time rules: SNTV, Bloc, k-Borda, and STV.

use crate::election::{candidate_score, Committee, Election, ScoringFunction};
use crate::error::Result;
use crate::rules::{
    check_committee_size, random_argmax_by, random_argmin_by, top_k_by_score, RuleOutcome,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// STV election quota: a candidate holding this many first places among
/// the remaining voters is seated.
pub fn quota(num_voters: usize, k: usize) -> usize {
    num_voters / (k + 1) + 1
}

fn best_k_by_scoring<R: Rng>(
    election: &Election,
    scoring: ScoringFunction,
    k: usize,
    rng: &mut R,
) -> Result<RuleOutcome> {
    check_committee_size(election, k)?;
    let scores: Vec<u64> = (0..election.num_candidates())
        .map(|c| candidate_score(election, scoring, c))
        .collect::<Result<_>>()?;
    let mut tie_events = 0;
    let members = top_k_by_score(&scores, k, rng, &mut tie_events);
    Ok(RuleOutcome {
        committee: Committee::new(members, election.num_candidates())?,
        tie_events,
    })
}

/// Top k candidates by Plurality score.
pub fn sntv<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    let scoring = ScoringFunction::plurality(election.num_candidates())?;
    best_k_by_scoring(election, scoring, k, rng)
}

/// Top k candidates by k-Approval score.
pub fn bloc<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    check_committee_size(election, k)?;
    let scoring = ScoringFunction::t_approval(k, election.num_candidates())?;
    best_k_by_scoring(election, scoring, k, rng)
}

/// Top k candidates by Borda score.
pub fn k_borda<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    let scoring = ScoringFunction::borda(election.num_candidates());
    best_k_by_scoring(election, scoring, k, rng)
}

/// One step of an STV count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StvStep {
    /// A candidate reached the quota; exactly `removed_voters` of its
    /// current supporters leave the count.
    Elected {
        candidate: usize,
        removed_voters: Vec<usize>,
    },
    /// Nobody reached the quota; the lowest-Plurality candidate leaves.
    Eliminated { candidate: usize },
    /// Active candidates equal the open seats; all are elected.
    ElectedRemaining { candidates: Vec<usize> },
    /// Voters ran out; open seats are filled at random.
    FilledRandomly { candidates: Vec<usize> },
}

/// Mutable state of one STV count over a fixed election.
///
/// The quota is computed once from the original voter count and never
/// recomputed, so it stays fixed while voters are removed.
#[derive(Debug, Clone)]
pub struct StvState<'a> {
    election: &'a Election,
    k: usize,
    q: usize,
    candidate_active: Vec<bool>,
    active_candidates: usize,
    voter_active: Vec<bool>,
    active_voters: usize,
    /// Per-voter cursor into its ranking, pointing at or before the
    /// first still-active candidate.
    cursor: Vec<usize>,
    elected: Vec<usize>,
    tie_events: u64,
}

impl<'a> StvState<'a> {
    pub fn new(election: &'a Election, k: usize) -> Result<Self> {
        check_committee_size(election, k)?;
        let m = election.num_candidates();
        let n = election.num_voters();
        Ok(StvState {
            election,
            k,
            q: quota(n, k),
            candidate_active: vec![true; m],
            active_candidates: m,
            voter_active: vec![true; n],
            active_voters: n,
            cursor: vec![0; n],
            elected: Vec::new(),
            tie_events: 0,
        })
    }

    pub fn quota(&self) -> usize {
        self.q
    }

    pub fn elected(&self) -> &[usize] {
        &self.elected
    }

    pub fn tie_events(&self) -> u64 {
        self.tie_events
    }

    pub fn is_complete(&self) -> bool {
        self.elected.len() == self.k
    }

    fn deactivate(&mut self, candidate: usize) {
        debug_assert!(self.candidate_active[candidate]);
        self.candidate_active[candidate] = false;
        self.active_candidates -= 1;
    }

    fn elect(&mut self, candidate: usize) {
        self.deactivate(candidate);
        self.elected.push(candidate);
    }

    /// Advances cursors and tallies supporters of each active candidate.
    fn tally_supporters(&mut self) -> Vec<Vec<usize>> {
        let mut supporters = vec![Vec::new(); self.election.num_candidates()];
        for v in 0..self.voter_active.len() {
            if !self.voter_active[v] {
                continue;
            }
            let ranking = self.election.voter(v).ranking();
            while !self.candidate_active[ranking[self.cursor[v]]] {
                self.cursor[v] += 1;
            }
            supporters[ranking[self.cursor[v]]].push(v);
        }
        supporters
    }

    /// Runs one round. Returns `None` once k candidates are elected.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> Option<StvStep> {
        if self.is_complete() {
            return None;
        }
        let seats_left = self.k - self.elected.len();

        if self.active_candidates == seats_left {
            let remaining: Vec<usize> = (0..self.candidate_active.len())
                .filter(|&c| self.candidate_active[c])
                .collect();
            for &c in &remaining {
                self.elect(c);
            }
            return Some(StvStep::ElectedRemaining {
                candidates: remaining,
            });
        }

        if self.active_voters == 0 {
            let pool: Vec<usize> = (0..self.candidate_active.len())
                .filter(|&c| self.candidate_active[c])
                .collect();
            self.tie_events += 1;
            let mut chosen: Vec<usize> =
                pool.choose_multiple(rng, seats_left).copied().collect();
            chosen.sort_unstable();
            for &c in &chosen {
                self.elect(c);
            }
            return Some(StvStep::FilledRandomly { candidates: chosen });
        }

        let supporters = self.tally_supporters();
        let m = self.election.num_candidates();
        let scores: Vec<u64> = (0..m).map(|c| supporters[c].len() as u64).collect();

        let active_flags = &self.candidate_active;
        let best = random_argmax_by(
            m,
            |c| active_flags[c],
            &scores,
            rng,
            &mut self.tie_events,
        )
        .expect("at least one candidate is active");
        if scores[best] as usize >= self.q {
            let mut removed: Vec<usize> = if supporters[best].len() > self.q {
                self.tie_events += 1;
                supporters[best]
                    .choose_multiple(rng, self.q)
                    .copied()
                    .collect()
            } else {
                supporters[best].clone()
            };
            removed.sort_unstable();
            for &v in &removed {
                self.voter_active[v] = false;
            }
            self.active_voters -= removed.len();
            self.elect(best);
            return Some(StvStep::Elected {
                candidate: best,
                removed_voters: removed,
            });
        }

        let active_flags = &self.candidate_active;
        let worst = random_argmin_by(
            m,
            |c| active_flags[c],
            &scores,
            rng,
            &mut self.tie_events,
        )
        .expect("at least one candidate is active");
        self.deactivate(worst);
        Some(StvStep::Eliminated { candidate: worst })
    }
}

/// Single transferable vote with quota-based surplus removal.
pub fn stv<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    let mut state = StvState::new(election, k)?;
    while state.step(rng).is_some() {}
    Ok(RuleOutcome {
        committee: Committee::new(state.elected.clone(), election.num_candidates())?,
        tie_events: state.tie_events,
    })
}
