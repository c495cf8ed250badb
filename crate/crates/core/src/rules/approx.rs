//! Polynomial-time approximation algorithms for the NP-hard committee
//! objectives, plus the Lambert-W threshold machinery they share.

use crate::election::{cc_score, Assignment, Committee, Election};
use crate::error::{Error, Result};
use crate::rules::{check_committee_size, random_argmax_by, RuleId, RuleOutcome};
use crate::sampling::splitmix64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::ops::RangeInclusive;

/// Principal real branch of the inverse of w ↦ w·e^w, for positive input.
pub fn lambert_w(value: f64) -> Result<f64> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::NonPositiveInput { value });
    }
    // ln(1 + v) starts at or above the root for v > 0, and Newton on the
    // convex w·e^w converges monotonically from above.
    let mut w = value.ln_1p();
    for _ in 0..64 {
        let ew = w.exp();
        let residual = w * ew - value;
        let step = residual / (ew * (1.0 + w));
        w -= step;
        if step.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// k-th harmonic number Σ_{t=1..k} 1/t.
pub fn harmonic_number(k: usize) -> f64 {
    (1..=k).map(|t| 1.0 / t as f64).sum()
}

/// The coverage thresholds swept by the ranged greedy-cover algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSchedule {
    w_k: f64,
    x_max: usize,
}

impl ThresholdSchedule {
    pub fn new(num_candidates: usize, k: usize) -> Result<Self> {
        if k == 0 || num_candidates == 0 || k > num_candidates {
            return Err(Error::CommitteeTooLarge { k, num_candidates });
        }
        let w_k = lambert_w(k as f64)?;
        let x_max = (num_candidates as f64 * w_k / k as f64).ceil() as usize;
        Ok(ThresholdSchedule {
            w_k,
            x_max: x_max.clamp(1, num_candidates),
        })
    }

    pub fn w_k(&self) -> f64 {
        self.w_k
    }

    /// Default threshold ⌈m·w(k)/k⌉; also the top of the sweep range.
    pub fn x_max(&self) -> usize {
        self.x_max
    }

    pub fn thresholds(&self) -> RangeInclusive<usize> {
        1..=self.x_max
    }
}

/// Worst-case approximation ratio of an algorithm on its objective.
#[derive(Debug, Clone, Copy)]
pub struct ApproxGuarantee {
    pub algorithm: RuleId,
    pub ratio: f64,
}

impl ApproxGuarantee {
    /// Greedy marginal-gain committee building: 1 − 1/e.
    pub fn greedy_cc() -> Self {
        ApproxGuarantee {
            algorithm: RuleId::GreedyCc,
            ratio: 1.0 - (-1.0f64).exp(),
        }
    }

    /// Threshold cover: 1 − 2·w(k)/k.
    pub fn algorithm_p(k: usize) -> Result<Self> {
        let w_k = lambert_w(k as f64)?;
        Ok(ApproxGuarantee {
            algorithm: RuleId::AlgorithmP,
            ratio: 1.0 - 2.0 * w_k / k as f64,
        })
    }

    /// Balanced greedy assignment: 1 − (k−1)/(2(m−1)) − H_k/k.
    pub fn greedy_monroe(num_candidates: usize, k: usize) -> Result<Self> {
        if num_candidates < 2 || k == 0 {
            return Err(Error::InvalidInput(format!(
                "guarantee needs m >= 2 and k >= 1, got m={num_candidates}, k={k}"
            )));
        }
        let m = num_candidates as f64;
        let kf = k as f64;
        Ok(ApproxGuarantee {
            algorithm: RuleId::GreedyMonroe,
            ratio: 1.0 - (kf - 1.0) / (2.0 * (m - 1.0)) - harmonic_number(k) / kf,
        })
    }
}

/// Greedy Chamberlin-Courant in pick order, with per-iteration marginal
/// gains. The public wrapper discards the trace.
pub(crate) fn greedy_cc_trace<R: Rng>(
    election: &Election,
    k: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<u64>, u64)> {
    check_committee_size(election, k)?;
    let m = election.num_candidates();
    let n = election.num_voters();
    // Sentinel m-1 scores zero, exactly like having no representative.
    let mut best_pos = vec![m - 1; n];
    let mut selected = vec![false; m];
    let mut picks = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);
    let mut tie_events = 0;
    for _ in 0..k {
        let marginal: Vec<u64> = (0..m)
            .map(|c| {
                if selected[c] {
                    return 0;
                }
                (0..n)
                    .map(|v| best_pos[v].saturating_sub(election.voter(v).pos0(c)) as u64)
                    .sum()
            })
            .collect();
        let pick = random_argmax_by(m, |c| !selected[c], &marginal, rng, &mut tie_events)
            .expect("k <= m leaves an unselected candidate");
        selected[pick] = true;
        picks.push(pick);
        gains.push(marginal[pick]);
        for v in 0..n {
            best_pos[v] = best_pos[v].min(election.voter(v).pos0(pick));
        }
    }
    Ok((picks, gains, tie_events))
}

/// Builds a committee by k greedy steps, each adding the candidate with
/// the highest marginal Chamberlin-Courant gain (ties random). The first
/// pick is always a Borda winner.
pub fn greedy_cc<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    let (picks, _, tie_events) = greedy_cc_trace(election, k, rng)?;
    Ok(RuleOutcome {
        committee: Committee::new(picks, election.num_candidates())?,
        tie_events,
    })
}

/// Greedy cover with a fixed position threshold `x`: each of k rounds
/// picks the candidate ranked in the top x positions by the most
/// remaining voters, then deletes the voters it covers. If the voters
/// run out, the open seats are filled uniformly at random.
pub fn algorithm_p<R: Rng>(
    election: &Election,
    k: usize,
    x: usize,
    rng: &mut R,
) -> Result<RuleOutcome> {
    check_committee_size(election, k)?;
    let m = election.num_candidates();
    let n = election.num_voters();
    if x == 0 || x > m {
        return Err(Error::ThresholdOutOfRange {
            t: x,
            num_candidates: m,
        });
    }

    let mut cover = vec![0u64; m];
    for v in election.voters() {
        for &c in &v.ranking()[..x] {
            cover[c] += 1;
        }
    }
    let mut alive = vec![true; n];
    let mut alive_count = n;
    let mut selected = vec![false; m];
    let mut members = Vec::with_capacity(k);
    let mut tie_events = 0;

    while members.len() < k {
        if alive_count == 0 {
            let pool: Vec<usize> = (0..m).filter(|&c| !selected[c]).collect();
            let need = k - members.len();
            if pool.len() > need {
                tie_events += 1;
            }
            members.extend(pool.choose_multiple(rng, need).copied());
            break;
        }
        let pick = random_argmax_by(m, |c| !selected[c], &cover, rng, &mut tie_events)
            .expect("k <= m leaves an unselected candidate");
        selected[pick] = true;
        members.push(pick);
        for v in 0..n {
            if alive[v] && election.voter(v).pos0(pick) < x {
                alive[v] = false;
                alive_count -= 1;
                for &c in &election.voter(v).ranking()[..x] {
                    cover[c] -= 1;
                }
            }
        }
    }
    Ok(RuleOutcome {
        committee: Committee::new(members, m)?,
        tie_events,
    })
}

/// One sweep entry of [`ranging_cc`]; entries come back in threshold
/// order 1..=x_max.
pub(crate) struct SweepEntry {
    pub outcome: RuleOutcome,
    pub cc: u64,
}

/// Runs the greedy cover at every threshold in the schedule, each on an
/// independent generator forked from `rng`, so the sweep order cannot
/// leak into the per-threshold results.
pub(crate) fn ranging_cc_sweep<R: Rng>(
    election: &Election,
    k: usize,
    rng: &mut R,
) -> Result<Vec<SweepEntry>> {
    let schedule = ThresholdSchedule::new(election.num_candidates(), k)?;
    let base: u64 = rng.gen();
    schedule
        .thresholds()
        .map(|x| {
            let mut state = base ^ (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let mut child = ChaCha12Rng::seed_from_u64(splitmix64(&mut state));
            let outcome = algorithm_p(election, k, x, &mut child)?;
            let cc = cc_score(election, &outcome.committee);
            Ok(SweepEntry { outcome, cc })
        })
        .collect()
}

/// Sweeps the greedy cover over all thresholds 1..=⌈m·w(k)/k⌉ and keeps
/// the committee with the best Chamberlin-Courant score (ties random).
/// The reported tie count covers the winning run plus the final
/// cross-threshold choice.
pub fn ranging_cc<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    let entries = ranging_cc_sweep(election, k, rng)?;
    let scores: Vec<u64> = entries.iter().map(|e| e.cc).collect();
    let mut tie_events = 0;
    let best = random_argmax_by(entries.len(), |_| true, &scores, rng, &mut tie_events)
        .expect("the sweep is never empty");
    let chosen = &entries[best];
    Ok(RuleOutcome {
        committee: chosen.outcome.committee.clone(),
        tie_events: chosen.outcome.tie_events + tie_events,
    })
}

/// Greedy balanced assignment: each round pairs an unselected candidate
/// with the voters ranking it highest and commits the pair with the best
/// Borda sum. Returns the assignment alongside the committee.
pub fn greedy_monroe_with_assignment<R: Rng>(
    election: &Election,
    k: usize,
    rng: &mut R,
) -> Result<(RuleOutcome, Assignment)> {
    check_committee_size(election, k)?;
    let m = election.num_candidates();
    let n = election.num_voters();
    if k > n {
        return Err(Error::MoreSeatsThanVoters { k, num_voters: n });
    }
    let lower = n / k;
    let extra = n % k;

    let mut alive: Vec<bool> = vec![true; n];
    let mut selected = vec![false; m];
    let mut rep = vec![usize::MAX; n];
    let mut members = Vec::with_capacity(k);
    let mut tie_events = 0;
    let mut positions: Vec<usize> = Vec::with_capacity(n);

    for round in 0..k {
        // The larger shares go first, matching the balanced-load bounds.
        let share = lower + usize::from(round < extra);

        let scores: Vec<u64> = (0..m)
            .map(|c| {
                if selected[c] {
                    return 0;
                }
                positions.clear();
                positions.extend(
                    (0..n)
                        .filter(|&v| alive[v])
                        .map(|v| election.voter(v).pos0(c)),
                );
                debug_assert!(positions.len() >= share);
                positions.select_nth_unstable(share - 1);
                positions[..share]
                    .iter()
                    .map(|&p| (m - 1 - p) as u64)
                    .sum()
            })
            .collect();
        let pick = random_argmax_by(m, |c| !selected[c], &scores, rng, &mut tie_events)
            .expect("k <= m leaves an unselected candidate");
        selected[pick] = true;
        members.push(pick);

        // Take the `share` voters ranking the pick highest; voters tied
        // at the boundary position are drawn uniformly.
        let mut ranked: Vec<(usize, usize)> = (0..n)
            .filter(|&v| alive[v])
            .map(|v| (election.voter(v).pos0(pick), v))
            .collect();
        ranked.sort_unstable_by_key(|&(p, _)| p);
        let boundary = ranked[share - 1].0;
        let mut taken: Vec<usize> = ranked
            .iter()
            .take_while(|&&(p, _)| p < boundary)
            .map(|&(_, v)| v)
            .collect();
        let tied: Vec<usize> = ranked
            .iter()
            .filter(|&&(p, _)| p == boundary)
            .map(|&(_, v)| v)
            .collect();
        let need = share - taken.len();
        if need < tied.len() {
            tie_events += 1;
            taken.extend(tied.choose_multiple(rng, need).copied());
        } else {
            taken.extend(tied);
        }
        for &v in &taken {
            alive[v] = false;
            rep[v] = pick;
        }
    }

    let committee = Committee::new(members, m)?;
    let assignment = Assignment::new(rep, committee.clone())?;
    Ok((
        RuleOutcome {
            committee,
            tie_events,
        },
        assignment,
    ))
}

/// As [`greedy_monroe_with_assignment`], reporting only the committee.
pub fn greedy_monroe<R: Rng>(election: &Election, k: usize, rng: &mut R) -> Result<RuleOutcome> {
    greedy_monroe_with_assignment(election, k, rng).map(|(outcome, _)| outcome)
}
