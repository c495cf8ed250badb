//! Exact winner computation for the NP-hard committee objectives
//! (Chamberlin-Courant, Monroe, harmonic Borda).
//!
//! The solver is branch-and-bound over candidate inclusion with
//! admissible per-node upper bounds, falling back to plain enumeration
//! when the committee count is small. The contract is optimality of the
//! returned score; ties among optimal committees are broken uniformly
//! at random by keeping a size-one reservoir over optimal leaves.

use crate::election::{
    candidate_score, gyb_assignment, monroe_assignment, Committee, Election, ScoringFunction,
};
use crate::error::{Error, Result};
use crate::rules::{check_committee_size, RuleOutcome};
use rand::seq::SliceRandom;
use rand::Rng;

/// Two committees whose scores differ by at most this much are tied.
/// Integer-valued objectives are exact in f64 well past this range;
/// harmonic Borda carries genuine rounding.
const TIE_TOL: f64 = 1e-9;

/// Per-node upper bound used for pruning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Relax the committee-size constraint: every voter gets its best
    /// still-allowed candidate.
    Relaxation,
    /// No pruning beyond feasibility; visits every committee.
    Trivial,
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Refuse instances with more candidates than this outright.
    pub max_exhaustive_m: usize,
    /// Enumerate directly when C(m, k) is at most this.
    pub enumeration_threshold: u64,
    pub bound: BoundKind,
    /// Abort (rather than return a non-optimal committee) after visiting
    /// this many search nodes.
    pub node_budget: Option<u64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_exhaustive_m: 24,
            enumeration_threshold: 4096,
            bound: BoundKind::Relaxation,
            node_budget: Some(50_000_000),
        }
    }
}

/// C(m, k), saturating.
fn binomial(m: u64, k: u64) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(m - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `f` on every size-k subset of 0..m in lexicographic order.
fn for_each_combination<F>(m: usize, k: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    debug_assert!(k >= 1 && k <= m);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        // Advance the rightmost index that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] < m - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

trait CommitteeObjective {
    fn score(&self, members: &[usize]) -> f64;
    /// Upper bound on the score of any size-k completion that avoids the
    /// excluded candidates. Must never underestimate (admissibility).
    fn upper_bound(&self, excluded: &[bool]) -> f64;
}

struct CcObjective<'a> {
    election: &'a Election,
}

impl CommitteeObjective for CcObjective<'_> {
    fn score(&self, members: &[usize]) -> f64 {
        let m = self.election.num_candidates();
        self.election
            .voters()
            .iter()
            .map(|v| {
                let best = members.iter().map(|&c| v.pos0(c)).min().unwrap();
                (m - 1 - best) as f64
            })
            .sum()
    }

    fn upper_bound(&self, excluded: &[bool]) -> f64 {
        best_allowed_borda_sum(self.election, excluded)
    }
}

/// Σ over voters of the Borda score of their best non-excluded candidate.
fn best_allowed_borda_sum(election: &Election, excluded: &[bool]) -> f64 {
    let m = election.num_candidates();
    election
        .voters()
        .iter()
        .map(|v| {
            let best = v
                .ranking()
                .iter()
                .find(|&&c| !excluded[c])
                .expect("fewer than k candidates excluded");
            (m - 1 - v.pos0(*best)) as f64
        })
        .sum()
}

struct MonroeObjective<'a> {
    election: &'a Election,
}

impl CommitteeObjective for MonroeObjective<'_> {
    fn score(&self, members: &[usize]) -> f64 {
        let committee = Committee::new(members.to_vec(), self.election.num_candidates())
            .expect("search builds valid committees");
        let (_, score) =
            monroe_assignment(self.election, &committee).expect("k <= n checked upfront");
        score as f64
    }

    fn upper_bound(&self, excluded: &[bool]) -> f64 {
        // Dropping the balance constraint leaves Chamberlin-Courant.
        best_allowed_borda_sum(self.election, excluded)
    }
}

struct HbObjective<'a> {
    election: &'a Election,
    k: usize,
}

impl CommitteeObjective for HbObjective<'_> {
    fn score(&self, members: &[usize]) -> f64 {
        let m = self.election.num_candidates();
        let mut positions: Vec<usize> = Vec::with_capacity(members.len());
        self.election
            .voters()
            .iter()
            .map(|v| {
                positions.clear();
                positions.extend(members.iter().map(|&c| v.pos0(c)));
                positions.sort_unstable();
                positions
                    .iter()
                    .enumerate()
                    .map(|(t, &p)| (m - 1 - p) as f64 / (t + 1) as f64)
                    .sum::<f64>()
            })
            .sum()
    }

    fn upper_bound(&self, excluded: &[bool]) -> f64 {
        // Per voter, harmonically weight its k best allowed positions.
        // The committee's t-th best position can never beat the t-th
        // best allowed position, and the weights decrease, so this
        // dominates every completion's score.
        let m = self.election.num_candidates();
        self.election
            .voters()
            .iter()
            .map(|v| {
                let mut total = 0.0;
                let mut t = 0;
                for &c in v.ranking() {
                    if excluded[c] {
                        continue;
                    }
                    total += (m - 1 - v.pos0(c)) as f64 / (t + 1) as f64;
                    t += 1;
                    if t == self.k {
                        break;
                    }
                }
                total
            })
            .sum()
    }
}

/// Reservoir of size one over equal-score committees, so every optimal
/// leaf is retained with the same probability.
struct Incumbent {
    score: f64,
    pick: Vec<usize>,
    optima_seen: u64,
}

impl Incumbent {
    fn new() -> Self {
        Incumbent {
            score: f64::NEG_INFINITY,
            pick: Vec::new(),
            optima_seen: 0,
        }
    }

    fn offer<R: Rng>(&mut self, members: &[usize], score: f64, rng: &mut R) {
        if score > self.score + TIE_TOL {
            self.score = score;
            self.pick = members.to_vec();
            self.optima_seen = 1;
        } else if score >= self.score - TIE_TOL {
            self.optima_seen += 1;
            if rng.gen_range(0..self.optima_seen) == 0 {
                self.pick = members.to_vec();
            }
        }
    }

    fn tie_events(&self) -> u64 {
        u64::from(self.optima_seen > 1)
    }
}

struct Search<'a, O, R: Rng> {
    obj: &'a O,
    order: &'a [usize],
    k: usize,
    use_bound: bool,
    node_budget: Option<u64>,
    nodes: u64,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
    incumbent: Incumbent,
    rng: &'a mut R,
}

impl<O: CommitteeObjective, R: Rng> Search<'_, O, R> {
    fn charge_node(&mut self) -> Result<()> {
        self.nodes += 1;
        match self.node_budget {
            Some(budget) if self.nodes > budget => Err(Error::BudgetExceeded { budget }),
            _ => Ok(()),
        }
    }

    fn recurse(&mut self, idx: usize) -> Result<()> {
        self.charge_node()?;
        if self.chosen.len() == self.k {
            let score = self.obj.score(&self.chosen);
            self.incumbent.offer(&self.chosen, score, self.rng);
            return Ok(());
        }
        let remaining = self.order.len() - idx;
        if self.chosen.len() + remaining < self.k {
            return Ok(());
        }
        // Strict inequality: a subtree tying the incumbent may hold more
        // optimal committees the reservoir still needs to see.
        if self.use_bound
            && self.incumbent.optima_seen > 0
            && self.obj.upper_bound(&self.excluded) < self.incumbent.score - TIE_TOL
        {
            return Ok(());
        }
        let c = self.order[idx];
        self.chosen.push(c);
        self.recurse(idx + 1)?;
        self.chosen.pop();
        self.excluded[c] = true;
        self.recurse(idx + 1)?;
        self.excluded[c] = false;
        Ok(())
    }
}

fn optimize<O, R>(
    election: &Election,
    k: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
    obj: &O,
) -> Result<(Committee, f64, u64)>
where
    O: CommitteeObjective,
    R: Rng,
{
    check_committee_size(election, k)?;
    let m = election.num_candidates();
    if m > cfg.max_exhaustive_m {
        return Err(Error::InfeasibleScale {
            num_candidates: m,
            limit: cfg.max_exhaustive_m,
        });
    }

    let mut incumbent = Incumbent::new();
    let nodes_needed = binomial(m as u64, k as u64);
    if nodes_needed <= cfg.enumeration_threshold {
        let mut visited = 0u64;
        for_each_combination(m, k, |members| {
            if let Some(budget) = cfg.node_budget {
                visited += 1;
                if visited > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
            }
            let score = obj.score(members);
            incumbent.offer(members, score, rng);
            Ok(())
        })?;
    } else {
        // Branch on candidates in decreasing Borda order so strong
        // incumbents appear early.
        let borda = ScoringFunction::borda(m);
        let scores: Vec<u64> = (0..m)
            .map(|c| candidate_score(election, borda, c))
            .collect::<Result<_>>()?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));

        let mut search = Search {
            obj,
            order: &order,
            k,
            use_bound: matches!(cfg.bound, BoundKind::Relaxation),
            node_budget: cfg.node_budget,
            nodes: 0,
            chosen: Vec::with_capacity(k),
            excluded: vec![false; m],
            incumbent: Incumbent::new(),
            rng,
        };
        search.recurse(0)?;
        incumbent = search.incumbent;
    }

    let ties = incumbent.tie_events();
    let committee = Committee::new(incumbent.pick, m)?;
    Ok((committee, incumbent.score, ties))
}

/// Maximizes the Chamberlin-Courant score. If the optimal assignment
/// uses fewer than k distinct representatives, the committee is padded
/// with uniformly random additional candidates.
pub fn exact_cc<R: Rng>(
    election: &Election,
    k: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
) -> Result<RuleOutcome> {
    let obj = CcObjective { election };
    let (committee, _, mut tie_events) = optimize(election, k, rng, cfg, &obj)?;

    let assignment = gyb_assignment(election, &committee);
    let mut used: Vec<usize> = assignment.representatives().to_vec();
    used.sort_unstable();
    used.dedup();
    if used.len() < k {
        let pool: Vec<usize> =
            (0..election.num_candidates()).filter(|c| !used.contains(c)).collect();
        let need = k - used.len();
        if pool.len() > need {
            tie_events += 1;
        }
        used.extend(pool.choose_multiple(rng, need).copied());
        let committee = Committee::new(used, election.num_candidates())?;
        return Ok(RuleOutcome {
            committee,
            tie_events,
        });
    }
    Ok(RuleOutcome {
        committee,
        tie_events,
    })
}

/// Maximizes the Monroe score (Chamberlin-Courant under balanced loads).
pub fn exact_monroe<R: Rng>(
    election: &Election,
    k: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
) -> Result<RuleOutcome> {
    if k > election.num_voters() {
        return Err(Error::MoreSeatsThanVoters {
            k,
            num_voters: election.num_voters(),
        });
    }
    let obj = MonroeObjective { election };
    let (committee, _, tie_events) = optimize(election, k, rng, cfg, &obj)?;
    Ok(RuleOutcome {
        committee,
        tie_events,
    })
}

/// Maximizes the harmonic Borda score.
pub fn exact_hb<R: Rng>(
    election: &Election,
    k: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
) -> Result<RuleOutcome> {
    let obj = HbObjective { election, k };
    let (committee, _, tie_events) = optimize(election, k, rng, cfg, &obj)?;
    Ok(RuleOutcome {
        committee,
        tie_events,
    })
}

/// Enumerates every size-k committee and returns one maximizing
/// `score_fn`; among ties, the first in lexicographic member order, so
/// the oracle is deterministic.
pub fn brute_force_best<F>(election: &Election, k: usize, mut score_fn: F) -> Result<Committee>
where
    F: FnMut(&Election, &Committee) -> f64,
{
    const LIMIT: u64 = 2_000_000;
    check_committee_size(election, k)?;
    let m = election.num_candidates();
    if binomial(m as u64, k as u64) > LIMIT {
        return Err(Error::BudgetExceeded { budget: LIMIT });
    }
    let mut best: Option<(f64, Committee)> = None;
    for_each_combination(m, k, |members| {
        let committee = Committee::new(members.to_vec(), m)?;
        let score = score_fn(election, &committee);
        match &best {
            Some((s, _)) if score <= *s + TIE_TOL => {}
            _ => best = Some((score, committee)),
        }
        Ok(())
    })?;
    Ok(best.expect("k >= 1 guarantees at least one committee").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{cc_score, hb_score, PreferenceOrder};
    use crate::sampling::{generate_election, DistributionId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn election(m: usize, rankings: &[&[usize]]) -> Election {
        Election::new(
            m,
            rankings
                .iter()
                .map(|r| PreferenceOrder::new(r.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn forced_branch_and_bound() -> OptimizerConfig {
        OptimizerConfig {
            enumeration_threshold: 0,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(8, 0), 1);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(200, 20), u64::MAX); // saturates
    }

    #[test]
    fn combination_enumeration_is_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| {
            seen.push(c.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
        assert_eq!(sorted, seen);
    }

    #[test]
    fn brute_force_constant_score_is_lexicographic_first() {
        let e = election(4, &[&[0, 1, 2, 3]]);
        let w = brute_force_best(&e, 2, |_, _| 1.0).unwrap();
        assert_eq!(w.members(), &[0, 1]);
    }

    #[test]
    fn brute_force_full_committee() {
        let e = election(3, &[&[2, 1, 0]]);
        let w = brute_force_best(&e, 3, |e, w| cc_score(e, w) as f64).unwrap();
        assert_eq!(w.members(), &[0, 1, 2]);
    }

    #[test]
    fn exact_cc_k1_is_borda_winner() {
        for seed in 0..20 {
            let e = generate_election(DistributionId::Gaussian, 8, 9, &mut rng(seed)).unwrap();
            let out = exact_cc(&e, 1, &mut rng(seed + 100), &OptimizerConfig::default()).unwrap();
            let borda = ScoringFunction::borda(8);
            let best = (0..8)
                .map(|c| candidate_score(&e, borda, c).unwrap())
                .max()
                .unwrap();
            let member = out.committee.members()[0];
            assert_eq!(candidate_score(&e, borda, member).unwrap(), best);
        }
    }

    #[test]
    fn exact_cc_identical_voters_supplements_randomly() {
        let rankings: Vec<Vec<usize>> = (0..6).map(|_| (0..5).collect()).collect();
        let e = Election::new(
            5,
            rankings
                .into_iter()
                .map(|r| PreferenceOrder::new(r).unwrap())
                .collect(),
        )
        .unwrap();
        let mut seen = [false; 5];
        for seed in 0..60 {
            let out = exact_cc(&e, 3, &mut rng(seed), &OptimizerConfig::default()).unwrap();
            assert_eq!(out.committee.size(), 3);
            assert!(out.committee.contains(0), "everyone's favorite must sit");
            assert!(out.tie_events >= 1);
            for &c in out.committee.members() {
                seen[c] = true;
            }
        }
        assert!(seen[1] && seen[2] && seen[3] && seen[4]);
    }

    #[test]
    fn exact_cc_matches_brute_force() {
        for seed in 0..25 {
            let e = generate_election(DistributionId::UniformSquare, 10, 10, &mut rng(seed))
                .unwrap();
            let out = exact_cc(&e, 3, &mut rng(seed + 500), &forced_branch_and_bound()).unwrap();
            let oracle = brute_force_best(&e, 3, |e, w| cc_score(e, w) as f64).unwrap();
            assert_eq!(cc_score(&e, &out.committee), cc_score(&e, &oracle));
        }
    }

    #[test]
    fn exact_monroe_matches_brute_force() {
        for seed in 0..15 {
            let e = generate_election(DistributionId::UniformSquare, 8, 8, &mut rng(seed)).unwrap();
            let out =
                exact_monroe(&e, 2, &mut rng(seed + 500), &forced_branch_and_bound()).unwrap();
            let oracle = brute_force_best(&e, 2, |e, w| {
                monroe_assignment(e, w).unwrap().1 as f64
            })
            .unwrap();
            assert_eq!(
                monroe_assignment(&e, &out.committee).unwrap().1,
                monroe_assignment(&e, &oracle).unwrap().1
            );
        }
    }

    #[test]
    fn exact_monroe_n_equals_k_is_perfect_matching() {
        let e = generate_election(DistributionId::Gaussian, 6, 3, &mut rng(8)).unwrap();
        let out = exact_monroe(&e, 3, &mut rng(9), &OptimizerConfig::default()).unwrap();
        let (a, _) = monroe_assignment(&e, &out.committee).unwrap();
        let mut loads = a.member_loads();
        loads.sort_unstable();
        assert_eq!(loads, vec![1, 1, 1]);
    }

    #[test]
    fn exact_monroe_rejects_k_above_n() {
        let e = generate_election(DistributionId::Gaussian, 6, 2, &mut rng(8)).unwrap();
        assert!(matches!(
            exact_monroe(&e, 3, &mut rng(9), &OptimizerConfig::default()),
            Err(Error::MoreSeatsThanVoters { .. })
        ));
    }

    #[test]
    fn exact_hb_matches_brute_force() {
        for seed in 0..15 {
            let e = generate_election(DistributionId::Gaussian, 10, 8, &mut rng(seed)).unwrap();
            let out = exact_hb(&e, 3, &mut rng(seed + 500), &forced_branch_and_bound()).unwrap();
            let oracle = brute_force_best(&e, 3, |e, w| hb_score(e, w)).unwrap();
            assert!((hb_score(&e, &out.committee) - hb_score(&e, &oracle)).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_hb_full_committee_is_forced() {
        let e = generate_election(DistributionId::Gaussian, 5, 4, &mut rng(3)).unwrap();
        let out = exact_hb(&e, 5, &mut rng(4), &OptimizerConfig::default()).unwrap();
        assert_eq!(out.committee.members(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn exact_hb_invariant_under_voter_permutation() {
        let e = generate_election(DistributionId::UniformDisc, 9, 7, &mut rng(21)).unwrap();
        let reversed = Election::new(9, e.voters().iter().rev().cloned().collect()).unwrap();
        let a = exact_hb(&e, 2, &mut rng(5), &OptimizerConfig::default()).unwrap();
        let b = exact_hb(&reversed, 2, &mut rng(6), &OptimizerConfig::default()).unwrap();
        assert!((hb_score(&e, &a.committee) - hb_score(&reversed, &b.committee)).abs() < 1e-9);
    }

    #[test]
    fn cc_dominates_monroe_at_optimum() {
        for seed in 0..10 {
            let e = generate_election(DistributionId::FourGaussian, 8, 6, &mut rng(seed)).unwrap();
            let cc = exact_cc(&e, 2, &mut rng(seed), &OptimizerConfig::default()).unwrap();
            let mo = exact_monroe(&e, 2, &mut rng(seed), &OptimizerConfig::default()).unwrap();
            assert!(
                cc_score(&e, &cc.committee) >= monroe_assignment(&e, &mo.committee).unwrap().1
            );
        }
    }

    #[test]
    fn infeasible_scale_is_refused() {
        let e = generate_election(DistributionId::Gaussian, 30, 5, &mut rng(1)).unwrap();
        assert!(matches!(
            exact_cc(&e, 2, &mut rng(2), &OptimizerConfig::default()),
            Err(Error::InfeasibleScale { .. })
        ));
    }

    #[test]
    fn node_budget_aborts_explicitly() {
        let e = generate_election(DistributionId::Gaussian, 12, 6, &mut rng(1)).unwrap();
        let cfg = OptimizerConfig {
            node_budget: Some(10),
            enumeration_threshold: 0,
            ..OptimizerConfig::default()
        };
        assert!(matches!(
            exact_cc(&e, 4, &mut rng(2), &cfg),
            Err(Error::BudgetExceeded { budget: 10 })
        ));
    }

    #[test]
    fn optimal_ties_are_sampled_uniformly() {
        // Two clones of the favorite: committees {0} and {1} tie for CC
        // at k=1... make it k=1 with two identical-position candidates:
        // every voter ranks 0 and 1 adjacently via duplicated points is
        // not expressible with strict orders, so instead use 2 voters
        // with mirrored rankings; {0} and {1} tie.
        let e = election(2, &[&[0, 1], &[1, 0]]);
        let mut hits = [0u32; 2];
        for seed in 0..2000 {
            let out = exact_cc(&e, 1, &mut rng(seed), &OptimizerConfig::default()).unwrap();
            assert_eq!(out.tie_events, 1);
            hits[out.committee.members()[0]] += 1;
        }
        for &h in &hits {
            assert!((850..1150).contains(&h), "skewed optimum sampling: {hits:?}");
        }
    }
}
