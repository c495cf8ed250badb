//! Election domain types and committee-level score evaluation.
//!
//! Candidates are dense 0-based indices; ranking positions are 1-based, so
//! a voter's favorite candidate sits at position 1 and the Borda score of
//! position `j` is `m - j`.

use crate::error::{Error, Result};
use crate::flow::MinCostFlow;

/// A location in the two-dimensional issue space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFinitePoint { x, y });
        }
        Ok(Point { x, y })
    }

    /// Squared Euclidean distance. Comparing squared distances orders
    /// points exactly like comparing distances, without the square root.
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// One voter's strict ranking of all candidates, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceOrder {
    ranking: Vec<usize>,
    /// candidate -> 0-based index into `ranking`; inverse permutation.
    position: Vec<usize>,
}

impl PreferenceOrder {
    /// Builds an order from a permutation of `0..ranking.len()`.
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let m = ranking.len();
        let mut position = vec![usize::MAX; m];
        for (idx, &c) in ranking.iter().enumerate() {
            if c >= m || position[c] != usize::MAX {
                return Err(Error::NotAPermutation { num_candidates: m });
            }
            position[c] = idx;
        }
        Ok(PreferenceOrder { ranking, position })
    }

    pub fn num_candidates(&self) -> usize {
        self.ranking.len()
    }

    /// Candidates from most to least preferred.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// 1-based position of `candidate` in this ranking.
    pub fn position_of(&self, candidate: usize) -> Result<usize> {
        if candidate >= self.position.len() {
            return Err(Error::CandidateOutOfRange {
                candidate,
                num_candidates: self.position.len(),
            });
        }
        Ok(self.position[candidate] + 1)
    }

    /// 0-based position; `candidate` must be in range.
    pub(crate) fn pos0(&self, candidate: usize) -> usize {
        self.position[candidate]
    }
}

/// An election: `m` candidates, a full ranking per voter, and optionally
/// the ideal points the rankings were generated from.
#[derive(Debug, Clone)]
pub struct Election {
    num_candidates: usize,
    voters: Vec<PreferenceOrder>,
    candidate_points: Option<Vec<Point>>,
    voter_points: Option<Vec<Point>>,
}

impl Election {
    pub fn new(num_candidates: usize, voters: Vec<PreferenceOrder>) -> Result<Self> {
        if num_candidates == 0 || voters.is_empty() {
            return Err(Error::EmptyElection);
        }
        for (i, v) in voters.iter().enumerate() {
            if v.num_candidates() != num_candidates {
                return Err(Error::RankingLengthMismatch {
                    voter: i,
                    got: v.num_candidates(),
                    expected: num_candidates,
                });
            }
        }
        Ok(Election {
            num_candidates,
            voters,
            candidate_points: None,
            voter_points: None,
        })
    }

    /// As [`Election::new`], with the generating ideal points attached.
    pub fn with_points(
        num_candidates: usize,
        voters: Vec<PreferenceOrder>,
        candidate_points: Vec<Point>,
        voter_points: Vec<Point>,
    ) -> Result<Self> {
        let mut e = Election::new(num_candidates, voters)?;
        if candidate_points.len() != num_candidates {
            return Err(Error::PointCountMismatch {
                role: "candidate",
                got: candidate_points.len(),
                expected: num_candidates,
            });
        }
        if voter_points.len() != e.voters.len() {
            return Err(Error::PointCountMismatch {
                role: "voter",
                got: voter_points.len(),
                expected: e.voters.len(),
            });
        }
        e.candidate_points = Some(candidate_points);
        e.voter_points = Some(voter_points);
        Ok(e)
    }

    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn voters(&self) -> &[PreferenceOrder] {
        &self.voters
    }

    pub fn voter(&self, index: usize) -> &PreferenceOrder {
        &self.voters[index]
    }

    pub fn candidate_points(&self) -> Option<&[Point]> {
        self.candidate_points.as_deref()
    }

    pub fn voter_points(&self) -> Option<&[Point]> {
        self.voter_points.as_deref()
    }

    /// Ideal points of the committee members, in member order.
    pub fn committee_points(&self, committee: &Committee) -> Result<Vec<Point>> {
        let points = self.candidate_points.as_ref().ok_or(Error::MissingPointData)?;
        Ok(committee.members().iter().map(|&c| points[c]).collect())
    }
}

/// A positional scoring function over `m` candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoringFunction {
    /// Position `j` scores `m - j`.
    Borda { num_candidates: usize },
    /// Position `j` scores 1 if `j <= t`, else 0.
    TApproval { t: usize, num_candidates: usize },
}

impl ScoringFunction {
    pub fn borda(num_candidates: usize) -> Self {
        ScoringFunction::Borda { num_candidates }
    }

    pub fn t_approval(t: usize, num_candidates: usize) -> Result<Self> {
        if t == 0 || t > num_candidates {
            return Err(Error::ThresholdOutOfRange { t, num_candidates });
        }
        Ok(ScoringFunction::TApproval { t, num_candidates })
    }

    /// 1-Approval.
    pub fn plurality(num_candidates: usize) -> Result<Self> {
        ScoringFunction::t_approval(1, num_candidates)
    }

    pub fn num_candidates(&self) -> usize {
        match *self {
            ScoringFunction::Borda { num_candidates } => num_candidates,
            ScoringFunction::TApproval { num_candidates, .. } => num_candidates,
        }
    }

    /// Score of 1-based position `pos`.
    pub fn at_position(&self, pos: usize) -> u64 {
        debug_assert!(pos >= 1 && pos <= self.num_candidates());
        match *self {
            ScoringFunction::Borda { num_candidates } => (num_candidates - pos) as u64,
            ScoringFunction::TApproval { t, .. } => u64::from(pos <= t),
        }
    }
}

/// A set of `k` distinct candidates, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Committee {
    members: Vec<usize>,
}

impl Committee {
    pub fn new(members: impl Into<Vec<usize>>, num_candidates: usize) -> Result<Self> {
        let mut members = members.into();
        if members.is_empty() {
            return Err(Error::EmptyCommittee);
        }
        members.sort_unstable();
        for pair in members.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateMember { candidate: pair[0] });
            }
        }
        if let Some(&last) = members.last() {
            if last >= num_candidates {
                return Err(Error::CandidateOutOfRange {
                    candidate: last,
                    num_candidates,
                });
            }
        }
        Ok(Committee { members })
    }

    /// Members in ascending index order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, candidate: usize) -> bool {
        self.members.binary_search(&candidate).is_ok()
    }
}

/// A voter-to-member assignment Φ together with its committee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    rep: Vec<usize>,
    committee: Committee,
}

impl Assignment {
    pub fn new(rep: Vec<usize>, committee: Committee) -> Result<Self> {
        for (voter, &c) in rep.iter().enumerate() {
            if !committee.contains(c) {
                return Err(Error::RepresentativeNotInCommittee { voter });
            }
        }
        Ok(Assignment { rep, committee })
    }

    /// `representatives()[i]` is voter i's assigned member.
    pub fn representatives(&self) -> &[usize] {
        &self.rep
    }

    pub fn committee(&self) -> &Committee {
        &self.committee
    }

    /// Σ over voters of the Borda score each gives its representative.
    pub fn borda_score(&self, election: &Election) -> u64 {
        let m = election.num_candidates();
        self.rep
            .iter()
            .zip(election.voters())
            .map(|(&c, v)| (m - 1 - v.pos0(c)) as u64)
            .sum()
    }

    /// Number of assigned voters per committee member, in member order.
    pub fn member_loads(&self) -> Vec<usize> {
        let members = self.committee.members();
        let mut loads = vec![0usize; members.len()];
        for &c in &self.rep {
            let slot = members.binary_search(&c).expect("validated on construction");
            loads[slot] += 1;
        }
        loads
    }

    /// Number of distinct members actually used.
    pub fn image_size(&self) -> usize {
        self.member_loads().iter().filter(|&&l| l > 0).count()
    }
}

fn check_candidate(election: &Election, candidate: usize) -> Result<()> {
    if candidate >= election.num_candidates() {
        return Err(Error::CandidateOutOfRange {
            candidate,
            num_candidates: election.num_candidates(),
        });
    }
    Ok(())
}

/// Σ over voters of `scoring` applied to the candidate's position.
pub fn candidate_score(
    election: &Election,
    scoring: ScoringFunction,
    candidate: usize,
) -> Result<u64> {
    check_candidate(election, candidate)?;
    if scoring.num_candidates() != election.num_candidates() {
        return Err(Error::InvalidInput(format!(
            "scoring function is over {} candidates, election has {}",
            scoring.num_candidates(),
            election.num_candidates()
        )));
    }
    Ok(election
        .voters()
        .iter()
        .map(|v| scoring.at_position(v.pos0(candidate) + 1))
        .sum())
}

/// Grab-your-best: each voter is assigned the committee member it ranks
/// highest. This maximizes the summed Borda score over all assignments
/// into the committee.
pub fn gyb_assignment(election: &Election, committee: &Committee) -> Assignment {
    let rep = election
        .voters()
        .iter()
        .map(|v| {
            *committee
                .members()
                .iter()
                .min_by_key(|&&c| v.pos0(c))
                .expect("committee is nonempty by construction")
        })
        .collect();
    Assignment {
        rep,
        committee: committee.clone(),
    }
}

/// Chamberlin-Courant score: summed Borda score of each voter's best
/// committee member.
pub fn cc_score(election: &Election, committee: &Committee) -> u64 {
    let m = election.num_candidates();
    election
        .voters()
        .iter()
        .map(|v| {
            let best = committee
                .members()
                .iter()
                .map(|&c| v.pos0(c))
                .min()
                .expect("committee is nonempty by construction");
            (m - 1 - best) as u64
        })
        .sum()
}

/// Harmonic Borda score: per voter, members' Borda scores weighted
/// 1, 1/2, ..., 1/k by the within-committee preference rank.
pub fn hb_score(election: &Election, committee: &Committee) -> f64 {
    let m = election.num_candidates();
    let mut positions = Vec::with_capacity(committee.size());
    let mut total = 0.0;
    for v in election.voters() {
        positions.clear();
        positions.extend(committee.members().iter().map(|&c| v.pos0(c)));
        positions.sort_unstable();
        total += positions
            .iter()
            .enumerate()
            .map(|(t, &p)| (m - 1 - p) as f64 / (t + 1) as f64)
            .sum::<f64>();
    }
    total
}

/// Best balanced assignment into the committee: every member represents
/// between ⌊n/k⌋ and ⌈n/k⌉ voters, maximizing the summed Borda score.
/// Solved as a minimum-cost transportation problem with per-voter cost
/// `pos - 1` for representation by the member at position `pos`.
pub fn monroe_assignment(election: &Election, committee: &Committee) -> Result<(Assignment, u64)> {
    let n = election.num_voters();
    let m = election.num_candidates();
    let k = committee.size();
    if k > n {
        return Err(Error::MoreSeatsThanVoters { k, num_voters: n });
    }

    let lower = n / k;
    let extra = n % k; // this many members carry one voter above `lower`

    // Nodes: source, n voters, k member sinks, an overflow distributor for
    // the `extra` surplus seats, sink.
    let source = 0;
    let voter = |i: usize| 1 + i;
    let member = |j: usize| 1 + n + j;
    let overflow = 1 + n + k;
    let sink = overflow + 1;
    let mut net = MinCostFlow::new(sink + 1);

    let mut voter_edges = vec![0usize; n * k];
    for i in 0..n {
        net.add_edge(source, voter(i), 1, 0);
        let prefs = election.voter(i);
        for (j, &c) in committee.members().iter().enumerate() {
            voter_edges[i * k + j] = net.add_edge(voter(i), member(j), 1, prefs.pos0(c) as i64);
        }
    }
    // Forcing every member-to-sink edge to capacity `lower` realizes the
    // lower bound: total sink capacity is k·lower + extra = n exactly.
    for j in 0..k {
        net.add_edge(member(j), sink, lower as i64, 0);
        if extra > 0 {
            net.add_edge(member(j), overflow, 1, 0);
        }
    }
    if extra > 0 {
        net.add_edge(overflow, sink, extra as i64, 0);
    }

    let cost = net
        .solve(source, sink, n as i64)
        .expect("a balanced assignment always exists when k <= n");

    let mut rep = vec![usize::MAX; n];
    for i in 0..n {
        for (j, &c) in committee.members().iter().enumerate() {
            if net.flow_on(voter_edges[i * k + j]) > 0 {
                rep[i] = c;
                break;
            }
        }
        debug_assert_ne!(rep[i], usize::MAX);
    }

    let score = (n as u64) * (m as u64 - 1) - cost as u64;
    let assignment = Assignment {
        rep,
        committee: committee.clone(),
    };
    debug_assert_eq!(assignment.borda_score(election), score);
    Ok((assignment, score))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(ranking: &[usize]) -> PreferenceOrder {
        PreferenceOrder::new(ranking.to_vec()).unwrap()
    }

    fn election(m: usize, rankings: &[&[usize]]) -> Election {
        Election::new(m, rankings.iter().map(|r| order(r)).collect()).unwrap()
    }

    #[test]
    fn positions_are_one_based() {
        let v = order(&[0, 1, 2]);
        assert_eq!(v.position_of(0).unwrap(), 1);
        assert_eq!(v.position_of(2).unwrap(), 3);
        let w = order(&[1, 0]);
        assert_eq!(w.position_of(0).unwrap(), 2);
        assert!(w.position_of(5).is_err());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(PreferenceOrder::new(vec![0, 0, 1]).is_err());
        assert!(PreferenceOrder::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn borda_and_approval_scores() {
        let e = election(3, &[&[0, 1, 2]]);
        let borda = ScoringFunction::borda(3);
        assert_eq!(candidate_score(&e, borda, 0).unwrap(), 2);

        let e2 = election(3, &[&[0, 1, 2], &[0, 1, 2]]);
        assert_eq!(candidate_score(&e2, borda, 1).unwrap(), 2);

        let e3 = election(5, &[&[4, 3, 2, 1, 0]]);
        let two_approval = ScoringFunction::t_approval(2, 5).unwrap();
        // third-ranked candidate of the single voter
        assert_eq!(candidate_score(&e3, two_approval, 2).unwrap(), 0);
        assert_eq!(candidate_score(&e3, two_approval, 3).unwrap(), 1);
    }

    #[test]
    fn scoring_function_bounds() {
        assert!(ScoringFunction::t_approval(0, 5).is_err());
        assert!(ScoringFunction::t_approval(6, 5).is_err());
        let plu = ScoringFunction::plurality(5).unwrap();
        assert_eq!(plu.at_position(1), 1);
        assert_eq!(plu.at_position(2), 0);
    }

    #[test]
    fn committee_validation() {
        assert!(Committee::new(vec![], 3).is_err());
        assert!(Committee::new(vec![1, 1], 3).is_err());
        assert!(Committee::new(vec![3], 3).is_err());
        let w = Committee::new(vec![2, 0], 3).unwrap();
        assert_eq!(w.members(), &[0, 2]);
        assert!(w.contains(2));
        assert!(!w.contains(1));
    }

    #[test]
    fn gyb_picks_best_ranked_member() {
        let e = election(3, &[&[0, 1, 2]]);
        let w = Committee::new(vec![1, 2], 3).unwrap();
        let a = gyb_assignment(&e, &w);
        assert_eq!(a.representatives(), &[1]);

        let full = Committee::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(gyb_assignment(&e, &full).representatives(), &[0]);
    }

    #[test]
    fn cc_score_edge_cases() {
        let e = election(3, &[&[0, 1, 2], &[2, 1, 0]]);
        let full = Committee::new(vec![0, 1, 2], 3).unwrap();
        // every voter gets its favorite: n * (m - 1)
        assert_eq!(cc_score(&e, &full), 2 * 2);

        let single = election(3, &[&[0, 1, 2]]);
        let worst = Committee::new(vec![2], 3).unwrap();
        assert_eq!(cc_score(&single, &worst), 0);
    }

    #[test]
    fn cc_score_equals_assignment_maximum() {
        // m=6, n=5, k=2: compare against the best over all assignments
        // into the committee (2^n of them).
        let e = election(
            6,
            &[
                &[3, 0, 5, 1, 2, 4],
                &[1, 4, 2, 0, 5, 3],
                &[5, 2, 3, 4, 1, 0],
                &[0, 1, 4, 5, 3, 2],
                &[2, 5, 0, 3, 1, 4],
            ],
        );
        let w = Committee::new(vec![1, 5], 6).unwrap();
        let members = w.members();
        let n = e.num_voters();
        let mut best = 0u64;
        for mask in 0..(1u32 << n) {
            let mut s = 0u64;
            for i in 0..n {
                let c = members[(mask >> i & 1) as usize];
                s += (6 - 1 - e.voter(i).pos0(c)) as u64;
            }
            best = best.max(s);
        }
        assert_eq!(cc_score(&e, &w), best);
        assert_eq!(gyb_assignment(&e, &w).borda_score(&e), best);
    }

    #[test]
    fn cc_is_monotone_in_members() {
        let e = election(4, &[&[0, 1, 2, 3], &[3, 2, 1, 0], &[1, 3, 0, 2]]);
        let small = Committee::new(vec![2], 4).unwrap();
        let bigger = Committee::new(vec![2, 3], 4).unwrap();
        assert!(cc_score(&e, &bigger) >= cc_score(&e, &small));
    }

    #[test]
    fn hb_direct_formula() {
        // m=5, k=2, members at positions 1 and 2: 4 + (1/2)*3 = 5.5
        let e = election(5, &[&[0, 1, 2, 3, 4]]);
        let w = Committee::new(vec![0, 1], 5).unwrap();
        assert!((hb_score(&e, &w) - 5.5).abs() < 1e-12);
    }

    #[test]
    fn hb_with_k1_is_borda() {
        let e = election(
            6,
            &[&[3, 0, 5, 1, 2, 4], &[1, 4, 2, 0, 5, 3], &[5, 2, 3, 4, 1, 0]],
        );
        let borda = ScoringFunction::borda(6);
        for c in 0..6 {
            let w = Committee::new(vec![c], 6).unwrap();
            let expected = candidate_score(&e, borda, c).unwrap() as f64;
            assert!((hb_score(&e, &w) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn hb_matches_independent_reevaluation() {
        // m=6, n=4, k=2: re-sum per-voter terms straight from positions.
        let rankings: [&[usize]; 4] = [
            &[2, 0, 4, 5, 1, 3],
            &[5, 1, 0, 3, 2, 4],
            &[4, 3, 1, 2, 5, 0],
            &[0, 2, 5, 4, 3, 1],
        ];
        let e = election(6, &rankings);
        let w = Committee::new(vec![2, 4], 6).unwrap();
        let mut expected = 0.0;
        for v in e.voters() {
            let mut ps = [v.pos0(2) + 1, v.pos0(4) + 1];
            ps.sort_unstable();
            expected += (6 - ps[0]) as f64 + 0.5 * (6 - ps[1]) as f64;
        }
        assert!((hb_score(&e, &w) - expected).abs() < 1e-12);
    }

    #[test]
    fn monroe_k1_assigns_everyone() {
        let e = election(4, &[&[0, 1, 2, 3], &[1, 0, 3, 2], &[2, 1, 0, 3]]);
        let w = Committee::new(vec![1], 4).unwrap();
        let (a, score) = monroe_assignment(&e, &w).unwrap();
        assert_eq!(a.representatives(), &[1, 1, 1]);
        let borda = ScoringFunction::borda(4);
        assert_eq!(score, candidate_score(&e, borda, 1).unwrap());
    }

    #[test]
    fn monroe_rejects_more_seats_than_voters() {
        let e = election(4, &[&[0, 1, 2, 3], &[1, 0, 3, 2]]);
        let w = Committee::new(vec![0, 1, 2], 4).unwrap();
        assert!(matches!(
            monroe_assignment(&e, &w),
            Err(Error::MoreSeatsThanVoters { .. })
        ));
    }

    #[test]
    fn monroe_capacities_balanced() {
        // n=7, k=3: loads must be a permutation of (3, 2, 2).
        let e = election(
            5,
            &[
                &[0, 1, 2, 3, 4],
                &[4, 3, 2, 1, 0],
                &[2, 0, 1, 4, 3],
                &[1, 2, 3, 0, 4],
                &[3, 4, 0, 2, 1],
                &[0, 2, 4, 1, 3],
                &[4, 1, 3, 0, 2],
            ],
        );
        let w = Committee::new(vec![0, 2, 4], 5).unwrap();
        let (a, _) = monroe_assignment(&e, &w).unwrap();
        let mut loads = a.member_loads();
        loads.sort_unstable();
        assert_eq!(loads, vec![2, 2, 3]);
    }

    #[test]
    fn monroe_matches_exhaustive_balanced_split() {
        // m=6, n=6, k=2: enumerate all C(6,3) splits of voters between the
        // two members and compare the best total.
        let rankings: [&[usize]; 6] = [
            &[3, 0, 5, 1, 2, 4],
            &[1, 4, 2, 0, 5, 3],
            &[5, 2, 3, 4, 1, 0],
            &[0, 1, 4, 5, 3, 2],
            &[2, 5, 0, 3, 1, 4],
            &[4, 0, 1, 2, 3, 5],
        ];
        let e = election(6, &rankings);
        let w = Committee::new(vec![1, 5], 6).unwrap();
        let beta = |v: usize, c: usize| (6 - 1 - e.voter(v).pos0(c)) as u64;
        let mut best = 0u64;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let mut s = 0u64;
            for v in 0..6 {
                s += beta(v, if mask >> v & 1 == 1 { 1 } else { 5 });
            }
            best = best.max(s);
        }
        let (a, score) = monroe_assignment(&e, &w).unwrap();
        assert_eq!(score, best);
        assert_eq!(a.borda_score(&e), best);
        let mut loads = a.member_loads();
        loads.sort_unstable();
        assert_eq!(loads, vec![3, 3]);
    }

    #[test]
    fn cc_dominates_monroe() {
        let rankings: [&[usize]; 5] = [
            &[0, 3, 1, 4, 2],
            &[3, 2, 4, 0, 1],
            &[1, 0, 2, 3, 4],
            &[4, 2, 3, 1, 0],
            &[2, 4, 0, 1, 3],
        ];
        let e = election(5, &rankings);
        let w = Committee::new(vec![0, 3], 5).unwrap();
        let (_, monroe) = monroe_assignment(&e, &w).unwrap();
        assert!(cc_score(&e, &w) >= monroe);
    }
}
