//! Ideal-point sampling and conversion of point sets into elections.
//!
//! Each election draws from its own [`RngStream`], identified by
//! (master seed, experiment tag, election index). Streams are realized
//! as independent ChaCha12 streams, so results do not depend on how
//! elections are scheduled across threads.

use crate::election::{Election, Point, PreferenceOrder};
use crate::error::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

/// Which side of an asymmetric distribution a point set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Candidates,
    Voters,
}

/// A fully parameterized planar point distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionSpec {
    /// Standard normal around the origin.
    Gaussian,
    /// Uniform on [-3, 3]².
    UniformSquare,
    /// Uniform over the disc of radius 3 around the origin.
    UniformDisc,
    /// Four Gaussians with σ = 0.5 and means (±1, 0), (0, ±1); each mean
    /// generates a quarter of every point set (not an i.i.d. mixture).
    FourGaussian,
    /// Candidates uniform on [-3, 1]², voters uniform on [-1, 3]².
    OverlappingSquares(Role),
}

const FOUR_GAUSSIAN_MEANS: [(f64, f64); 4] = [(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0), (0.0, 1.0)];

impl DistributionSpec {
    /// Samples the point at `index` within its point set. Only
    /// FourGaussian is index-dependent: point sets cycle through the four
    /// means so that each generates a quarter of the set.
    fn sample_at<R: Rng>(&self, index: usize, rng: &mut R) -> Point {
        let (x, y) = match *self {
            DistributionSpec::Gaussian => {
                (rng.sample(StandardNormal), rng.sample(StandardNormal))
            }
            DistributionSpec::UniformSquare => {
                (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
            }
            DistributionSpec::UniformDisc => {
                // Inverse-CDF radius keeps the draw count fixed at two,
                // unlike rejection sampling, which matters for replay.
                let r = 3.0 * rng.gen::<f64>().sqrt();
                let angle = rng.gen_range(0.0..TAU);
                (r * angle.cos(), r * angle.sin())
            }
            DistributionSpec::FourGaussian => {
                let (mx, my) = FOUR_GAUSSIAN_MEANS[index % 4];
                let dx: f64 = rng.sample(StandardNormal);
                let dy: f64 = rng.sample(StandardNormal);
                (mx + 0.5 * dx, my + 0.5 * dy)
            }
            DistributionSpec::OverlappingSquares(role) => {
                let (lo, hi) = match role {
                    Role::Candidates => (-3.0, 1.0),
                    Role::Voters => (-1.0, 3.0),
                };
                (rng.gen_range(lo..hi), rng.gen_range(lo..hi))
            }
        };
        Point { x, y }
    }
}

/// The named distribution families of the experiment harness, mapping to
/// a candidate-side and a voter-side [`DistributionSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionId {
    Gaussian,
    UniformSquare,
    UniformDisc,
    FourGaussian,
    OverlappingSquares,
}

impl DistributionId {
    pub const ALL: [DistributionId; 5] = [
        DistributionId::Gaussian,
        DistributionId::UniformSquare,
        DistributionId::UniformDisc,
        DistributionId::FourGaussian,
        DistributionId::OverlappingSquares,
    ];

    pub fn candidate_spec(&self) -> DistributionSpec {
        match self {
            DistributionId::Gaussian => DistributionSpec::Gaussian,
            DistributionId::UniformSquare => DistributionSpec::UniformSquare,
            DistributionId::UniformDisc => DistributionSpec::UniformDisc,
            DistributionId::FourGaussian => DistributionSpec::FourGaussian,
            DistributionId::OverlappingSquares => {
                DistributionSpec::OverlappingSquares(Role::Candidates)
            }
        }
    }

    pub fn voter_spec(&self) -> DistributionSpec {
        match self {
            DistributionId::OverlappingSquares => {
                DistributionSpec::OverlappingSquares(Role::Voters)
            }
            other => other.candidate_spec(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionId::Gaussian => "gaussian",
            DistributionId::UniformSquare => "square",
            DistributionId::UniformDisc => "disc",
            DistributionId::FourGaussian => "four_gaussian",
            DistributionId::OverlappingSquares => "overlapping_squares",
        }
    }
}

impl fmt::Display for DistributionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gaussian" => Ok(DistributionId::Gaussian),
            "square" | "uniform_square" => Ok(DistributionId::UniformSquare),
            "disc" | "uniform_disc" => Ok(DistributionId::UniformDisc),
            "four_gaussian" => Ok(DistributionId::FourGaussian),
            "overlapping_squares" => Ok(DistributionId::OverlappingSquares),
            other => Err(format!(
                "unknown distribution '{other}' (expected one of: gaussian, square, disc, \
                 four_gaussian, overlapping_squares)"
            )),
        }
    }
}

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_key(master_seed: u64, experiment: &str) -> [u8; 32] {
    // FNV-1a over the tag, folded with the seed, expanded by splitmix64.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in experiment.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut state = h ^ master_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Seeded randomness for one election within one experiment.
///
/// The sampling generator covers point generation and distance
/// tie-breaking; the rule generator covers the rule's own random
/// tie-breaks. Keeping them separate means changing a rule never
/// perturbs the sampled elections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    key: [u8; 32],
    election_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, experiment: &str, election_index: u64) -> Self {
        RngStream {
            key: derive_key(master_seed, experiment),
            election_index,
        }
    }

    pub fn election_index(&self) -> u64 {
        self.election_index
    }

    pub fn sampling_rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::from_seed(self.key);
        rng.set_stream(2 * self.election_index);
        rng
    }

    pub fn rule_rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::from_seed(self.key);
        rng.set_stream(2 * self.election_index + 1);
        rng
    }
}

/// Draws `count` points from `spec`; all specs are i.i.d. except
/// `FourGaussian`, which cycles its means by point index.
pub fn sample_points<R: Rng>(spec: DistributionSpec, count: usize, rng: &mut R) -> Vec<Point> {
    (0..count).map(|i| spec.sample_at(i, rng)).collect()
}

/// Ranks candidates for every voter by increasing Euclidean distance.
/// Exact distance ties are ordered uniformly at random.
pub fn build_election<R: Rng>(
    candidate_points: &[Point],
    voter_points: &[Point],
    rng: &mut R,
) -> Result<Election> {
    let m = candidate_points.len();
    let mut voters = Vec::with_capacity(voter_points.len());
    let mut dist_sq = vec![0.0f64; m];
    for vp in voter_points {
        for (c, cp) in candidate_points.iter().enumerate() {
            dist_sq[c] = vp.dist_sq(cp);
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| dist_sq[a].total_cmp(&dist_sq[b]));
        // Shuffle each run of exactly equal distances; the result is a
        // uniformly random order within every tied group.
        let mut i = 0;
        while i < m {
            let mut j = i + 1;
            while j < m && dist_sq[order[j]] == dist_sq[order[i]] {
                j += 1;
            }
            if j - i > 1 {
                order[i..j].shuffle(rng);
            }
            i = j;
        }
        voters.push(PreferenceOrder::new(order)?);
    }
    Election::with_points(
        m,
        voters,
        candidate_points.to_vec(),
        voter_points.to_vec(),
    )
}

/// Samples candidate and voter ideal points from `dist` and builds the
/// induced election.
pub fn generate_election<R: Rng>(
    dist: DistributionId,
    num_candidates: usize,
    num_voters: usize,
    rng: &mut R,
) -> Result<Election> {
    let candidates = sample_points(dist.candidate_spec(), num_candidates, rng);
    let voters = sample_points(dist.voter_spec(), num_voters, rng);
    build_election(&candidates, &voters, rng)
}
