//! Aggregate statistics over many elections: winner-position histograms
//! with an arctan intensity transform, and per-committee quadrant
//! variance.

use crate::election::Point;
use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

pub const DEFAULT_BINS: usize = 120;
pub const DEFAULT_EXTENT_LO: f64 = -3.0;
pub const DEFAULT_EXTENT_HI: f64 = 3.0;
pub const DEFAULT_EPSILON: f64 = 0.0004;

/// Square grid of winner-position counts over a fixed extent.
///
/// Cells are half-open on both axes; the upper extent boundary folds
/// into the last cell. Points outside the extent are clamped to the
/// nearest boundary cell and counted in `clamped_points`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramGrid {
    bins: usize,
    lo: f64,
    hi: f64,
    epsilon: f64,
    /// Row-major; row = y cell from the low edge, column = x cell.
    cells: Vec<u64>,
    total: u64,
    clamped: u64,
}

impl HistogramGrid {
    pub fn new(bins: usize, lo: f64, hi: f64, epsilon: f64) -> Result<Self> {
        if bins == 0 || !(lo < hi) || !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "invalid grid geometry: bins={bins}, extent=[{lo}, {hi}], epsilon={epsilon}"
            )));
        }
        Ok(HistogramGrid {
            bins,
            lo,
            hi,
            epsilon,
            cells: vec![0; bins * bins],
            total: 0,
            clamped: 0,
        })
    }

    /// Rebuilds a grid from stored cell counts, e.g. a grid CSV read back
    /// from disk. The total is the sum of the counts; clamp information is
    /// not recoverable and resets to zero.
    pub fn from_cells(
        bins: usize,
        lo: f64,
        hi: f64,
        epsilon: f64,
        cells: Vec<u64>,
    ) -> Result<Self> {
        let mut grid = HistogramGrid::new(bins, lo, hi, epsilon)?;
        if cells.len() != bins * bins {
            return Err(Error::GridMismatch(format!(
                "expected {} cells for a {bins}x{bins} grid, got {}",
                bins * bins,
                cells.len()
            )));
        }
        grid.total = cells.iter().sum();
        grid.cells = cells;
        Ok(grid)
    }

    /// The 120-cell grid over [-3, 3]² with ε = 0.0004.
    pub fn with_default_geometry() -> Self {
        HistogramGrid::new(
            DEFAULT_BINS,
            DEFAULT_EXTENT_LO,
            DEFAULT_EXTENT_HI,
            DEFAULT_EPSILON,
        )
        .expect("default geometry is valid")
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn cell_size(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Total frequency T: the sum of all cells.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// How many accumulated points fell outside the extent.
    pub fn clamped_points(&self) -> u64 {
        self.clamped
    }

    /// Count in the cell at x-index `col`, y-index `row` (from the low
    /// edge).
    pub fn count_at(&self, col: usize, row: usize) -> u64 {
        self.cells[row * self.bins + col]
    }

    /// Row-major cell counts, y rows from the low edge.
    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    fn index_of(&self, coord: f64) -> (usize, bool) {
        if coord < self.lo {
            return (0, true);
        }
        if coord > self.hi {
            return (self.bins - 1, true);
        }
        // Multiplying by bins/(hi-lo) instead of dividing by the cell
        // size keeps the scale exact for the default geometry, so points
        // like (0, 0) land in the cell whose low edge is 0.
        let scale = self.bins as f64 / (self.hi - self.lo);
        let idx = ((coord - self.lo) * scale).floor() as usize;
        (idx.min(self.bins - 1), false)
    }

    /// Adds one point to the grid.
    pub fn add_point(&mut self, point: Point) {
        let (col, cx) = self.index_of(point.x);
        let (row, cy) = self.index_of(point.y);
        self.cells[row * self.bins + col] += 1;
        self.total += 1;
        if cx || cy {
            self.clamped += 1;
        }
    }

    /// Intensity of one cell under the arctan transform; 0 for an empty
    /// grid.
    pub fn intensity_at(&self, col: usize, row: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        intensity_transform(
            self.count_at(col, row) as f64,
            self.epsilon,
            self.total as f64,
        )
    }
}

/// Accumulates every winner point into the grid.
pub fn accumulate_histogram(grid: &mut HistogramGrid, winner_points: &[Point]) {
    for &p in winner_points {
        grid.add_point(p);
    }
}

/// Maps a cell frequency `x` to an intensity in [0, 1):
/// y = (2/π)·arctan(x / (ε·T)).
pub fn intensity_transform(frequency: f64, epsilon: f64, total: f64) -> f64 {
    debug_assert!(epsilon > 0.0 && total > 0.0);
    (frequency / (epsilon * total)).atan() / FRAC_PI_2
}

/// Counts points per quadrant; coordinates equal to zero go to the
/// nonnegative side. Order: (+,+), (-,+), (-,-), (+,-).
pub fn quadrant_counts(points: &[Point]) -> Result<[u64; 4]> {
    if points.is_empty() {
        return Err(Error::EmptyCommittee);
    }
    let mut counts = [0u64; 4];
    for p in points {
        let east = p.x >= 0.0;
        let north = p.y >= 0.0;
        let q = match (east, north) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        };
        counts[q] += 1;
    }
    Ok(counts)
}

/// Population variance (divide by 4) of the four quadrant counts.
pub fn quadrant_variance(committee_points: &[Point]) -> Result<f64> {
    let counts = quadrant_counts(committee_points)?;
    let mean = counts.iter().sum::<u64>() as f64 / 4.0;
    Ok(counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / 4.0)
}

/// Cellwise sum of two grids with identical geometry.
pub fn merge_histograms(a: &HistogramGrid, b: &HistogramGrid) -> Result<HistogramGrid> {
    if a.bins != b.bins || a.lo != b.lo || a.hi != b.hi || a.epsilon != b.epsilon {
        return Err(Error::GridMismatch(format!(
            "{}x{} over [{}, {}] (eps {}) vs {}x{} over [{}, {}] (eps {})",
            a.bins, a.bins, a.lo, a.hi, a.epsilon, b.bins, b.bins, b.lo, b.hi, b.epsilon
        )));
    }
    let mut merged = a.clone();
    for (c, &other) in merged.cells.iter_mut().zip(&b.cells) {
        *c += other;
    }
    merged.total += b.total;
    merged.clamped += b.clamped;
    Ok(merged)
}

/// Per-election quadrant-variance samples for one (rule, distribution,
/// k) cell of the experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadrantStats {
    samples: Vec<f64>,
}

impl QuadrantStats {
    pub fn new() -> Self {
        QuadrantStats::default()
    }

    pub fn push(&mut self, variance: f64) {
        self.samples.push(variance);
    }

    /// Records one committee's quadrant variance.
    pub fn record(&mut self, committee_points: &[Point]) -> Result<()> {
        self.push(quadrant_variance(committee_points)?);
        Ok(())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.samples.is_empty() {
            return None;
        }
        Some(self.samples.iter().sum::<f64>() / self.samples.len() as f64)
    }

    /// Standard deviation of the samples (n−1 denominator).
    pub fn sample_stddev(&self) -> Option<f64> {
        let n = self.samples.len();
        if n < 2 {
            return None;
        }
        let mean = self.mean().expect("nonempty");
        let ss: f64 = self.samples.iter().map(|s| (s - mean).powi(2)).sum();
        Some((ss / (n - 1) as f64).sqrt())
    }

    /// Appends the other cell's samples (order matters for byte-stable
    /// output; callers concatenate in election-index order).
    pub fn extend_from(&mut self, other: &QuadrantStats) {
        self.samples.extend_from_slice(&other.samples);
    }
}
