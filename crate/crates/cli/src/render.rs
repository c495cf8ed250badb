//! Grayscale PGM emitters: histogram heatmaps and single-election
//! scatter plots. PGM (P5, maxval 255) keeps the rasters bit-exact and
//! dependency-free.

use std::fs;
use std::path::Path;

use multiwinner::metrics::HistogramGrid;
use multiwinner::{Election, Point};

use crate::error::{CliError, Result};

/// Side length of scatter images, in pixels.
const SCATTER_SIZE: usize = 600;
/// Scatter plots always show the full support, whatever the points.
const SCATTER_EXTENT: (f64, f64) = (-3.0, 3.0);

const VOTER_GRAY: u8 = 96;
const CANDIDATE_GRAY: u8 = 190;
const WINNER_GRAY: u8 = 0;
const VOTER_RADIUS: i64 = 2;
const CANDIDATE_RADIUS: i64 = 2;
const WINNER_RADIUS: i64 = 5;

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    fs::write(path, encode_pgm(width, height, pixels)).map_err(|e| CliError::io(path, e))
}

pub fn histogram_pixels(grid: &HistogramGrid) -> Vec<u8> {
    let bins = grid.bins();
    let mut pixels = Vec::with_capacity(bins * bins);
    for top_row in 0..bins {
        let row = bins - 1 - top_row;
        for col in 0..bins {
            let y = grid.intensity_at(col, row);
            pixels.push((255.0 * (1.0 - y)).round() as u8);
        }
    }
    pixels
}

/// Writes the grid as a square grayscale image: darker is more frequent,
/// row 0 is the top of the y-extent.
pub fn render_histogram(grid: &HistogramGrid, path: &Path) -> Result<()> {
    write_pgm(path, grid.bins(), grid.bins(), &histogram_pixels(grid))
}

struct Canvas {
    pixels: Vec<u8>,
}

impl Canvas {
    fn new() -> Self {
        Canvas {
            pixels: vec![255; SCATTER_SIZE * SCATTER_SIZE],
        }
    }

    /// Pixel coordinates of a point; outside points land on the border.
    fn locate(point: Point) -> (i64, i64) {
        let (lo, hi) = SCATTER_EXTENT;
        let scale = SCATTER_SIZE as f64 / (hi - lo);
        let clamp = |v: f64| (v.floor() as i64).clamp(0, SCATTER_SIZE as i64 - 1);
        let px = clamp((point.x - lo) * scale);
        let py_up = clamp((point.y - lo) * scale);
        (px, SCATTER_SIZE as i64 - 1 - py_up)
    }

    fn mark(&mut self, point: Point, radius: i64, gray: u8) {
        let (cx, cy) = Canvas::locate(point);
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                if dx * dx + dy * dy > radius * radius {
                    continue;
                }
                let (x, y) = (cx + dx, cy + dy);
                if (0..SCATTER_SIZE as i64).contains(&x) && (0..SCATTER_SIZE as i64).contains(&y)
                {
                    self.pixels[y as usize * SCATTER_SIZE + x as usize] = gray;
                }
            }
        }
    }
}

pub fn scatter_pixels(election: &Election, winners: &[usize]) -> Result<Vec<u8>> {
    let candidates = election.candidate_points().ok_or_else(|| {
        CliError::Config("election has no candidate point data to plot".to_string())
    })?;
    let voters = election
        .voter_points()
        .ok_or_else(|| CliError::Config("election has no voter point data to plot".to_string()))?;
    for &w in winners {
        if w >= candidates.len() {
            return Err(CliError::Config(format!(
                "winner index {w} out of range for {} candidates",
                candidates.len()
            )));
        }
    }

    let mut canvas = Canvas::new();
    for &p in candidates {
        canvas.mark(p, CANDIDATE_RADIUS, CANDIDATE_GRAY);
    }
    for &p in voters {
        canvas.mark(p, VOTER_RADIUS, VOTER_GRAY);
    }
    for &w in winners {
        canvas.mark(candidates[w], WINNER_RADIUS, WINNER_GRAY);
    }
    Ok(canvas.pixels)
}

/// Scatter plot of one election: voters dark gray, candidates light
/// gray, winners as larger black marks, fixed extent [-3, 3]².
pub fn render_sample_run(election: &Election, winners: &[usize], path: &Path) -> Result<()> {
    let pixels = scatter_pixels(election, winners)?;
    write_pgm(path, SCATTER_SIZE, SCATTER_SIZE, &pixels)
}
