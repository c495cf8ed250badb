//! Plain-text artifacts: grid CSV, stats CSV, and point-set CSV.
//!
//! Grids are written as `bins` rows of `bins` comma-separated integer
//! counts, top row first (highest y), matching the rendered images.

use std::fs;
use std::path::Path;

use multiwinner::metrics::{HistogramGrid, QuadrantStats};
use multiwinner::Point;

use crate::error::{CliError, Result};

pub const STATS_HEADER: &str = "rule,distribution,k,mean_variance,n_samples,sample_stddev";
pub const POINTS_HEADER: &str = "role,x,y";

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn grid_to_csv(grid: &HistogramGrid) -> String {
    let bins = grid.bins();
    let mut out = String::new();
    for top_row in 0..bins {
        let row = bins - 1 - top_row;
        for col in 0..bins {
            if col > 0 {
                out.push(',');
            }
            out.push_str(&grid.count_at(col, row).to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_grid(grid: &HistogramGrid, path: &Path) -> Result<()> {
    write_text(path, &grid_to_csv(grid))
}

/// Reads a grid CSV back into a histogram over the given geometry.
pub fn read_grid(path: &Path, lo: f64, hi: f64, epsilon: f64) -> Result<HistogramGrid> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let bins = rows.len();
    let mut cells = vec![0u64; bins * bins];
    for (top_row, line) in rows.iter().enumerate() {
        let row = bins - 1 - top_row;
        let mut col = 0;
        for field in line.split(',') {
            if col >= bins {
                return Err(CliError::Config(format!(
                    "{}: row {top_row} has more than {bins} columns",
                    path.display()
                )));
            }
            let count: u64 = field.trim().parse().map_err(|_| {
                CliError::Config(format!(
                    "{}: bad count {field:?} at row {top_row}, column {col}",
                    path.display()
                ))
            })?;
            cells[row * bins + col] = count;
            col += 1;
        }
        if col != bins {
            return Err(CliError::Config(format!(
                "{}: row {top_row} has {col} columns, expected {bins}",
                path.display()
            )));
        }
    }
    HistogramGrid::from_cells(bins, lo, hi, epsilon, cells).map_err(CliError::from)
}

/// One stats-CSV row: a (rule, distribution, k) cell and its variance
/// samples.
pub struct StatsRow {
    pub rule: String,
    pub distribution: String,
    pub k: usize,
    pub stats: QuadrantStats,
}

pub fn stats_to_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for row in rows {
        let mean = row.stats.mean().map(|v| v.to_string()).unwrap_or_default();
        let stddev = row
            .stats
            .sample_stddev()
            .map(|v| v.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.rule,
            row.distribution,
            row.k,
            mean,
            row.stats.len(),
            stddev
        ));
    }
    out
}

pub fn write_stats(rows: &[StatsRow], path: &Path) -> Result<()> {
    write_text(path, &stats_to_csv(rows))
}

pub fn points_to_csv(candidates: &[Point], voters: &[Point]) -> String {
    let mut out = String::from(POINTS_HEADER);
    out.push('\n');
    for p in candidates {
        out.push_str(&format!("candidate,{},{}\n", p.x, p.y));
    }
    for p in voters {
        out.push_str(&format!("voter,{},{}\n", p.x, p.y));
    }
    out
}

pub fn write_points(candidates: &[Point], voters: &[Point], path: &Path) -> Result<()> {
    write_text(path, &points_to_csv(candidates, voters))
}

/// Reads a points CSV into (candidates, voters).
pub fn read_points(path: &Path) -> Result<(Vec<Point>, Vec<Point>)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == POINTS_HEADER => {}
        _ => {
            return Err(CliError::Config(format!(
                "{}: expected header {POINTS_HEADER:?}",
                path.display()
            )))
        }
    }
    let mut candidates = Vec::new();
    let mut voters = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Config(format!(
                "{}: line {} has {} fields, expected 3",
                path.display(),
                idx + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| {
                CliError::Config(format!(
                    "{}: bad coordinate {s:?} on line {}",
                    path.display(),
                    idx + 1
                ))
            })
        };
        let point = Point::new(parse(fields[1])?, parse(fields[2])?)
            .map_err(|e| CliError::Config(e.to_string()))?;
        match fields[0].trim() {
            "candidate" => candidates.push(point),
            "voter" => voters.push(point),
            other => {
                return Err(CliError::Config(format!(
                    "{}: unknown role {other:?} on line {}",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    Ok((candidates, voters))
}
