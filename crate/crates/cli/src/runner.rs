//! Seeded parallel experiment execution.
//!
//! Each (rule, distribution, k) cell gets its own stream family keyed by
//! a cell tag, and each election index within the cell gets independent
//! sampling and tie-breaking substreams. Workers map election indices to
//! results; reduction happens serially in index order, so the output
//! bytes do not depend on the worker count.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use multiwinner::metrics::{quadrant_variance, HistogramGrid, QuadrantStats};
use multiwinner::rules::{evaluate, OptimizerConfig, RuleId};
use multiwinner::sampling::generate_election;
use multiwinner::{DistributionId, Point, RngStream};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ResolvedConfig};
use crate::error::{CliError, Result};
use crate::io::{write_grid, write_stats, StatsRow};
use crate::render::render_histogram;

/// Accumulated results of one (rule, distribution, k) cell.
#[derive(Debug)]
pub struct CellOutput {
    pub grid: HistogramGrid,
    pub stats: QuadrantStats,
    pub tie_events: u64,
}

/// The stream-family tag for one cell. Election `i` of this cell is
/// reproducible from (master_seed, tag, i) alone, so cells can be
/// recomputed independently and prefixes agree across replication
/// counts.
pub fn cell_tag(rule: RuleId, dist: DistributionId, m: usize, n: usize, k: usize) -> String {
    format!("{rule}/{dist}/m{m}/n{n}/k{k}")
}

/// Checks exact rules against the optimizer's hard size limit before any
/// work is spent.
pub fn check_feasible(rule: RuleId, m: usize, optimizer: &OptimizerConfig) -> Result<()> {
    if rule.is_exact() && m > optimizer.max_exhaustive_m {
        return Err(CliError::Infeasible(format!(
            "{rule} is exact and infeasible at m={m} (limit {}); use an approximation \
             (greedy_cc, algorithm_p, ranging_cc, greedy_monroe) or reduce m, n, and k",
            optimizer.max_exhaustive_m
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_cell(
    rule: RuleId,
    dist: DistributionId,
    m: usize,
    n: usize,
    k: usize,
    num_elections: u64,
    master_seed: u64,
    grid_bins: usize,
    extent: (f64, f64),
    epsilon: f64,
    optimizer: &OptimizerConfig,
) -> Result<CellOutput> {
    check_feasible(rule, m, optimizer)?;
    let tag = cell_tag(rule, dist, m, n, k);

    let per_election: Vec<(Vec<Point>, f64, u64)> = (0..num_elections)
        .into_par_iter()
        .map(|index| -> Result<(Vec<Point>, f64, u64)> {
            let stream = RngStream::new(master_seed, &tag, index);
            let election = generate_election(dist, m, n, &mut stream.sampling_rng())?;
            let outcome = evaluate(rule, &election, k, &mut stream.rule_rng(), optimizer)?;
            let points = election.committee_points(&outcome.committee)?;
            let variance = quadrant_variance(&points)?;
            Ok((points, variance, outcome.tie_events))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut grid = HistogramGrid::new(grid_bins, extent.0, extent.1, epsilon)
        .map_err(CliError::from)?;
    let mut stats = QuadrantStats::new();
    let mut tie_events = 0u64;
    for (points, variance, ties) in per_election {
        for p in points {
            grid.add_point(p);
        }
        stats.push(variance);
        tie_events += ties;
    }
    Ok(CellOutput {
        grid,
        stats,
        tie_events,
    })
}

#[derive(Debug, Serialize)]
pub struct CellReport {
    pub rule: String,
    pub distribution: String,
    pub k: usize,
    pub num_elections: u64,
    pub tie_events: u64,
    pub clamped_points: u64,
    pub mean_variance: Option<f64>,
    pub wall_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub warnings: Vec<String>,
    /// Lowercase hex SHA-256 of every output file, keyed by file name.
    pub files: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn hash_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Runs the full sweep, writes one grid CSV and one PGM per cell plus a
/// combined stats CSV, and returns the manifest (also written as
/// manifest.json; the manifest file itself is not hashed because it
/// contains wall times).
pub fn run_experiment(cfg: &ResolvedConfig) -> Result<RunManifest> {
    for &rule in &cfg.rules {
        check_feasible(rule, cfg.num_candidates, &cfg.optimizer)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;

    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    let mut files = BTreeMap::new();
    let mut stats_rows = Vec::new();

    for &rule in &cfg.rules {
        for &dist in &cfg.distributions {
            for &k in &cfg.committee_sizes {
                let started = Instant::now();
                let out = pool.install(|| {
                    run_cell(
                        rule,
                        dist,
                        cfg.num_candidates,
                        cfg.num_voters,
                        k,
                        cfg.num_elections,
                        cfg.master_seed,
                        cfg.grid_bins,
                        cfg.extent,
                        cfg.epsilon,
                        &cfg.optimizer,
                    )
                })?;
                let wall_ms = started.elapsed().as_millis();

                let stem = format!("{rule}_{dist}_k{k}");
                let grid_name = format!("{stem}_grid.csv");
                let image_name = format!("{stem}.pgm");
                let grid_path = cfg.out_dir.join(&grid_name);
                let image_path = cfg.out_dir.join(&image_name);
                write_grid(&out.grid, &grid_path)?;
                render_histogram(&out.grid, &image_path)?;
                files.insert(grid_name, hash_file(&grid_path)?);
                files.insert(image_name, hash_file(&image_path)?);

                if out.grid.clamped_points() > 0 {
                    warnings.push(format!(
                        "{stem}: {} winner positions fell outside the extent and were \
                         clamped to boundary cells",
                        out.grid.clamped_points()
                    ));
                }
                cells.push(CellReport {
                    rule: rule.to_string(),
                    distribution: dist.to_string(),
                    k,
                    num_elections: cfg.num_elections,
                    tie_events: out.tie_events,
                    clamped_points: out.grid.clamped_points(),
                    mean_variance: out.stats.mean(),
                    wall_ms,
                });
                stats_rows.push(StatsRow {
                    rule: rule.to_string(),
                    distribution: dist.to_string(),
                    k,
                    stats: out.stats,
                });
            }
        }
    }

    let stats_path = cfg.out_dir.join("stats.csv");
    write_stats(&stats_rows, &stats_path)?;
    files.insert("stats.csv".to_string(), hash_file(&stats_path)?);

    let manifest = RunManifest {
        config: cfg.raw.clone(),
        cells,
        warnings,
        files,
    };
    let manifest_path = cfg.out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Config(format!("manifest: {e}")))?;
    fs::write(&manifest_path, text).map_err(|e| CliError::io(&manifest_path, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{resolve, ExperimentConfig};
    use multiwinner::metrics::DEFAULT_EPSILON;

    fn small_config(out_dir: std::path::PathBuf, threads: usize) -> ResolvedConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.rules = vec!["sntv".to_string(), "greedy_cc".to_string()];
        cfg.distributions = vec!["gaussian".to_string()];
        cfg.num_candidates = 12;
        cfg.num_voters = 10;
        cfg.committee_sizes = vec![3];
        cfg.num_elections = 25;
        cfg.master_seed = 77;
        cfg.threads = threads;
        cfg.out_dir = out_dir;
        resolve(cfg).unwrap()
    }

    #[test]
    fn zero_elections_yield_valid_empty_outputs() {
        let out = run_cell(
            RuleId::Sntv,
            DistributionId::Gaussian,
            10,
            10,
            2,
            0,
            1,
            120,
            (-3.0, 3.0),
            DEFAULT_EPSILON,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(out.grid.total(), 0);
        assert!(out.stats.is_empty());
        assert_eq!(out.tie_events, 0);
    }

    #[test]
    fn cell_totals_count_every_winner() {
        let out = run_cell(
            RuleId::KBorda,
            DistributionId::UniformSquare,
            15,
            9,
            4,
            13,
            7,
            120,
            (-3.0, 3.0),
            DEFAULT_EPSILON,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(out.grid.total(), 13 * 4);
        assert_eq!(out.stats.len(), 13);
    }

    #[test]
    fn replication_prefixes_agree() {
        let short = run_cell(
            RuleId::Stv,
            DistributionId::UniformDisc,
            12,
            11,
            3,
            6,
            3,
            120,
            (-3.0, 3.0),
            DEFAULT_EPSILON,
            &OptimizerConfig::default(),
        )
        .unwrap();
        let long = run_cell(
            RuleId::Stv,
            DistributionId::UniformDisc,
            12,
            11,
            3,
            10,
            3,
            120,
            (-3.0, 3.0),
            DEFAULT_EPSILON,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(short.stats.samples(), &long.stats.samples()[..6]);
    }

    #[test]
    fn exact_rule_at_scale_is_refused_with_guidance() {
        let err = run_cell(
            RuleId::ExactCc,
            DistributionId::Gaussian,
            200,
            200,
            20,
            1,
            1,
            120,
            (-3.0, 3.0),
            DEFAULT_EPSILON,
            &OptimizerConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("approximation"));
    }

    #[test]
    fn manifest_hashes_match_files_and_runs_reproduce() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = run_experiment(&small_config(dir_a.path().to_path_buf(), 1)).unwrap();
        let b = run_experiment(&small_config(dir_b.path().to_path_buf(), 3)).unwrap();

        for (name, recorded) in &a.files {
            assert_eq!(&hash_file(&dir_a.path().join(name)).unwrap(), recorded);
        }
        // Different worker counts and directories, same bytes.
        assert_eq!(a.files, b.files);
        assert_eq!(a.cells.len(), 2);
        assert!(dir_a.path().join("manifest.json").exists());
        assert!(dir_a.path().join("stats.csv").exists());
    }
}
