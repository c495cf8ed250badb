//! Command-line runner for multiwinner voting experiments.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use multiwinner::metrics::quadrant_variance;
use multiwinner::rules::exact::brute_force_best;
use multiwinner::rules::{evaluate, OptimizerConfig, RuleId};
use multiwinner::sampling::build_election;
use multiwinner::{cc_score, gyb_assignment, hb_score, monroe_assignment, RngStream};

use multiwinner_cli::config::{resolve, ExperimentConfig};
use multiwinner_cli::error::{CliError, Result};
use multiwinner_cli::{io, render, runner};

#[derive(Parser)]
#[command(
    name = "multiwinner",
    version,
    about = "Multiwinner voting rules over planar Euclidean elections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep; writes grid CSVs, PGM heatmaps, a stats
    /// CSV, and a manifest with content hashes.
    Run(RunArgs),
    /// Evaluate one rule on a single election read from a points CSV.
    Solve(SolveArgs),
    /// Convert a grid CSV into a grayscale PGM heatmap.
    Render(RenderArgs),
    /// Brute-force the optimal committee of a small instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rule id, repeatable: sntv, stv, bloc, k_borda, exact_cc,
    /// exact_monroe, exact_hb, greedy_cc, algorithm_p, ranging_cc,
    /// greedy_monroe.
    #[arg(long = "rule")]
    rules: Vec<String>,
    /// Distribution id, repeatable: gaussian, square, disc,
    /// four_gaussian, overlapping_squares.
    #[arg(long = "dist")]
    distributions: Vec<String>,
    /// Number of candidates.
    #[arg(short = 'm', long)]
    candidates: Option<usize>,
    /// Number of voters.
    #[arg(short = 'n', long)]
    voters: Option<usize>,
    /// Committee size, repeatable for sweeps.
    #[arg(short = 'k', long = "committee-size")]
    committee_sizes: Vec<usize>,
    /// Elections per (rule, distribution, k) cell.
    #[arg(long)]
    elections: Option<u64>,
    /// Master seed; every cell and election derives its own substreams.
    #[arg(long)]
    seed: Option<u64>,
    /// Arctan intensity scale for rendered heatmaps.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Worker threads; 0 means one per core.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Points CSV (role,x,y) defining the election.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Sample a fresh election from this distribution instead of
    /// reading --points.
    #[arg(long)]
    dist: Option<String>,
    /// Number of candidates when sampling with --dist.
    #[arg(short = 'm', long, default_value_t = 200)]
    candidates: usize,
    /// Number of voters when sampling with --dist.
    #[arg(short = 'n', long, default_value_t = 200)]
    voters: usize,
    /// Rule id to evaluate.
    #[arg(long)]
    rule: String,
    /// Committee size.
    #[arg(short = 'k', long = "committee-size")]
    k: usize,
    /// Seed for sampling, ranking ties, and rule tie-breaks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write a scatter image of the election and winners.
    #[arg(long)]
    render: Option<PathBuf>,
    /// Also write the election's ideal points as a points CSV.
    #[arg(long)]
    export_points: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Grid CSV as written by `run`.
    #[arg(long)]
    grid: PathBuf,
    /// Output PGM path.
    #[arg(long)]
    out: PathBuf,
    /// Arctan intensity scale.
    #[arg(long, default_value_t = multiwinner::metrics::DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct OracleArgs {
    /// Points CSV (role,x,y) defining the election.
    #[arg(long)]
    points: PathBuf,
    /// Committee size.
    #[arg(short = 'k', long = "committee-size")]
    k: usize,
    /// Objective to maximize: cc, monroe, or hb.
    #[arg(long)]
    objective: String,
    /// Seed for ranking ties in the points-to-election step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Render(args) => cmd_render(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn merged_config(args: RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if !args.rules.is_empty() {
        cfg.rules = args.rules;
    }
    if !args.distributions.is_empty() {
        cfg.distributions = args.distributions;
    }
    if !args.committee_sizes.is_empty() {
        cfg.committee_sizes = args.committee_sizes;
    }
    if let Some(m) = args.candidates {
        cfg.num_candidates = m;
    }
    if let Some(n) = args.voters {
        cfg.num_voters = n;
    }
    if let Some(e) = args.elections {
        cfg.num_elections = e;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(eps) = args.epsilon {
        cfg.epsilon = eps;
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let resolved = resolve(merged_config(args)?)?;
    let out_dir = resolved.out_dir.clone();
    let manifest = runner::run_experiment(&resolved)?;
    for cell in &manifest.cells {
        let mean = cell
            .mean_variance
            .map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "{}/{} k={}: mean quadrant variance {} over {} elections ({} ms, {} ties)",
            cell.rule,
            cell.distribution,
            cell.k,
            mean,
            cell.num_elections,
            cell.wall_ms,
            cell.tie_events
        );
    }
    for warning in &manifest.warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "wrote {} files and manifest.json to {}",
        manifest.files.len(),
        out_dir.display()
    );
    Ok(())
}

fn election_from_points(path: &PathBuf, seed: u64) -> Result<multiwinner::Election> {
    let (candidates, voters) = io::read_points(path)?;
    let stream = RngStream::new(seed, "points-csv", 0);
    build_election(&candidates, &voters, &mut stream.sampling_rng()).map_err(CliError::from)
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let rule = RuleId::from_str(&args.rule).map_err(CliError::Config)?;
    let (election, stream) = match (&args.points, &args.dist) {
        (Some(path), None) => (
            election_from_points(path, args.seed)?,
            RngStream::new(args.seed, "points-csv", 0),
        ),
        (None, Some(name)) => {
            let dist = multiwinner::DistributionId::from_str(name).map_err(CliError::Config)?;
            let stream = RngStream::new(args.seed, "solve-sample", 0);
            let election = multiwinner::generate_election(
                dist,
                args.candidates,
                args.voters,
                &mut stream.sampling_rng(),
            )?;
            (election, stream)
        }
        _ => {
            return Err(CliError::Config(
                "exactly one of --points or --dist is required".to_string(),
            ))
        }
    };
    let outcome = evaluate(
        rule,
        &election,
        args.k,
        &mut stream.rule_rng(),
        &OptimizerConfig::default(),
    )?;

    let members: Vec<String> = outcome
        .committee
        .members()
        .iter()
        .map(|c| c.to_string())
        .collect();
    println!("winners: {}", members.join(" "));
    println!("tie_events: {}", outcome.tie_events);
    let points = election.committee_points(&outcome.committee)?;
    println!("quadrant_variance: {}", quadrant_variance(&points)?);

    // Representative loads: balanced assignment for the Monroe rules,
    // grab-your-best for everything else.
    let loads = match rule {
        RuleId::ExactMonroe | RuleId::GreedyMonroe => {
            monroe_assignment(&election, &outcome.committee)?.0.member_loads()
        }
        _ => gyb_assignment(&election, &outcome.committee).member_loads(),
    };
    let loads: Vec<String> = loads.iter().map(|l| l.to_string()).collect();
    println!("representative_loads: {}", loads.join(" "));

    if let Some(path) = args.render {
        render::render_sample_run(&election, outcome.committee.members(), &path)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = args.export_points {
        let candidates = election
            .candidate_points()
            .ok_or_else(|| CliError::Config("election has no point data".to_string()))?;
        let voters = election
            .voter_points()
            .ok_or_else(|| CliError::Config("election has no point data".to_string()))?;
        io::write_points(candidates, voters, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_render(args: RenderArgs) -> Result<()> {
    if !(args.epsilon > 0.0) || !args.epsilon.is_finite() {
        return Err(CliError::Config(format!(
            "epsilon must be positive and finite, got {}",
            args.epsilon
        )));
    }
    let grid = io::read_grid(
        &args.grid,
        multiwinner::metrics::DEFAULT_EXTENT_LO,
        multiwinner::metrics::DEFAULT_EXTENT_HI,
        args.epsilon,
    )?;
    render::render_histogram(&grid, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let election = election_from_points(&args.points, args.seed)?;
    let n = election.num_voters();
    let scorer: Box<dyn FnMut(&multiwinner::Election, &multiwinner::Committee) -> f64> =
        match args.objective.as_str() {
            "cc" => Box::new(|e, w| cc_score(e, w) as f64),
            "monroe" => {
                if args.k > n {
                    return Err(CliError::Config(format!(
                        "monroe needs k <= voters, got k={} and {n} voters",
                        args.k
                    )));
                }
                Box::new(|e, w| {
                    let (_, score) = monroe_assignment(e, w).expect("sizes checked");
                    score as f64
                })
            }
            "hb" => Box::new(hb_score),
            other => {
                return Err(CliError::Config(format!(
                    "unknown objective {other:?}; use cc, monroe, or hb"
                )))
            }
        };
    let best = brute_force_best(&election, args.k, scorer)?;
    let members: Vec<String> = best.members().iter().map(|c| c.to_string()).collect();
    println!("optimal: {}", members.join(" "));
    let score = match args.objective.as_str() {
        "cc" => cc_score(&election, &best) as f64,
        "monroe" => monroe_assignment(&election, &best)?.1 as f64,
        _ => hb_score(&election, &best),
    };
    println!("score: {score}");
    Ok(())
}
