//! `probrobust`: loss evaluation, ERM-style learning, complexity
//! estimation, construction generation, perturbation-model conversion, and
//! seeded experiments, all emitting JSON/CSV artifacts.
//!
//! Exit codes: 0 success (or verdict pass), 1 verdict fail, 2 usage or
//! input-file error, 3 budget or validation error.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use probrobust_core::learners::TieBreak;

#[derive(Parser)]
#[command(
    name = "probrobust",
    version,
    about = "Probabilistically robust losses, proper learners, and desk-scale learnability experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the empirical risk of a hypothesis on a dataset.
    Eval(EvalArgs),
    /// Run an ERM-style learner over a hypothesis class.
    Learn(LearnArgs),
    /// Complexity estimators: vc | rademacher | cover | rnice.
    #[command(subcommand)]
    Complexity(ComplexityCmd),
    /// Generate a lower-bound construction (adversary, class, centers).
    Construct(ConstructArgs),
    /// Convert a perturbation-set map into perturbation functions.
    Convert(ConvertArgs),
    /// Run a seeded experiment and write report.json + trials.csv.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Args)]
struct EvalArgs {
    /// Loss: worst|rho:0.3|ramp:0.3,0.1|hinge|squared|exp|avg|scaled:0.3
    #[arg(long)]
    loss: String,
    /// Hypothesis JSON file.
    #[arg(long)]
    hyp: std::path::PathBuf,
    /// Adversary JSON file.
    #[arg(long)]
    adv: std::path::PathBuf,
    /// Dataset JSON file.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Master seed (required; no time-based default).
    #[arg(long)]
    seed: u64,
    /// Optional output JSON path.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    /// Learning rule.
    #[arg(long, value_parser = ["erm", "rerm", "prerm"])]
    rule: String,
    /// Loss for `erm` (flag grammar as in `eval`).
    #[arg(long)]
    loss: Option<String>,
    /// Threshold for `prerm` (p/q or decimal).
    #[arg(long)]
    rho: Option<String>,
    /// Hypothesis-class JSON file.
    #[arg(long)]
    class: std::path::PathBuf,
    /// Dataset JSON file.
    #[arg(long)]
    data: std::path::PathBuf,
    /// Adversary JSON file.
    #[arg(long)]
    adv: std::path::PathBuf,
    #[arg(long)]
    seed: u64,
    /// Tie-breaking among empirical-risk minimizers.
    #[arg(long, default_value = "lowest", value_parser = parse_tie)]
    tie: TieBreak,
    /// Worker threads (default: available cores). Results are identical for
    /// any value.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn parse_tie(s: &str) -> Result<TieBreak, String> {
    match s {
        "lowest" => Ok(TieBreak::LowestIndex),
        "random" => Ok(TieBreak::UniformRandom),
        other => Err(format!("tie must be `lowest` or `random`, got `{other}`")),
    }
}

#[derive(Subcommand)]
enum ComplexityCmd {
    /// Brute-force VC dimension of a class over listed domain points.
    Vc {
        #[arg(long)]
        class: std::path::PathBuf,
        /// JSON list of instances.
        #[arg(long)]
        domain: std::path::PathBuf,
        /// Largest subset size scanned.
        #[arg(long, default_value_t = 3)]
        cap: usize,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Empirical Rademacher complexity of an evaluated value matrix.
    Rademacher {
        /// JSON matrix: one row per function, one column per example.
        #[arg(long)]
        matrix: std::path::PathBuf,
        /// Enumerate all 2^n sign patterns (n <= 12).
        #[arg(long, conflicts_with_all = ["draws", "seed"])]
        exact: bool,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Covering number of a finite translation metric space.
    Cover {
        /// JSON: {"elements": [[..]..], "p": 2}
        #[arg(long)]
        space: std::path::PathBuf,
        #[arg(long)]
        r: f64,
        /// Also solve the exact minimum cover (<= 20 elements).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Nice-perturbation check for halfspaces on random triples.
    Rnice {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Norm order: 1, 2, inf, or any real > 1.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1000)]
        triples: usize,
        /// Sampled perturbations per triple.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// Number of centers.
    #[arg(long)]
    m: usize,
    /// Threshold in [0, 1), p/q or decimal.
    #[arg(long)]
    rho: String,
    /// Class filter: `all` or `weight:k`.
    #[arg(long, default_value = "all")]
    filter: String,
    /// Output directory for adversary.json, class.json, centers.json,
    /// points.json.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    /// JSON map point -> list of image points.
    #[arg(long)]
    map: std::path::PathBuf,
    /// Output JSON for the perturbation-function set.
    #[arg(long)]
    out: std::path::PathBuf,
    /// Optionally also write the functions as a uniform finite-atom
    /// adversary.
    #[arg(long)]
    adversary: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ExperimentCommon {
    /// Full experiment config (JSON or TOML); overrides kind flags.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Output directory for report.json and trials.csv.
    #[arg(long)]
    out: std::path::PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Uniform convergence of a Lipschitz loss over sample sizes.
    Uc {
        #[command(flatten)]
        common: ExperimentCommon,
        /// Comma-separated strictly increasing sample sizes.
        #[arg(long, default_value = "250,1000,4000")]
        sizes: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Exact pointwise sandwich inequalities on random triples.
    Sandwich {
        #[command(flatten)]
        common: ExperimentCommon,
        #[arg(long, default_value_t = 10_000)]
        triples: usize,
    },
    /// Relaxed-competition guarantee for threshold or worst-case ERM.
    RelaxedCompetition {
        #[command(flatten)]
        common: ExperimentCommon,
        #[arg(long, value_parser = ["lower_bound", "random"], default_value = "lower_bound")]
        preset: String,
        #[arg(long, value_parser = ["rho_star", "worst"], default_value = "rho_star")]
        benchmark: String,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value = "1/2")]
        rho: String,
        #[arg(long, default_value = "1/4")]
        rho_star: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Tolerant robust learning on translation grids at radii r and 3r.
    Tolerant {
        #[command(flatten)]
        common: ExperimentCommon,
        #[arg(long, default_value_t = 0.2)]
        r: f64,
        #[arg(long, default_value_t = 30)]
        directions: usize,
        /// Label-flip probability; 0 is the separable variant.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Hard-distribution lower bound on the construction geometry.
    Lowerbound {
        #[command(flatten)]
        common: ExperimentCommon,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value = "1/4")]
        rho: String,
        /// Total (distribution, sample) pairs.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 25)]
        distributions: usize,
    },
    /// Hinge-loss ERM over the sine frequency grid.
    Sine {
        #[command(flatten)]
        common: ExperimentCommon,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Threshold-loss ERM against finite adversaries, sweeping |G|.
    FiniteG {
        #[command(flatten)]
        common: ExperimentCommon,
        #[arg(long, default_value = "1/4")]
        rho: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
