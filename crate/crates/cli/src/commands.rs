use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use probrobust_core::complexity::{self, MetricSpaceSample, RademacherMode};
use probrobust_core::constructions::{self, ConstructionFilter};
use probrobust_core::domain::{Instance, NormOrder};
use probrobust_core::experiments::{self, ExperimentConfig};
use probrobust_core::learners::{self, ErmOptions};
use probrobust_core::losses::{self, LossSpec};

use probrobust_core::{Adversary, Dataset, HypothesisClass, Rational};

use crate::io::{
    budget_from_env, read_json, read_text, usage, write_json, write_text, CliResult, CoreResultExt,
};
use crate::{Command, ComplexityCmd, ExperimentCmd, ExperimentCommon};

pub fn dispatch(command: Command) -> CliResult<u8> {
    match command {
        Command::Eval(args) => eval(args),
        Command::Learn(args) => learn(args),
        Command::Complexity(cmd) => complexity_cmd(cmd),
        Command::Construct(args) => construct(args),
        Command::Convert(args) => convert(args),
        Command::Experiment(cmd) => experiment(cmd),
    }
}

fn parse_rational(s: &str) -> CliResult<Rational> {
    Rational::parse(s).map_err(|e| usage(e.to_string()))
}

fn parse_norm(s: &str) -> CliResult<NormOrder> {
    if s == "inf" {
        return Ok(NormOrder::Inf);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| usage(format!("norm order must be a number or `inf`, got `{s}`")))?;
    NormOrder::from_value(v).or_exit3()
}

/// A hypothesis file is either a bare hypothesis or a `learn` result, whose
/// `hypothesis` field is used as-is.
fn read_hypothesis(path: &std::path::Path) -> CliResult<probrobust_core::Hypothesis> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum HypFile {
        Bare(probrobust_core::Hypothesis),
        LearnResult { hypothesis: probrobust_core::Hypothesis },
    }
    match read_json(path, "hypothesis")? {
        HypFile::Bare(h) | HypFile::LearnResult { hypothesis: h } => {
            h.validate().map_err(crate::io::from_core)?;
            Ok(h)
        }
    }
}

fn eval(args: crate::EvalArgs) -> CliResult<u8> {
    let spec = LossSpec::parse_flag(&args.loss).map_err(|e| usage(e.to_string()))?;
    let hypothesis = read_hypothesis(&args.hyp)?;
    let adversary: Adversary = read_json(&args.adv, "adversary")?;
    let dataset: Dataset = read_json(&args.data, "dataset")?;
    let risk = losses::empirical_risk(&spec, &hypothesis, &adversary, &dataset, args.seed)
        .or_exit3()?;
    let result = serde_json::json!({
        "loss": spec,
        "empirical_risk": risk,
        "examples": dataset.len(),
        "seed": args.seed,
    });
    if let Some(out) = &args.out {
        write_json(out, &result)?;
        println!("empirical risk {} over {} examples -> {}", risk, dataset.len(), out.display());
    } else {
        println!("empirical risk {} over {} examples", risk, dataset.len());
    }
    Ok(0)
}

fn learn(args: crate::LearnArgs) -> CliResult<u8> {
    let class: HypothesisClass = read_json(&args.class, "hypothesis class")?;
    let dataset: Dataset = read_json(&args.data, "dataset")?;
    let adversary: Adversary = read_json(&args.adv, "adversary")?;
    let opts = ErmOptions {
        tie: args.tie,
        budget: budget_from_env()?,
        seed: args.seed,
    };
    let outcome = experiments::with_jobs(args.jobs, || match args.rule.as_str() {
        "erm" => {
            let loss = args
                .loss
                .as_deref()
                .ok_or_else(|| usage("`learn --rule erm` needs --loss"))?;
            let spec = LossSpec::parse_flag(loss).map_err(|e| usage(e.to_string()))?;
            learners::erm(&spec, &class, &adversary, &dataset, &opts).or_exit3()
        }
        "rerm" => learners::rerm(&class, &adversary, &dataset, &opts).or_exit3(),
        "prerm" => {
            let rho = args
                .rho
                .as_deref()
                .ok_or_else(|| usage("`learn --rule prerm` needs --rho"))?;
            learners::prerm(parse_rational(rho)?, &class, &adversary, &dataset, &opts).or_exit3()
        }
        other => Err(usage(format!("unknown rule `{other}`"))),
    })?;
    let result = serde_json::json!({
        "hypothesis": outcome.hypothesis,
        "empirical_risk": outcome.empirical_risk,
        "evaluations": outcome.evaluations,
        "index": outcome.index,
    });
    if let Some(out) = &args.out {
        write_json(out, &result)?;
        println!(
            "{} picked member {} with empirical risk {} -> {}",
            args.rule, outcome.index, outcome.empirical_risk, out.display()
        );
    } else {
        println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
    }
    Ok(0)
}

fn complexity_cmd(cmd: ComplexityCmd) -> CliResult<u8> {
    match cmd {
        ComplexityCmd::Vc { class, domain, cap, out } => {
            let class: HypothesisClass = read_json(&class, "hypothesis class")?;
            let points: Vec<Instance> = read_json(&domain, "domain points")?;
            let vc = complexity::vc_dimension(&class, &points, cap, budget_from_env()?)
                .or_exit3()?;
            let result = serde_json::json!({
                "vc_dimension": vc,
                "cap": cap,
                "domain_points": points.len(),
                "class_size": class.len(),
            });
            if let Some(out) = &out {
                write_json(out, &result)?;
            }
            println!("vc dimension {vc} (cap {cap}, {} points)", points.len());
            Ok(0)
        }
        ComplexityCmd::Rademacher { matrix, exact, draws, seed, out } => {
            let values: Vec<Vec<f64>> = read_json(&matrix, "value matrix")?;
            let mode = if exact {
                RademacherMode::Exact
            } else {
                let draws = draws.ok_or_else(|| usage("monte carlo mode needs --draws"))?;
                let seed = seed.ok_or_else(|| {
                    usage("monte carlo mode needs an explicit --seed (no time-based default)")
                })?;
                RademacherMode::MonteCarlo { draws, seed }
            };
            let est = complexity::empirical_rademacher(&values, mode).or_exit3()?;
            let result = serde_json::json!({ "estimate": est, "mode": mode });
            if let Some(out) = &out {
                write_json(out, &result)?;
            }
            match est.std_error {
                Some(se) => println!("empirical rademacher {} (std error {})", est.value, se),
                None => println!("empirical rademacher {} (exact)", est.value),
            }
            Ok(0)
        }
        ComplexityCmd::Cover { space, r, exact, out } => {
            let space: MetricSpaceSample = read_json(&space, "metric space")?;
            let (greedy_size, greedy_centers) =
                complexity::covering_number_greedy(&space, r).or_exit3()?;
            let exact_result = if exact {
                Some(complexity::covering_number_exact(&space, r).or_exit3()?)
            } else {
                None
            };
            let result = serde_json::json!({
                "r": r,
                "greedy": { "size": greedy_size, "centers": greedy_centers },
                "exact": exact_result.as_ref().map(|(s, c)| serde_json::json!({
                    "size": s, "centers": c,
                })),
            });
            if let Some(out) = &out {
                write_json(out, &result)?;
            }
            match &exact_result {
                Some((s, _)) => println!("cover size: greedy {greedy_size}, exact minimum {s}"),
                None => println!("cover size: greedy {greedy_size}"),
            }
            Ok(0)
        }
        ComplexityCmd::Rnice { dim, p, r, triples, trials, seed, out } => {
            let p = parse_norm(&p)?;
            let (ws, xs, taus) = complexity::random_nice_triples(dim, &p, r, triples, seed);
            let report = complexity::r_nice_check(&ws, &xs, &taus, &p, r, trials, seed)
                .or_exit3()?;
            if let Some(out) = &out {
                write_json(out, &report)?;
            }
            println!(
                "nice-perturbation pass fraction {} ({} triples, {} degenerate excluded, {} failures)",
                report.pass_fraction,
                report.triples,
                report.excluded_degenerate,
                report.failures.len()
            );
            Ok(u8::from(report.pass_fraction < 1.0))
        }
    }
}

fn parse_filter(s: &str) -> CliResult<ConstructionFilter> {
    if s == "all" {
        return Ok(ConstructionFilter::All);
    }
    if let Some(k) = s.strip_prefix("weight:") {
        let k: u32 = k
            .parse()
            .map_err(|_| usage(format!("bad filter weight `{k}`")))?;
        return Ok(ConstructionFilter::ExactWeight { k });
    }
    Err(usage(format!("filter must be `all` or `weight:k`, got `{s}`")))
}

fn construct(args: crate::ConstructArgs) -> CliResult<u8> {
    let rho = parse_rational(&args.rho)?;
    let filter = parse_filter(&args.filter)?;
    let built = constructions::build_construction(args.m, rho, filter).or_exit3()?;
    write_json(&args.out.join("adversary.json"), &built.adversary)?;
    write_json(&args.out.join("class.json"), &built.class)?;
    write_json(&args.out.join("centers.json"), &built.centers)?;
    write_json(&args.out.join("points.json"), &built.geometry.domain_points())?;
    println!(
        "construction: {} centers, {} atoms, class size {} -> {}",
        args.m,
        built.adversary.as_finite().expect("finite").len(),
        built.class.len(),
        args.out.display()
    );
    Ok(0)
}

fn convert(args: crate::ConvertArgs) -> CliResult<u8> {
    let raw: BTreeMap<u64, Vec<u64>> = read_json(&args.map, "perturbation map")?;
    let u_map: BTreeMap<u64, BTreeSet<u64>> = raw
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().collect()))
        .collect();
    let functions = constructions::g_u_convert(&u_map).or_exit3()?;
    write_json(&args.out, &functions)?;
    if let Some(adv_path) = &args.adversary {
        write_json(adv_path, &functions.to_adversary().or_exit3()?)?;
    }
    println!(
        "{} perturbation functions over {} points -> {}",
        functions.functions.len(),
        functions.domain.len(),
        args.out.display()
    );
    Ok(0)
}

fn need_seed(common: &ExperimentCommon) -> CliResult<u64> {
    common
        .seed
        .ok_or_else(|| usage("experiments need an explicit --seed (no time-based default)"))
}

fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| usage(format!("bad sample size `{t}`")))
        })
        .collect()
}

fn experiment(cmd: ExperimentCmd) -> CliResult<u8> {
    let (common, config) = build_experiment_config(cmd)?;
    let report = experiments::with_jobs(common.jobs, || experiments::run(&config)).or_exit3()?;
    let report_path = common.out.join("report.json");
    write_text(&report_path, &report.to_json())?;
    write_text(&common.out.join("trials.csv"), &report.trials_csv())?;
    let verdict = if report.verdict.pass { "PASS" } else { "FAIL" };
    println!(
        "{} {}: {} trials, mean excess {} -> {}",
        config.kind(),
        verdict,
        report.records.len(),
        report.aggregates.mean_excess,
        report_path.display()
    );
    Ok(report.exit_code() as u8)
}

fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = read_text(path)?;
    experiments::parse_config(&text).map_err(|e| usage(e.to_string()))
}

fn build_experiment_config(cmd: ExperimentCmd) -> CliResult<(ExperimentCommon, ExperimentConfig)> {
    use probrobust_core::experiments::*;
    Ok(match cmd {
        ExperimentCmd::Uc { common, sizes, trials } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => ExperimentConfig::Uc(
                    UcConfig::halfspace_hinge(parse_sizes(&sizes)?, trials, need_seed(&common)?)
                        .or_exit3()?,
                ),
            };
            (common, config)
        }
        ExperimentCmd::Sandwich { common, triples } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => ExperimentConfig::Sandwich(SandwichConfig {
                    triples,
                    max_atoms: 8,
                    seed: need_seed(&common)?,
                }),
            };
            (common, config)
        }
        ExperimentCmd::RelaxedCompetition {
            common,
            preset,
            benchmark,
            m,
            rho,
            rho_star,
            trials,
            eps,
            delta,
        } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => {
                    let seed = need_seed(&common)?;
                    let benchmark = match benchmark.as_str() {
                        "rho_star" => BenchmarkKind::RhoStar,
                        _ => BenchmarkKind::WorstCase,
                    };
                    let rho = parse_rational(&rho)?;
                    let rho_star = parse_rational(&rho_star)?;
                    let cfg = match preset.as_str() {
                        "lower_bound" => RelaxedConfig::lower_bound_geometry(
                            m, rho, rho_star, benchmark, eps, delta, trials, seed,
                        ),
                        _ => RelaxedConfig::random_atoms(
                            2, 20, 16, 8, rho, rho_star, benchmark, eps, delta, trials, seed,
                        ),
                    }
                    .or_exit3()?;
                    ExperimentConfig::RelaxedCompetition(cfg)
                }
            };
            (common, config)
        }
        ExperimentCmd::Tolerant { common, r, directions, noise, trials, eps, delta } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => ExperimentConfig::Tolerant(TolerantConfig::standard(
                    r,
                    directions,
                    noise,
                    trials,
                    eps,
                    delta,
                    need_seed(&common)?,
                )),
            };
            (common, config)
        }
        ExperimentCmd::Lowerbound { common, m, rho, trials, distributions } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => {
                    let distributions = distributions.max(1).min(trials);
                    ExperimentConfig::Lowerbound(LowerboundConfig {
                        m,
                        rho: parse_rational(&rho)?,
                        distributions,
                        samples_per_distribution: trials.div_ceil(distributions),
                        seed: need_seed(&common)?,
                    })
                }
            };
            (common, config)
        }
        ExperimentCmd::Sine { common, trials } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => ExperimentConfig::Sine(SineConfig::default_grid(trials, need_seed(&common)?)),
            };
            (common, config)
        }
        ExperimentCmd::FiniteG { common, rho, trials, eps, delta } => {
            let config = match &common.config {
                Some(path) => load_config(path)?,
                None => ExperimentConfig::FiniteG(FiniteGConfig::standard(
                    parse_rational(&rho)?,
                    trials,
                    eps,
                    delta,
                    need_seed(&common)?,
                )),
            };
            (common, config)
        }
    })
}
