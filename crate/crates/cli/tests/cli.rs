//! End-to-end CLI tests: artifact round trips, exit codes, flag grammar,
//! and worker-count determinism.

use std::path::Path;
use std::process::{Command, Output};

fn probrobust(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_probrobust"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn construct_artifacts_round_trip_into_consumers() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = probrobust(
        &["construct", "--m", "3", "--rho", "1/4", "--out", "c3"],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for artifact in ["adversary.json", "class.json", "centers.json", "points.json"] {
        assert!(dir.join("c3").join(artifact).exists(), "missing {artifact}");
    }

    // The written class and points feed the VC scan unchanged; the
    // construction class never shatters a pair.
    let out = probrobust(
        &[
            "complexity",
            "vc",
            "--class",
            "c3/class.json",
            "--domain",
            "c3/points.json",
        ],
        dir,
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("vc dimension 1"), "stdout: {}", stdout(&out));

    // The written adversary, class, and centers feed eval and learn.
    let out = probrobust(
        &[
            "eval",
            "--loss",
            "rho:1/4",
            "--hyp",
            "hyp.json",
            "--adv",
            "c3/adversary.json",
            "--data",
            "c3/centers.json",
            "--seed",
            "1",
        ],
        dir,
    );
    // Hypothesis file: the all-positive table, robust on every center.
    assert!(!out.status.success()); // hyp.json does not exist yet -> exit 2
    assert_eq!(out.status.code(), Some(2));
    write(
        dir,
        "hyp.json",
        r#"{"variant":"table","map":[],"default":1}"#,
    );
    let out = probrobust(
        &[
            "eval",
            "--loss",
            "rho:1/4",
            "--hyp",
            "hyp.json",
            "--adv",
            "c3/adversary.json",
            "--data",
            "c3/centers.json",
            "--seed",
            "1",
        ],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("empirical risk 0 "), "stdout: {}", stdout(&out));

    let out = probrobust(
        &[
            "learn",
            "--rule",
            "prerm",
            "--rho",
            "1/4",
            "--class",
            "c3/class.json",
            "--data",
            "c3/centers.json",
            "--adv",
            "c3/adversary.json",
            "--seed",
            "3",
            "--out",
            "learned.json",
        ],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let learned: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("learned.json")).unwrap()).unwrap();
    // The all-ones-free bitstring (index 0) is robust on every center.
    assert_eq!(learned["empirical_risk"], 0.0);
    assert_eq!(learned["evaluations"], 8 * 3);
    assert!(learned["hypothesis"]["variant"].is_string());

    // The learn result itself round-trips into eval as a hypothesis file.
    let out = probrobust(
        &[
            "eval",
            "--loss",
            "rho:1/4",
            "--hyp",
            "learned.json",
            "--adv",
            "c3/adversary.json",
            "--data",
            "c3/centers.json",
            "--seed",
            "1",
        ],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("empirical risk 0 "));
}

#[test]
fn learn_is_deterministic_across_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    probrobust(&["construct", "--m", "4", "--rho", "1/2", "--out", "c"], dir);
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let out = probrobust(
            &[
                "learn",
                "--rule",
                "rerm",
                "--class",
                "c/class.json",
                "--data",
                "c/centers.json",
                "--adv",
                "c/adversary.json",
                "--seed",
                "9",
                "--jobs",
                jobs,
            ],
            dir,
        );
        assert!(out.status.success());
        outputs.push(stdout(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn convert_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "u.json", r#"{"0":[0,1],"1":[1]}"#);
    let out = probrobust(
        &["convert", "--map", "u.json", "--out", "g.json", "--adversary", "adv.json"],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("g.json")).unwrap()).unwrap();
    assert_eq!(g["functions"].as_array().unwrap().len(), 2);
    // The emitted adversary is a valid input elsewhere.
    write(dir, "d.json", r#"[{"x":0,"y":1}]"#);
    write(dir, "h.json", r#"{"variant":"table","map":[],"default":1}"#);
    let out = probrobust(
        &[
            "eval", "--loss", "avg", "--hyp", "h.json", "--adv", "adv.json", "--data", "d.json",
            "--seed", "0",
        ],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Empty image sets are a validation error (exit 3).
    write(dir, "bad.json", r#"{"0":[0],"1":[]}"#);
    let out = probrobust(&["convert", "--map", "bad.json", "--out", "g2.json"], dir);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes_and_flag_grammar() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    // Unknown subcommand / flag: clap usage error, exit 2.
    let out = probrobust(&["frobnicate"], dir);
    assert_eq!(out.status.code(), Some(2));
    let out = probrobust(&["eval", "--no-such-flag"], dir);
    assert_eq!(out.status.code(), Some(2));

    // Missing seed on a stochastic subcommand is an error, never a
    // time-based default.
    let out = probrobust(&["experiment", "sandwich", "--triples", "10", "--out", "x"], dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));

    // Unrepresentable decimals are rejected rather than rounded.
    let out = probrobust(
        &["construct", "--m", "2", "--rho", "0.3333333333", "--out", "c"],
        dir,
    );
    assert_eq!(out.status.code(), Some(2));
    let ok = probrobust(&["construct", "--m", "2", "--rho", "1/3", "--out", "c"], dir);
    assert!(ok.status.success());

    // Out-of-range parameters are validation errors, exit 3.
    let out = probrobust(&["construct", "--m", "99", "--rho", "1/4", "--out", "c2"], dir);
    assert_eq!(out.status.code(), Some(3));

    // Budget overflow under PROBROBUST_BUDGET is exit 3.
    probrobust(&["construct", "--m", "3", "--rho", "0", "--out", "c3"], dir);
    let out = Command::new(env!("CARGO_BIN_EXE_probrobust"))
        .args([
            "learn", "--rule", "rerm", "--class", "c3/class.json", "--data", "c3/centers.json",
            "--adv", "c3/adversary.json", "--seed", "1",
        ])
        .env("PROBROBUST_BUDGET", "2")
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    // Every subcommand documents its flags.
    for sub in ["eval", "learn", "construct", "convert"] {
        let out = probrobust(&[sub, "--help"], dir);
        assert!(out.status.success());
        assert!(stdout(&out).contains("--"));
    }
    let out = probrobust(&["complexity", "rademacher", "--help"], dir);
    assert!(stdout(&out).contains("--draws"));
    let out = probrobust(&["experiment", "lowerbound", "--help"], dir);
    assert!(stdout(&out).contains("--rho"));
}

#[test]
fn experiment_writes_artifacts_and_exit_tracks_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = probrobust(
        &[
            "experiment", "lowerbound", "--m", "3", "--rho", "1/4", "--trials", "60",
            "--distributions", "12", "--seed", "7", "--out", "lb",
        ],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("lowerbound PASS"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("lb/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["verdict"]["pass"], true);
    assert!(report["aggregates"]["mean_pop_risk"].as_f64().unwrap() >= 0.2);
    let csv = std::fs::read_to_string(dir.join("lb/trials.csv")).unwrap();
    assert!(csv.starts_with("trial,seed,n,emp_risk,pop_risk,benchmark,excess"));
    assert_eq!(csv.lines().count(), 61);

    // A config file drives the same runner; a deliberately impossible
    // envelope fails the verdict and exits 1.
    let config = r#"{
        "experiment": "sandwich",
        "triples": 50,
        "max_atoms": 4,
        "seed": 3
    }"#;
    write(dir, "sw.json", config);
    let out = probrobust(
        &["experiment", "sandwich", "--config", "sw.json", "--out", "sw"],
        dir,
    );
    assert!(out.status.success());

    let failing = r#"
experiment = "uc"
loss = { kind = "worst_case" }
sizes = [10, 20]
trials_per_size = 2
envelope_factor = 3.0
seed = 1

[class]
variant = "halfspace_grid"
dim = 2
count = 4
seed = 1

[adversary]
variant = "lp_ball"
p = 2.0
gamma = 0.5
n_mc = 16
base_seed = 0

[distribution]
variant = "finite_support"
support = [[{ "x" = [1.0, 0.0], "y" = 1 }, { num = 1, den = 1 }]]
"#;
    write(dir, "bad_uc.toml", failing);
    let out = probrobust(
        &["experiment", "uc", "--config", "bad_uc.toml", "--out", "uc_bad"],
        dir,
    );
    // Worst-case loss is non-Lipschitz: validation error, exit 3.
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_trials_are_jobs_independent_on_disk() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for (jobs, out_dir) in [("1", "a"), ("8", "b")] {
        let out = probrobust(
            &[
                "experiment", "finite-g", "--trials", "30", "--rho", "1/4", "--seed", "5",
                "--jobs", jobs, "--out", out_dir,
            ],
            dir,
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.join("a/trials.csv")).unwrap();
    let b = std::fs::read(dir.join("b/trials.csv")).unwrap();
    assert_eq!(a, b, "trials.csv differs between --jobs 1 and --jobs 8");
    let ra = std::fs::read(dir.join("a/report.json")).unwrap();
    let rb = std::fs::read(dir.join("b/report.json")).unwrap();
    assert_eq!(ra, rb);
}
