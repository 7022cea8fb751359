use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ideal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ideal"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn demo_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("demo/demo.toml")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_record(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("JSON error record on stderr");
    serde_json::from_str(line).unwrap()
}

fn manifest(dir: &Path) -> toml::Value {
    toml::from_str(&std::fs::read_to_string(dir.join("manifest.toml")).unwrap()).unwrap()
}

const QUICK: [&str; 6] = ["--iterations", "700", "--burn-in", "200", "--thin", "1"];

#[test]
fn demo_fit_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = demo_config();
    let mut args = vec!["fit", "--config", path_str(&cfg), "--out", path_str(&out), "--party"];
    args.extend(QUICK);
    let o = ideal(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "data_filtered.csv",
        "filter_report.json",
        "manifest.toml",
        "summary.csv",
        "diagnostics.csv",
        "ideal_points_plot.csv",
        "pivots.csv",
        "ppc.csv",
        "ppc_draws.csv",
        "report.toml",
        "party_effects.csv",
        "draws/mu.csv",
        "draws/alpha.csv",
        "draws/beta.csv",
        "draws/delta.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let m = manifest(&out);
    // 21 free legislators, 40 motions, d = 1, plus one δ per motion.
    assert_eq!(m["parameter_count"].as_integer(), Some(21 + 40 * 2 + 40));
    assert_eq!(m["seed"].as_integer(), Some(7));
    let filter: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("filter_report.json")).unwrap()).unwrap();
    assert_eq!(filter["n_after"], 23);
    assert_eq!(filter["m_after"], 40);
}

#[test]
fn missing_data_path_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ideal(&["fit", "--out", path_str(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!(rec["exit_code"], 2);
    assert_eq!(rec["command"], "fit");
    assert_eq!(rec["status"], "error");
}

#[test]
fn malformed_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[sampler]\niterations = \"many\"\n").unwrap();
    let o = ideal(&["fit", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["kind"], "config");
}

#[test]
fn simulate_fit_summarize_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    let o = ideal(&["simulate", "--n", "30", "--m", "80", "--seed", "4", "--out", path_str(&sim)]);
    assert!(o.status.success());
    let run = sim.join("fit");
    let cfg = sim.join("run.toml");
    let mut args = vec!["fit", "--config", path_str(&cfg), "-q"];
    args.extend(QUICK);
    assert!(ideal(&args).status.success());
    let truth = sim.join("truth_beta.csv");
    let o = ideal(&["summarize", path_str(&run), "--truth", path_str(&truth)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("recovery correlation"));
    let rec: toml::Value = toml::from_str(&std::fs::read_to_string(run.join("recovery.toml")).unwrap()).unwrap();
    let r = rec["sign_aligned_correlation"][0].as_float().unwrap();
    assert!(r > 0.85, "recovery {r}");
}

#[test]
fn unknown_ppc_statistic_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = demo_config();
    let mut args = vec!["fit", "--config", path_str(&cfg), "--out", path_str(&out), "-q"];
    args.extend(QUICK);
    assert!(ideal(&args).status.success());
    let o = ideal(&["ppc", path_str(&out), "--statistics", "yea_rate,bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["kind"], "validation");

    let o = ideal(&["ppc", path_str(&out), "--statistics", "yea_rate", "--replicates", "250"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("ppc_draws.csv")).unwrap();
    assert_eq!(text.lines().count(), 251);
}

#[test]
fn pivots_on_a_single_draw_pick_the_minimum() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("one");
    let cfg = demo_config();
    let o = ideal(&[
        "fit", "--config", path_str(&cfg), "--out", path_str(&out), "--iterations", "1",
        "--burn-in", "0", "--thin", "1", "--chains", "1", "-q",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let beta = std::fs::read_to_string(out.join("draws/beta.csv")).unwrap();
    let lowest = beta
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[2].to_string(), f[4].parse::<f64>().unwrap())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    let o = ideal(&["pivots", path_str(&out), "--ranks", "1"]);
    assert!(o.status.success());
    let table = std::fs::read_to_string(out.join("pivots.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows, vec![format!("1,{lowest},1,1.0")]);
}

#[test]
fn identical_rerun_is_detected_and_threads_do_not_matter() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = demo_config();
    let base = |threads: &'static str| {
        let mut a = vec!["fit", "--config", path_str(&cfg), "--out", path_str(&out), "-q", "--threads", threads];
        a.extend(QUICK);
        a.iter().map(|s| s.to_string()).collect::<Vec<_>>()
    };
    let run = |a: Vec<String>| {
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        assert!(ideal(&refs).status.success());
    };
    run(base("1"));
    assert!(manifest(&out).get("previous_run").is_none());
    let first = manifest(&out)["draws_sha256"].clone();
    run(base("2"));
    let m = manifest(&out);
    assert_eq!(m["draws_sha256"], first);
    assert_eq!(m["previous_run"]["identical_inputs"].as_bool(), Some(true));
    assert_eq!(m["previous_run"]["identical_draws"].as_bool(), Some(true));

    let mut changed = base("1");
    changed.extend(["--seed".to_string(), "99".to_string()]);
    run(changed);
    let m = manifest(&out);
    assert_eq!(m["seed"].as_integer(), Some(99));
    assert_eq!(m["previous_run"]["identical_inputs"].as_bool(), Some(false));
}

#[test]
fn diagnose_and_summarize_write_to_out() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let cfg = demo_config();
    let mut args = vec!["fit", "--config", path_str(&cfg), "--out", path_str(&run), "-q"];
    args.extend(QUICK);
    assert!(ideal(&args).status.success());

    let elsewhere = tmp.path().join("post");
    let o = ideal(&["diagnose", path_str(&run), "--out", path_str(&elsewhere)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("R̂ < 1.1"));
    let diag = std::fs::read_to_string(elsewhere.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("parameter,rhat,ess"));
    // 21 free β, 40 μ, 40 α.
    assert_eq!(diag.lines().count(), 1 + 21 + 80);

    let o = ideal(&["summarize", path_str(&run), "--out", path_str(&elsewhere), "--level", "0.5"]);
    assert!(o.status.success());
    assert!(elsewhere.join("summary.csv").is_file());
    assert!(elsewhere.join("ideal_points_plot.csv").is_file());
}

#[test]
fn run_directory_must_exist() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ideal(&["diagnose", path_str(&tmp.path().join("nothing"))]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["kind"], "run-directory");
}
