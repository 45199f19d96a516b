use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_snaking"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn verify(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn constants_for_three_dimensions() {
    let o = run(&["constants", "--n", "3", "--m", "0.5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for line in ["m* = 0", "A = 1", "B = 2"] {
        assert!(text.lines().any(|l| l == line), "{line} missing from\n{text}");
    }
}

#[test]
fn constants_for_the_plane() {
    let o = run(&["constants", "--n", "2", "--m", "0.5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for line in ["m* = 0", "A = 2.25", "B = 3"] {
        assert!(text.lines().any(|l| l == line), "{line} missing from\n{text}");
    }
}

#[test]
fn constants_reject_exponent_at_the_threshold() {
    let o = run(&["constants", "--n", "3", "--m", "0.0"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("m = 0"), "{}", stderr(&o));
}

#[test]
fn verify_straight_line_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = verify(&config("line.json"), dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["passed"], true);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["config"]["params"]["n"], 3);
    let checks = r["checks"].as_array().unwrap();
    // seven regions, each with its finite-difference cross-check
    assert_eq!(checks.iter().filter(|c| c["id"].as_str().unwrap().starts_with("sign.")).count(), 14);
    assert!(checks.iter().all(|c| !c["anchor"].as_str().unwrap().is_empty()));
    for id in ["geometry.oracle", "vanishing.boundary", "vanishing.ahead", "sandwich", "ordering"] {
        assert!(checks.iter().any(|c| c["id"] == id), "{id}");
    }
    assert!(r["details"]["constants"]["delta"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("checks.csv").exists());
}

#[test]
fn verify_helix_passes_after_constant_search() {
    let dir = tempfile::tempdir().unwrap();
    let o = verify(&config("helix.json"), dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["config"]["curve"]["shape"]["kind"], "helix");
    assert!(r["details"]["constants"]["r0"].as_f64().unwrap() < 1.0);
}

#[test]
fn sabotaged_sub_solution_constant_fails_the_boundary_vanishing() {
    let dir = tempfile::tempdir().unwrap();
    let o = verify(&config("sabotaged-m.json"), dir.path(), &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("vanishing.boundary (sub-solution vanishing at r = r0)"), "{}", stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["passed"], false);
    let failing: Vec<&str> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(failing.first(), Some(&"vanishing.boundary"));
}

#[test]
fn reports_are_byte_stable_apart_from_the_timestamp() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(code(&verify(&config("line.json"), a.path(), &["--seed", "7"])), 0);
    assert_eq!(code(&verify(&config("line.json"), b.path(), &["--seed", "7"])), 0);
    let strip = |d: &Path| -> String {
        let text = std::fs::read_to_string(d.join("report.json")).unwrap();
        text.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
    };
    let (ta, tb) = (strip(a.path()), strip(b.path()));
    assert!(!ta.contains("timestamp"));
    assert_eq!(ta, tb);
    assert_eq!(report(a.path())["seed"], 7);
    assert_eq!(report(a.path())["config"]["verifier"]["search"]["seed"], 7);
}

#[test]
fn different_seeds_change_the_samples() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    verify(&config("line.json"), a.path(), &["--seed", "1"]);
    verify(&config("line.json"), b.path(), &["--seed", "2"]);
    let worst = |d: &Path| report(d)["details"]["signs"][6]["worst_sample"].clone();
    assert_ne!(worst(a.path()), worst(b.path()));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"version": 1, "params": {"n": 3, "m": 0.5, "c": 1.0, "eps": 0.5, "eps_prime": 0.25}, "verifier": {"samples": 10}}"#,
    );
    let out = dir.path().join("out");
    let o = verify(&cfg, &out, &[]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
    // rejected before any computation
    assert!(!out.exists());
}

#[test]
fn malformed_and_missing_configs_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\"version\": 1, \"params\": ");
    assert_eq!(code(&verify(&cfg, &dir.path().join("out"), &[])), 3);
    assert_eq!(code(&verify(&dir.path().join("absent.json"), &dir.path().join("out"), &[])), 3);
    let bad_m = write_config(dir.path(), r#"{"version": 1, "params": {"n": 4, "m": 0.2, "c": 1.0, "eps": 0.5, "eps_prime": 0.25}}"#);
    assert_eq!(code(&verify(&bad_m, &dir.path().join("out"), &[])), 3);
}

#[test]
fn unstable_explicit_step_is_a_numerical_abort() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("evolution-explicit.json")).unwrap().replace("\"dt\": 1e-4", "\"dt\": 0.05");
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("run0-evolution"), "{}", stderr(&o));
}

#[test]
fn simulate_writes_tables_snapshots_and_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = run(&["simulate", "--config", config("simulate.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));

    // error against the wave decreases monotonically with h
    let conv = std::fs::read_to_string(out.join("run0-wave_relaxation/convergence.dat")).unwrap();
    let errors: Vec<f64> = conv.lines().filter(|l| !l.starts_with('#')).map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");

    let mono = std::fs::read_to_string(out.join("run1-exhaustion/monotonicity.dat")).unwrap();
    let pairs: Vec<&str> = mono.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(pairs.len(), 2);
    assert!(pairs.iter().all(|l| l.ends_with("true")));

    let r = report(out);
    let probe = &r["details"]["runs"][2]["details"];
    assert!(probe["relative_deviation"].as_f64().unwrap() <= 0.1);
    assert_eq!(probe["b_pressure"], 2.0);

    for run in ["run0-wave_relaxation", "run1-exhaustion", "run2-pressure_probe", "run3-evolution"] {
        let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join(run).join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["run"], run);
        for snap in manifest["snapshots"].as_array().unwrap() {
            let csv = std::fs::read_to_string(out.join(run).join(snap.as_str().unwrap())).unwrap();
            assert_eq!(csv.lines().next(), Some("rho,zeta,v,W"));
        }
    }
    let evo: Value = serde_json::from_str(&std::fs::read_to_string(out.join("run3-evolution/manifest.json")).unwrap()).unwrap();
    assert_eq!(evo["snapshots"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_without_runs_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--config", config("line.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn report_aggregates_and_flags_the_failing_run() {
    let dir = tempfile::tempdir().unwrap();
    let (good, bad, sum) = (dir.path().join("good"), dir.path().join("bad"), dir.path().join("sum"));
    verify(&config("line.json"), &good, &[]);
    verify(&config("sabotaged-m.json"), &bad, &[]);

    let o = run(&["report", "--out", sum.to_str().unwrap(), good.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let o = run(&["report", "--out", sum.to_str().unwrap(), good.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("vanishing.boundary"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(sum.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["runs"].as_array().unwrap().len(), 2);
    assert_eq!(s["failed_checks"], 1);
    assert_eq!(s["runs"][0]["passed"], true);
    assert_eq!(s["runs"][1]["passed"], false);
    let csv = std::fs::read_to_string(sum.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + s["total_checks"].as_u64().unwrap() as usize);

    let o = run(&["report", "--out", sum.to_str().unwrap(), dir.path().join("nothing").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}
