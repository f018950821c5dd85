//! End-to-end tests of the afp binary: exit codes, artifact shapes, the
//! AFP_SEED override, and config-file round trips. Each test spawns the
//! compiled binary so the process-level contract (codes 0/2/3/4, stdout
//! bytes) is what's checked, not library internals.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn afp() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_afp"));
    // Tests control seeds explicitly; a stray environment override would
    // make them flaky.
    cmd.env_remove("AFP_SEED");
    cmd
}

fn run_ok(args: &[&str]) -> Output {
    let out = afp().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "args {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// The deterministic portion of a JSON report: everything except timing.
fn payload(out: &Output) -> Value {
    let mut v = json_stdout(out);
    let obj = v.as_object_mut().expect("report is an object");
    assert!(obj.remove("timing_ms").is_some(), "report carries timing");
    v
}

fn write_jump_map(dir: &Path) -> String {
    // Fixed-point-free self-map of [0,1]: x/2 + 5/8 below 1/2, x/2 above.
    // Displacement is at least 1/4 everywhere.
    let path = dir.join("jump.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "schema": "afp-map/1",
            "name": "jump",
            "pieces": [
                {
                    "guard": [{"normal": {"1": "1"}, "rhs": "1/2"}],
                    "linear": [{"out": 1, "row": {"1": "1/2"}}],
                    "offset": {"1": "5/8"}
                },
                {"linear": [{"out": 1, "row": {"1": "1/2"}}]}
            ]
        })
        .to_string(),
    )
    .unwrap();
    format!("plugin:{}", path.display())
}

#[test]
fn cesaro_emits_csv_with_exact_rationals() {
    let out = run_ok(&["cesaro", "--map", "half-step", "--start", "0", "--steps", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "k,residual,residual_float\n\
         1,1/2,0.5\n\
         2,3/8,0.375\n\
         3,7/24,0.2916666666666667\n\
         4,15/64,0.234375\n"
    );
}

#[test]
fn kkm_witness_report_has_the_contract_keys() {
    let out = run_ok(&["kkm", "--map", "square", "--epsilon", "1/10"]);
    let report = json_stdout(&out);
    assert_eq!(report["schema"], "afp-report/1");
    assert_eq!(report["config"]["subcommand"], "kkm");
    let results = &report["results"];
    assert_eq!(results["outcome"], "witness");
    for key in ["witness", "residual", "order", "net_size", "lattice_vertices_scanned"] {
        assert!(!results[key].is_null(), "missing {key}");
    }
}

#[test]
fn bad_config_exits_two() {
    let out = afp()
        .args(["kkm", "--map", "nosuch", "--epsilon", "1/10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = afp()
        .args(["kkm", "--map", "square", "--epsilon", "zero"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = afp()
        .args(["delta", "--op", "mystery"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_escape_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("double.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "schema": "afp-map/1",
            "name": "double",
            "pieces": [{"linear": [{"out": 1, "row": {"1": "2"}}]}]
        })
        .to_string(),
    )
    .unwrap();
    let out = afp()
        .args([
            "cesaro",
            "--map",
            &format!("plugin:{}", path.display()),
            "--domain",
            "box:1",
            "--start",
            "1/2",
            "--steps",
            "10",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn depth_exhaustion_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_jump_map(dir.path());
    let out = afp()
        .args([
            "kkm", "--map", &spec, "--domain", "box:1", "--epsilon", "1/8",
            "--max-order", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn afp_seed_env_overrides_the_flag() {
    let flag = run_ok(&[
        "delta", "--op", "certify", "--samples", "20", "--pairs", "20", "--seed", "5",
    ]);
    let env = afp()
        .args([
            "delta", "--op", "certify", "--samples", "20", "--pairs", "20", "--seed", "1",
        ])
        .env("AFP_SEED", "5")
        .output()
        .unwrap();
    assert!(env.status.success());
    let env_report = {
        let mut v: Value = serde_json::from_slice(&env.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    assert_eq!(env_report["config"]["seed"], 5, "env must win over the flag");
    assert_eq!(payload(&flag), env_report);
}

#[test]
fn identical_seeds_reproduce_payloads_byte_for_byte() {
    let args = [
        "delta", "--op", "pipeline", "--samples", "40", "--pairs", "40", "--seed", "9",
    ];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(payload(&a), payload(&b));

    // CSV artifacts carry no timing at all, so whole bytes must match.
    let csv_args = ["cesaro", "--map", "rotation90", "--start", "1:1,2:1", "--steps", "12"];
    let a = run_ok(&csv_args);
    let b = run_ok(&csv_args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_reruns_match_flag_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let flag = run_ok(&["separate", "--delta", "9/10", "--count", "5"]);
    let config_path = dir.path().join("sep.json");
    std::fs::write(
        &config_path,
        serde_json::json!({
            "schema": "afp-config/1",
            "subcommand": "separate",
            "op": "greedy",
            "delta": "9/10",
            "count": 5
        })
        .to_string(),
    )
    .unwrap();
    let from_file = run_ok(&["run", "--config", config_path.to_str().unwrap()]);
    assert_eq!(payload(&flag), payload(&from_file));

    // Unknown keys in a config file are a config error, not a silent skip.
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"schema":"afp-config/1","subcommand":"separate","delta":"9/10","typo":true}"#,
    )
    .unwrap();
    let out = afp()
        .args(["run", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_flag_writes_the_artifact_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.json");
    let out = afp()
        .args([
            "kkm", "--map", "toward-half", "--epsilon", "1/5",
            "--report", path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "artifact goes to the file, not stdout");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["schema"], "afp-report/1");
    assert_eq!(report["config"]["report"], path.to_str().unwrap());
    assert_eq!(report["results"]["residual"], "0");
}
