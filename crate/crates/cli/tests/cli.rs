use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use bergman_cli::config::{self, ExperimentConfig, SHIPPED};
use bergman_cli::SCHEMA_VERSION;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bergman-cli-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Dotted key paths with array elements collapsed to `[]`.
fn key_paths(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                out.insert(p.clone());
                key_paths(x, &p, out);
            }
        }
        Value::Array(xs) => {
            for x in xs {
                key_paths(x, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    assert_eq!(SHIPPED.len(), 20);
    for cfg in config::shipped_all().unwrap() {
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg, "{}", cfg.name);
    }
    let files = std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/configs")).unwrap().count();
    assert_eq!(files, SHIPPED.len());
}

#[test]
fn unknown_fields_are_rejected() {
    let mut v: Value = serde_json::from_str(SHIPPED[0].1).unwrap();
    v["degre"] = 3.into();
    assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
}

#[test]
fn report_schema_matches_golden() {
    let report = bergman_cli::run(&config::shipped("disk-oracle").unwrap()).unwrap();
    let v: Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    let mut paths = BTreeSet::new();
    key_paths(&v, "", &mut paths);
    let got = format!(
        "schema_version {SCHEMA_VERSION}\n{}\n",
        paths.into_iter().collect::<Vec<_>>().join("\n")
    );
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/report_schema.txt");
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(golden, &got).unwrap();
    }
    let want = std::fs::read_to_string(golden).unwrap();
    assert_eq!(got, want, "report schema changed; bump SCHEMA_VERSION and rerun with BLESS=1");
}

#[test]
fn reruns_are_bit_identical() {
    for name in ["control-l-shape", "family-ball-joint", "question-square"] {
        let cfg = config::shipped(name).unwrap();
        let mut a = bergman_cli::run(&cfg).unwrap();
        let mut b = bergman_cli::run(&cfg).unwrap();
        a.wall_time_s = 0.0;
        b.wall_time_s = 0.0;
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap(), "{name}");
    }
}

#[test]
fn exploratory_reports_have_no_verdicts() {
    let r = bergman_cli::run(&config::shipped("question-disk").unwrap()).unwrap();
    let v: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert!(v.get("verdicts").is_none());
    assert_eq!(v["exploratory"], Value::Bool(true));
    assert!(r.passed());
}

#[test]
fn cli_writes_json_and_csv() {
    let dir = scratch("out");
    let out = bin()
        .args(["kernel", "eval", "--csv", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("disk-oracle (kernel_eval) PASS"));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("disk-oracle.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    let tables: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(!tables.is_empty());
}

#[test]
fn cli_json_flag_prints_the_report() {
    let out = bin().args(["convexity", "question", "--json"]).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["experiment"], "question_explorer");
    assert!(v.get("verdicts").is_none());
}

#[test]
fn exit_code_reflects_verdicts() {
    // Koebe coefficients with the expectation of the half-plane map fail.
    let mut v: Value = serde_json::from_str(config::SHIPPED.iter().find(|(n, _)| *n == "classic-koebe").unwrap().1).unwrap();
    v["experiment"]["classic_univalent"]["expect"] = "no_violation".into();
    v["experiment"]["classic_univalent"]["witness_near"] = Value::Null;
    v["experiment"]["classic_univalent"]["witness_radius"] = Value::Null;
    let dir = scratch("exit");
    let path = dir.join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = bin().args(["classic", "univalent", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    // A config of the wrong kind is a usage error.
    let out = bin().args(["kernel", "converge", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["classic", "univalent", "--coeffs", "[0, 1, 0.25]", "--r-grid", "0.5,0.9", "--theta-count", "64"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn suite_list_names_every_config() {
    let out = bin().args(["suite", "--list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), SHIPPED.len());
}
