use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::Parser;
use eisen_sp4::cli::{run, run_poles, Cli, Scenario};
use eisen_sp4::local_ops::RuleTable;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eisen-sp4")).args(args).output().expect("binary runs")
}

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn scenario_files() -> Vec<PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(manifest_path("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    files
}

#[test]
fn every_scenario_meets_its_expectations() {
    let rules = RuleTable::standard();
    let files = scenario_files();
    assert!(files.len() >= 8);
    for f in files {
        let sc = Scenario::load(&f).unwrap();
        assert!(!sc.expect.is_empty(), "{} has no expectations", f.display());
        let out = run_poles(&rules, &sc).unwrap();
        assert!(out.pass, "{}:\n{}", f.display(), out.text);
    }
}

#[test]
fn json_output_is_versioned_and_deterministic() {
    for args in [
        vec!["--format", "json", "weyl"],
        vec!["--format", "json", "normfactor", "--case", "siegel", "--w", "c2sc2"],
        vec!["--format", "json", "poles", "--case", "heisenberg", "--chi", "trivial", "--s0", "0", "--s0", "-2"],
        vec!["--format", "json", "verify", "--theorem", "S+"],
    ] {
        let a = bin(&args);
        let b = bin(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?} is not deterministic");
        let v: Value = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["command"], args[2]);
    }
}

#[test]
fn weyl_lists_conventional_names() {
    let cli = Cli::parse_from(["eisen-sp4", "weyl", "--case", "heisenberg"]);
    let out = run(&cli).unwrap();
    let names: Vec<&str> = out.text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["id", "s", "sc1", "c1"]);
}

#[test]
fn profile_file_and_output_path() {
    let dir = std::env::temp_dir().join(format!("eisen-sp4-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let profile = manifest_path("scenarios/siegel_trivial_half.toml");
    let o = bin(&["--format", "json", "--output", out.to_str().unwrap(), "poles", "--profile", profile.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["reports"][0]["pole_order"]["order"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failed_expectation_sets_exit_code() {
    let dir = std::env::temp_dir().join(format!("eisen-sp4-expect-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wrong.toml");
    std::fs::write(&path, "case = \"heisenberg\"\ncharacter = \"trivial\"\ns0 = [\"2\"]\n\n[[expect]]\ns0 = \"2\"\npole_order = 0\n").unwrap();
    let o = bin(&["poles", "--profile", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn corrupted_rules_fail_verification() {
    let dir = std::env::temp_dir().join(format!("eisen-sp4-rules-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let original = std::fs::read_to_string(manifest_path("data/rules.txt")).unwrap();
    let flipped = original.replacen("| arch | trivial | even(s)&s<-1 |", "| arch | trivial | odd(s)&s<-1 |", 1);
    assert_ne!(flipped, original);
    let path = dir.join("rules.txt");
    std::fs::write(&path, flipped).unwrap();
    let o = bin(&["--rules", path.to_str().unwrap(), "verify", "--theorem", "H-"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));

    std::fs::write(&path, "pole | broken\n").unwrap();
    let o = bin(&["--rules", path.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rules line 1"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_input_is_reported() {
    let o = bin(&["normfactor", "--case", "siegel", "--w", "s"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["poles", "--case", "siegel"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["verify", "--theorem", "X"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numcheck_tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_eisen-sp4"))
        .args(["--format", "json", "numcheck", "--chi", "quadratic"])
        .env("SP4_NUMCHECK_TOL", "0.04")
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tolerance"], 0.04);
    assert!(v["rows"].as_array().unwrap().len() > 30);
}
