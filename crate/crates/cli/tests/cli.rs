use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use noether_cli::artifacts::sha256_hex;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noether"))
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn run(args: &[&str], config: &Path, out: &Path) -> i32 {
    let status = bin().args(args).arg("--config").arg(config).arg("--out").arg(out).status().unwrap();
    status.code().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("c.toml");
    fs::write(&p, text).unwrap();
    p
}

fn summary(out: &Path, command: &str) -> Value {
    serde_json::from_slice(&fs::read(out.join(format!("{}.json", command))).unwrap()).unwrap()
}

const BLOWUP: &str = r#"
[model]
n = 1
damping = "power"
m = "1"
nonlinearity = "power"
f0 = "-1"
p = "3"
[grid]
extent = 20.0
points = 128
[run]
t_end = 10.0
[initial]
amplitude = 5.0
center = [0.0]
"#;

const SMALL_RUN: &str = r#"
[model]
n = 2
damping = "power"
m = "1"
nonlinearity = "power"
f0 = "1"
p = "3"
[grid]
extent = 16.0
points = 32
[run]
t_end = 2.0
stride = 4
[initial]
center = [0.5, 0.0]
"#;

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(dir.path(), "[model\nn = 2\n");
    assert_eq!(run(&["verify-symbolic"], &c, &out), 2);
    let c = write_config(dir.path(), "[model]\nn = 2\ncolour = \"red\"\n");
    assert_eq!(run(&["verify-symbolic"], &c, &out), 2);
    let c = write_config(dir.path(), "[model]\nn = 2\n[grid]\nextent = 10.0\n");
    assert_eq!(run(&["simulate"], &c, &out), 2);
    assert!(!out.exists());
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let code = bin().arg("simulate").arg("--out").arg(&out).status().unwrap().code().unwrap();
    assert_eq!(code, 2);
    assert!(!out.exists());
}

#[test]
fn unknown_expected_generator_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), "[model]\nn = 2\n[verify]\nexpect_symmetry = [\"Q_9\"]\n");
    assert_eq!(run(&["verify-symbolic"], &c, &dir.path().join("out")), 2);
}

#[test]
fn exponential_model_off_the_critical_damping_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(
        dir.path(),
        "[model]\nn = 3\ndamping = \"power\"\nm = \"1\"\nnonlinearity = \"exponential\"\nf0 = \"sym\"\n\
         [verify]\nexpect_symmetry = [\"C_1_exp\"]\n",
    );
    assert_eq!(run(&["verify-symbolic"], &c, &out), 1);
    let s = summary(&out, "verify-symbolic");
    assert_eq!(s["status"], "fail");
    assert!(s["result"]["failures"].as_array().unwrap().iter().any(|f| f.as_str().unwrap().contains("C_1_exp")));
}

#[test]
fn bundled_examples_pass() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(examples()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let line = text.lines().find_map(|l| l.strip_prefix("# Run: noether ")).expect("run line");
        let command = line.split_whitespace().next().unwrap();
        let out = dir.path().join(path.file_stem().unwrap());
        assert_eq!(run(&[command], &path, &out), 0, "{}", path.display());
        assert_eq!(summary(&out, command)["status"], "pass");
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn summary_hashes_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(dir.path(), SMALL_RUN);
    assert_eq!(run(&["simulate"], &c, &out), 0);
    let s = summary(&out, "simulate");
    let files = s["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    for want in ["energy.csv", "energy.svg", "snapshots.bin", "fields.csv"] {
        assert!(names.contains(&want), "{} missing", want);
    }
    for f in files {
        let data = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&data));
        assert_eq!(f["bytes"].as_u64().unwrap(), data.len() as u64);
    }
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_config(dir.path(), SMALL_RUN);
    let hashes = |name: &str| {
        let out = dir.path().join(name);
        let code = run(&["charges", "--jobs", "1"], &c, &out);
        let s = summary(&out, "charges");
        (code, s["files"].clone(), fs::read(out.join("charges.json")).unwrap())
    };
    let (ca, a, sa) = hashes("a");
    let (cb, b, sb) = hashes("b");
    assert_eq!(ca, cb);
    assert_eq!(a, b);
    assert_eq!(sa, sb);
}

#[test]
fn blowup_exits_3_and_keeps_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(dir.path(), BLOWUP);
    assert_eq!(run(&["simulate"], &c, &out), 3);
    let s = summary(&out, "simulate");
    assert_eq!(s["status"], "blow-up");
    assert!(s["result"]["blowup"]["step"].as_u64().unwrap() > 0);
    assert!(out.join("snapshots.bin").exists());
    assert!(out.join("energy.csv").exists());
}

#[test]
fn overrides_reach_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(dir.path(), SMALL_RUN);
    let code = bin()
        .args(["simulate", "--set", "grid.points=16", "--set", "output.snapshots=false"])
        .arg("--config")
        .arg(&c)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .code()
        .unwrap();
    assert_eq!(code, 0);
    let s = summary(&out, "simulate");
    assert_eq!(s["config"]["grid"]["points"], 16);
    assert!(!out.join("snapshots.bin").exists());
    let code = bin().args(["simulate", "--set", "grid.points"]).arg("--config").arg(&c).arg("--out").arg(&out).status().unwrap();
    assert_eq!(code.code().unwrap(), 2);
}

#[test]
fn derived_factors_match_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(
        dir.path(),
        "[model]\nn = 3\ndamping = \"power\"\nm = \"sym\"\nnonlinearity = \"power\"\nf0 = \"sym\"\np = \"special\"\n\
         [factors.expect.C_2]\nq = \"-2 - m\"\n",
    );
    assert_eq!(run(&["derive-factors"], &c, &out), 0);
    let c = write_config(
        dir.path(),
        "[model]\nn = 3\ndamping = \"power\"\nm = \"sym\"\nnonlinearity = \"exponential\"\nf0 = \"sym\"\n\
         [factors]\nsolve_for = [\"m\"]\n[factors.expect.C_1_exp]\nm = \"-2\"\n",
    );
    assert_eq!(run(&["derive-factors"], &c, &out), 0);
    let c = write_config(
        dir.path(),
        "[model]\nn = 3\ndamping = \"power\"\nm = \"sym\"\nnonlinearity = \"exponential\"\nf0 = \"sym\"\n\
         [factors]\nsolve_for = [\"m\"]\n[factors.expect.C_1_exp]\nm = \"-3\"\n",
    );
    assert_eq!(run(&["derive-factors"], &c, &out), 1);
}

#[test]
fn report_collects_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let c = write_config(dir.path(), SMALL_RUN);
    assert_eq!(run(&["simulate"], &c, &out), 0);
    assert_eq!(run(&["verify-symbolic"], &c, &out), 0);
    let code = bin().arg("report").arg("--out").arg(&out).status().unwrap().code().unwrap();
    assert_eq!(code, 0);
    let md = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("simulate") && md.contains("verify-symbolic"));
}
