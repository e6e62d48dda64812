use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn qkolmo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkolmo"))
        .args(args)
        .env_remove("QKOLMO_CAPS")
        .output()
        .expect("spawn qkolmo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_identity() {
    let o = qkolmo(&["validate", &fixture("identity.qtm"), "--tmax", "8", "--nmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("unitary: yes"), "{s}");
    assert!(s.contains("# machine: identity:"));
    assert!(s.contains("# caps: "));
    assert!(s.contains("# mode: exact"));
}

#[test]
fn validate_non_unitary_exits_one() {
    let o = qkolmo(&["validate", &fixture("collision.qtm")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unitary: no"));
}

#[test]
fn simulate_identity() {
    let o = qkolmo(&["simulate", &fixture("identity.qtm"), "--input", "01", "--tmax", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("halts at t=3, output 01"));
}

#[test]
fn simulate_non_halting_is_domain_error() {
    let o = qkolmo(&[
        "simulate",
        &fixture("never_halting.qtm"),
        "--input",
        "01",
        "--tmax",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not halt"));
}

#[test]
fn counting_trivial_case() {
    let o = qkolmo(&["counting", "--d", "8", "--delta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("bound: 3\n"), "{s}");
    assert!(s.contains("upper bound"));
}

#[test]
fn code_worked_sequence() {
    let o = qkolmo(&["code", "--lengths", "1,2,2", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1\t0\n2\t10\n2\t11\n"), "{s}");
    assert!(s.contains("kraft: 1\n"));
    let bad = qkolmo(&["code", "--lengths", "1,1,1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qkolmo(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        qkolmo(&["counting", "--d", "8", "--delta", "0", "--frobnicate"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qkolmo(&["counting", "--d", "8", "--delta", "0", "--caps", "nonsense=1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qkolmo(&["--help"]).status.code(), Some(0));
}

#[test]
fn caps_env_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_qkolmo"))
        .args(["validate", &fixture("identity.qtm")])
        .env("QKOLMO_CAPS", "t=128")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("t=128"));
}

#[test]
fn encode_decode_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("qkolmo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let prog = dir.join("p.prog").display().to_string();
    let o = qkolmo(&["encode", &fixture("identity.qtm"), "--input", "10", "-o", &prog]);
    assert_eq!(o.status.code(), Some(0));
    let d = qkolmo(&["decode", &prog]);
    assert_eq!(d.status.code(), Some(0));
    let s = stdout(&d);
    assert!(s.contains("quantum length: 3"), "{s}");
    assert!(s.contains("output: 10"), "{s}");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn halting_spaces_report() {
    let o = qkolmo(&[
        "halting-spaces",
        &fixture("identity.qtm"),
        "--n",
        "2",
        "--format",
        "tsv",
    ]);
    assert!(stdout(&o).contains("3\t4\n"));
}

#[test]
fn qc_bound_carries_direction() {
    let o = qkolmo(&[
        "qc-bound",
        &fixture("identity.qtm"),
        "--target",
        "01",
        "--delta",
        "1/10",
    ]);
    let s = stdout(&o);
    assert!(s.contains("<= 2 (upper bound over searched set)"), "{s}");
}

#[test]
fn chi_two_states() {
    let o = qkolmo(&["chi", "--state", "nsq 1 : 1, 0", "--state", "nsq 2 : 1, 1"]);
    assert!(stdout(&o).contains("chi: 0.6008"));
}

#[test]
fn brudno_tsv_columns() {
    let o = qkolmo(&["brudno", &fixture("skew.src"), "--ns", "4,16", "--format", "tsv"]);
    let s = stdout(&o);
    assert!(s.contains("n\tbeta\tbeta/n\ts\tgap\n"));
    assert_eq!(s.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn verify_suite_default_passes() {
    let o = qkolmo(&["verify-suite", "--config", &fixture("default.suite")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_suite_broken_fails() {
    let o = qkolmo(&["verify-suite", "--config", &fixture("broken.suite")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_suite_is_deterministic_and_seed_stable() {
    let cfg = fixture("default.suite");
    let a = stdout(&qkolmo(&["verify-suite", "--config", &cfg, "--seed", "1"]));
    let b = stdout(&qkolmo(&["verify-suite", "--config", &cfg, "--seed", "1"]));
    assert_eq!(a, b);
    let c = stdout(&qkolmo(&["verify-suite", "--config", &cfg, "--seed", "2"]));
    let verdicts = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
            .map(|l| l[..4].to_string())
            .collect()
    };
    assert_eq!(verdicts(&a), verdicts(&c));
}
