use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_masscheck"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(path: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(path).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL_CORNER: &str = r#"
name = "small"
dimension = 3
pipeline = "corner_positive_mass"

[inner]
preset = "flat_ball"
radius = 2.5

[outer]
preset = "flat_end"
r_start = 2.5

[smoothing]
deltas = [0.1, 0.2]
"#;

#[test]
fn presets_lists_every_preset() {
    let out = bin().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["flat_ball", "flat_end", "schwarzschild", "cylinder", "table"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn passing_scenario_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "small.toml", SMALL_CORNER);
    let out = run(&path, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/small_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2.000000000000e-1,"));
    assert!(dir.path().join("out/small_summary.csv").exists());
    let text = std::fs::read_to_string(dir.path().join("out/small.txt")).unwrap();
    assert!(text.contains("verdict:  PASS"));
    assert!(text.contains("theorem:  positive mass across a corner"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "small.toml", SMALL_CORNER);
    run(&path, &dir.path().join("a"), &["--jobs", "1"]);
    run(&path, &dir.path().join("b"), &["--jobs", "3"]);
    for f in ["small_sweep.csv", "small_summary.csv", "small.txt"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn hypothesis_violation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_CORNER.replace(
        "preset = \"flat_end\"\nr_start = 2.5",
        "preset = \"schwarzschild\"\nmass = -0.2\nr_start = 2.5",
    );
    let path = write(dir.path(), "neg.toml", &body);
    let out = run(&path, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("HYPOTHESIS-VIOLATED"));
}

#[test]
fn parse_error_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_CORNER.replace("radius = 2.5", "radius = 2.5\ncolour = 1");
    let path = write(dir.path(), "bad.toml", &body);
    let out = run(&path, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.toml:9:"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["run"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["run", "x.toml", "--tolerance-profile", "loose"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run", "does-not-exist.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
name = "mismatch"
dimension = 3
pipeline = "shi_tam"
[fill_in]
preset = "flat_ball"
radius = 1.0
[bartnik]
rho = 1.5
eta = 2.0
"#;
    let path = write(dir.path(), "m.toml", body);
    let out = run(&path, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("interface mismatch"));
}

#[test]
fn shipped_fill_in_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&scenario("flat_ball_fill_in.toml"), dir.path(), &["--tolerance-profile", "strict"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn shipped_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            masscheck_core::scenario::Scenario::load(&path).unwrap();
            count += 1;
        }
    }
    assert!(count >= 6);
}
