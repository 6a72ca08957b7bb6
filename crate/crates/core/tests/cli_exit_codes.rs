use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_metaplectic")
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_file(path: &Path, extra: &[&str]) -> Output {
    Command::new(bin()).arg("run").arg(path).args(extra).output().unwrap()
}

fn write_scenario(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn orbit_example_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        &dir,
        "orbit.json",
        r#"{"experiment":"orbit","parameters":{"object":[[1,0]],"couplings":[[1,0]],"times":[0,0.6931471805599453]}}"#,
    );
    let out = run_file(&path, &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,lambda_0_re,lambda_0_im,mu_0_re,mu_0_im,norm_sq");
    let last: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((last[1] - 1.25).abs() < 1e-12 && (last[3] - 0.75).abs() < 1e-12 && (last[5] - 2.125).abs() < 1e-12);
}

#[test]
fn malformed_inputs_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "empty_times.json",
            r#"{"experiment":"orbit","parameters":{"object":[[1,0]],"couplings":[[1,0]],"times":[]}}"#,
        ),
        ("unknown_key.json", r#"{"experiment":"marker-scan","colour":"red"}"#),
        ("bad_json.json", "{"),
        ("zero_time.json", r#"{"experiment":"recover","parameters":{"pointer":[[1,0]],"couplings":[[1,0]],"time":0}}"#),
    ];
    for (name, body) in cases {
        let out = run_file(&write_scenario(&dir, name, body), &[]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!out.stderr.is_empty());
    }
    let out = run_file(&dir.path().join("missing.json"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = Command::new(bin()).arg("verify").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let low = Command::new(bin()).args(["verify", "--cutoff", "5"]).output().unwrap();
    assert_eq!(low.status.code(), Some(3));
    let text = String::from_utf8(low.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("conjugation_coupling,") && l.contains(",false,")));
    let huge = Command::new(bin()).args(["verify", "--cutoff", "100"]).output().unwrap();
    assert_eq!(huge.status.code(), Some(2));
}

#[test]
fn output_flag_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json");
    let out =
        run_file(&scenarios_dir().join("recover.json"), &["--format", "json", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(value["experiment"], "recover");
}

#[test]
fn canned_scenarios_are_byte_stable() {
    let mut seen = 0;
    for entry in std::fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let first = run_file(&path, &[]);
        let second = run_file(&path, &[]);
        assert_eq!(first.status.code(), Some(0), "{}", path.display());
        assert_eq!(first.stdout, second.stdout, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 6);
}
