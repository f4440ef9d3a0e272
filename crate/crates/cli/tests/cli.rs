use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_swlab");

fn swlab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn swlab")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const FREE: &str = r#"
[experiments.free]
experiment = "deviation_scan"
potential.coeffs = [[1, 0.0, 0.0]]
t_max = 2.0
n_list = [2, 4]
k_grid = 3
"#;

const SMALL: &str = r#"
[experiments.scan]
experiment = "deviation_scan"
potential.coeffs = [[1, 2.5066282746310002, 0.0]]
lambda = 0.1
t_max = 1.5
n_list = [2, 3, 4, 6, 8]
k_grid = 2
alpha = 1.0

[experiments.persist]
experiment = "acceleration_persistence"
potential.coeffs = [[1, 2.5066282746310002, 0.0]]
lambda = 0.1
t_max = 2.0
n_list = [4, 8]
epsilon = 0.2

[experiments.probe]
experiment = "bound_state_probe"
potential.coeffs = [[1, 2.5066282746310002, 0.0]]
lambda = 0.1
t_max = 2.0
n_list = [3, 4]
k_grid = 2
"#;

#[test]
fn free_run_sits_at_error_floor() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FREE);
    let out = dir.path().join("out");
    let o = swlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("free.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("experiment,n,k,t,window_prob,dev_norm,err,leak,valid"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 9);
        let dev: f64 = f[5].parse().unwrap();
        let err: f64 = f[6].parse().unwrap();
        assert!(dev <= err, "{line}");
        assert_eq!(f[8], "true");
        rows += 1;
    }
    assert!(rows > 0);
    assert!(!csv.contains('\r'));
    assert!(fs::read_to_string(out.join("summary.txt")).unwrap().starts_with("free: pass"));
}

#[test]
fn csv_floats_carry_17_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FREE);
    let out = dir.path().join("out");
    assert_eq!(swlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("free.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let k = row.split(',').nth(2).unwrap();
    let mantissa = k.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{k}");
}

#[test]
fn bandwidth_above_buffer_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[experiments.bad]
experiment = "deviation_scan"
potential.coeffs = [[1, 0.1, 0.0], [6, 0.1, 0.0]]
N = 5
buffer = 4
t_max = 1.0
n_list = [1]
"#,
    );
    let o = swlab(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("N > B >= bandwidth"), "{err}");
}

#[test]
fn unknown_keys_and_names_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &FREE.replace("k_grid = 3", "k_grdi = 3"));
    let o = swlab(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k_grdi"));
    let cfg = write_config(dir.path(), FREE);
    let o = swlab(&["run", "--config", &cfg, "--only", "nope", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn leakage_is_a_tolerance_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[experiments.tight]
experiment = "deviation_scan"
potential.coeffs = [[1, 2.5, 0.0]]
N = 8
buffer = 2
t_max = 3.0
n_list = [4]
"#,
    );
    let o = swlab(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let o = swlab(&["--threads", threads, "run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let files: Vec<Vec<u8>> = ["scan.csv", "persist.csv", "probe.csv", "summary.txt"]
            .iter()
            .map(|f| fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let summary = String::from_utf8(outputs[0][3].clone()).unwrap();
    assert!(summary.contains("exponent="), "{summary}");
    assert!(summary.contains("found_n=4"), "{summary}");
}

#[test]
fn only_selects_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let o = swlab(&["run", "--config", &cfg, "--only", "persist", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("persist.csv").exists());
    assert!(!out.join("scan.csv").exists());
}

#[test]
fn verify_passes() {
    let o = swlab(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn injected_symmetry_fault_fails_verify() {
    let o = swlab(&["verify", "--inject-fault", "hermitian"]);
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("hermitian symmetry"), "{text}");
}
