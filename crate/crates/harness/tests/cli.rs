use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tomolab::band::band_at;
use tomolab::NoiseModel;
use tomolab_core::entanglement::concurrence;
use tomolab_core::families::input_state;

fn tomolab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomolab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn band_output_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let run = tomolab(&["band", "--fast", "--seed", "11"], out);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let first = fs::read(a.join("band.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("band.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("# noise_metric=trace_distance"));
    assert!(text.contains("seed=11"));

    let c = dir.path().join("c");
    tomolab(&["band", "--fast", "--seed", "12"], &c);
    assert_ne!(fs::read(a.join("band.csv")).unwrap(), fs::read(c.join("band.csv")).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tomolab(&["bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(tomolab(&["band", "--seed", "nope"], dir.path()).status.code(), Some(1));
    let cfg = write_config(dir.path(), r#"{"band": {"lambda_count": 3, "samples_per_lambda": 0}}"#);
    assert_eq!(tomolab(&["band", "--config", &cfg], dir.path()).status.code(), Some(1));
    let cfg = write_config(dir.path(), r#"{"unknown_section": {}}"#);
    assert_eq!(tomolab(&["band", "--config", &cfg], dir.path()).status.code(), Some(1));
}

#[test]
fn certificate_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"multicopy": {"states": 20, "tolerance": 0.0}}"#);
    let run = tomolab(&["multicopy", "--config", &cfg], dir.path());
    assert_eq!(run.status.code(), Some(2), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(dir.path().join("multicopy.csv").exists());
}

#[test]
fn config_overrides_are_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"band": {"lambda_count": 4, "samples_per_lambda": 10}}"#);
    let run = tomolab(&["band", "--config", &cfg], dir.path());
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(dir.path().join("band.csv")).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 4);
}

#[test]
fn multicopy_and_extend_succeed() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["multicopy", "extend"] {
        let run = tomolab(&[cmd, "--fast"], dir.path());
        assert_eq!(run.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&run.stderr));
    }
    assert!(dir.path().join("werner_thresholds.csv").exists());
    let json = fs::read_to_string(dir.path().join("extension_counterexample.json")).unwrap();
    serde_json::from_str::<serde_json::Value>(&json).unwrap();
}

#[test]
fn noiseless_band_collapses() {
    let q = band_at(0.45, 50, &NoiseModel::zero(), 1).unwrap();
    assert!(q.width() < 1e-10, "width {}", q.width());
}

#[test]
fn band_width_grows_with_noise() {
    let widths: Vec<f64> = [0.0, 0.02, 0.0579, 0.10]
        .iter()
        .map(|&t| band_at(0.45, 500, &NoiseModel::scaled(t), 7).unwrap().width())
        .collect();
    assert!(widths.windows(2).all(|w| w[0] <= w[1]), "{widths:?}");
}

#[test]
fn input_concurrence_increases_along_the_grid() {
    let values: Vec<f64> = tomolab::band::lambda_grid(50)
        .into_iter()
        .map(|l| concurrence(&input_state::<f64>(l).unwrap()).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
}
