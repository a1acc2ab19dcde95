use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nse::{CutoffFunction, WindowFamily, WindowMode};

const BASE: &str = r#"
[window]
B = 2.0
M = 5
j_min = 0
j_max = 8

[model]
alpha = 3.0
"#;

fn nse(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nse"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn setup(extra: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, format!("{BASE}{extra}")).unwrap();
    (dir, config)
}

fn scenario(mask: &str, noise: &str, scales: &str, replicates: usize) -> String {
    format!(
        r#"
[setups.S]
mask = {mask}
noise = {noise}

[scenario]
schedule = [{{ from = 0, to = 8, setup = "S" }}]

[mc]
replicates = {replicates}
seed = 5
scales = {scales}
"#
    )
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn map_values(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn windows_profile_and_partition() {
    let (dir, config) = setup("[mc]\nscales = [3, 4]\n");
    let out = dir.path().join("out");
    assert!(nse(&["windows"], &config, &out).status.success());

    let family = WindowFamily::new(CutoffFunction::new(2.0, 5).unwrap(), WindowMode::Tight, 0, 8).unwrap();
    let peak: f64 = (0..=16)
        .map(|l| family.eval(3, l) * (2 * l + 1) as f64 / (4.0 * PI))
        .sum();
    let profile = csv_rows(&out.join("profiles.csv"));
    let first = &profile[0];
    assert_eq!(first[0], "3");
    assert_eq!(first[1].parse::<f64>().unwrap(), 0.0);
    assert!((first[2].parse::<f64>().unwrap() - peak).abs() < 1e-12 * peak);

    for row in csv_rows(&out.join("partition.csv")).iter().skip(1) {
        assert!((row[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{row:?}");
    }
    let windows = csv_rows(&out.join("windows.csv"));
    assert!(windows.iter().any(|r| r[0] == "3" && r[1] == "8" && r[2].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn windows_with_no_scales_is_header_only() {
    let (dir, config) = setup("[mc]\nscales = []\n");
    let out = dir.path().join("out");
    assert!(nse(&["windows"], &config, &out).status.success());
    assert_eq!(std::fs::read_to_string(out.join("profiles.csv")).unwrap(), "j,theta,value\n");
    assert_eq!(std::fs::read_to_string(out.join("windows.csv")).unwrap(), "j,l,b\n");
}

#[test]
fn synth_without_noise_has_zero_noise_map() {
    let extra = scenario(r#"{ kind = "polar-cap", theta_cut = 0.7 }"#, r#"{ kind = "constant", sigma = 0.0 }"#, "[3]", 2);
    let (dir, config) = setup(&extra);
    let out = dir.path().join("out");
    assert!(nse(&["synth"], &config, &out).status.success());
    assert!(map_values(&out.join("wz_j3.map")).iter().all(|v| *v == 0.0));
    assert_eq!(map_values(&out.join("wx_j3.map")), map_values(&out.join("y_j3.map")));
}

#[test]
fn synth_with_everything_masked_has_zero_observation() {
    let extra = scenario(r#"{ kind = "polar-cap", theta_cut = 4.0 }"#, r#"{ kind = "constant", sigma = 1.0 }"#, "[2]", 2);
    let (dir, config) = setup(&extra);
    let out = dir.path().join("out");
    assert!(nse(&["synth"], &config, &out).status.success());
    assert!(map_values(&out.join("y_j2.map")).iter().all(|v| *v == 0.0));
}

#[test]
fn synth_is_reproducible_and_seed_sensitive() {
    let extra = scenario(r#"{ kind = "full-sky" }"#, r#"{ kind = "constant", sigma = 0.1 }"#, "[2, 3]", 2);
    let (dir, config) = setup(&extra);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(nse(&["synth"], &config, &a).status.success());
    assert!(nse(&["synth"], &config, &b).status.success());
    assert!(nse(&["synth", "--seed", "6"], &config, &c).status.success());
    for name in ["wx_j2.map", "wsigma_j3.map", "wz_j3.map", "y_j3.map"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_ne!(std::fs::read(a.join("y_j3.map")).unwrap(), std::fs::read(c.join("y_j3.map")).unwrap());
}

#[test]
fn estimate_from_synth_reproduces_mc_replicate_zero() {
    let extra = scenario(
        r#"{ kind = "polar-cap", theta_cut = 0.9 }"#,
        r#"{ kind = "colatitude-linear", north = 0.02, south = 0.06 }"#,
        "[2, 3]",
        3,
    ) + "\n[estimator]\nthreshold = \"quantile\"\nq = 0.6\n";
    let (dir, config) = setup(&extra);
    let out = dir.path().join("out");
    assert!(nse(&["synth"], &config, &out).status.success());
    assert!(nse(&["estimate"], &config, &out).status.success());
    assert!(nse(&["mc"], &config, &out).status.success());

    let single = csv_rows(&out.join("estimates.csv"));
    let mc: Vec<Vec<String>> = csv_rows(&out.join("results.csv"))
        .into_iter()
        .filter(|r| r[1] == "0")
        .collect();
    assert_eq!(single.len(), 2);
    assert_eq!(single, mc);
}

#[test]
fn estimate_names_the_missing_scale() {
    let extra = scenario(r#"{ kind = "full-sky" }"#, r#"{ kind = "constant", sigma = 0.1 }"#, "[2, 3]", 2);
    let (dir, config) = setup(&extra);
    let out = dir.path().join("out");
    assert!(nse(&["synth"], &config, &out).status.success());
    std::fs::remove_file(out.join("y_j3.map")).unwrap();
    let run = nse(&["estimate"], &config, &out);
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("j = 3"), "{stderr}");
}

#[test]
fn estimate_rejects_maps_from_another_grid() {
    let extra = scenario(r#"{ kind = "full-sky" }"#, r#"{ kind = "constant", sigma = 0.1 }"#, "[2]", 2);
    let (dir, config) = setup(&extra);
    let out = dir.path().join("out");
    assert!(nse(&["synth"], &config, &out).status.success());
    std::fs::rename(out.join("y_j2.map"), out.join("y_j3.map")).unwrap();
    let other = scenario(r#"{ kind = "full-sky" }"#, r#"{ kind = "constant", sigma = 0.1 }"#, "[3]", 2);
    std::fs::write(&config, format!("{BASE}{other}")).unwrap();
    let run = nse(&["estimate"], &config, &out);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn mc_writes_results_and_summary() {
    let extra = scenario(r#"{ kind = "full-sky" }"#, r#"{ kind = "constant", sigma = 0.05 }"#, "[2, 3]", 6);
    let (dir, config) = setup(&extra);
    let out = dir.path().join("out");
    assert!(nse(&["mc", "--threads", "2"], &config, &out).status.success());
    assert_eq!(csv_rows(&out.join("results.csv")).len(), 12);
    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 2);
    assert!(summary.iter().all(|r| r[1].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn validate_reports_every_check() {
    let extra = scenario(r#"{ kind = "full-sky" }"#, r#"{ kind = "constant", sigma = 0.0 }"#, "[2, 3]", 2);
    let (dir, config) = setup(&extra);
    let run = nse(&["validate"], &config, &dir.path().join("out"));
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("ok")).count(), 7, "{stdout}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn configuration_errors_exit_with_two() {
    let (dir, config) = setup("[mc]\nreplicas = 3\n");
    assert_eq!(nse(&["mc"], &config, &dir.path().join("o")).status.code(), Some(2));

    let missing = dir.path().join("absent.toml");
    assert_eq!(nse(&["windows"], &missing, &dir.path().join("o")).status.code(), Some(2));

    let (dir, config) = setup("[mc]\nscales = [12]\n");
    assert_eq!(nse(&["mc"], &config, &dir.path().join("o")).status.code(), Some(2));

    let (dir, config) = setup("");
    assert_eq!(nse(&["mc", "--threads", "0"], &config, &dir.path().join("o")).status.code(), Some(2));
}

#[test]
fn relative_paths_follow_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("conf");
    std::fs::create_dir(&nested).unwrap();
    let config = nested.join("run.toml");
    std::fs::write(&config, format!("{BASE}[mc]\nscales = [2]\n[io]\nout = \"results\"\n")).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_nse"))
        .args(["windows", "--config"])
        .arg(&config)
        .current_dir(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(nested.join("results/windows.csv").exists());
}
