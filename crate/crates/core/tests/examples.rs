//! Every example runs to completion.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[path = $path]
        #[allow(dead_code)]
        mod $name;
    };
}

example!(windows, "../examples/windows.rs");
example!(cubature, "../examples/cubature.rs");
example!(sht_roundtrip, "../examples/sht_roundtrip.rs");
example!(synthesize_observe, "../examples/synthesize_observe.rs");
example!(needlet_coefficients, "../examples/needlet_coefficients.rs");
example!(estimate_scale, "../examples/estimate_scale.rs");
example!(monte_carlo, "../examples/monte_carlo.rs");
example!(localization, "../examples/localization.rs");
example!(config_pipeline, "../examples/config_pipeline.rs");

#[test]
fn windows_runs() {
    windows::main().unwrap();
}

#[test]
fn cubature_runs() {
    cubature::main().unwrap();
}

#[test]
fn sht_roundtrip_runs() {
    sht_roundtrip::main().unwrap();
}

#[test]
fn synthesize_observe_writes_maps() {
    let dir = tempfile::tempdir().unwrap();
    synthesize_observe::run(Some(dir.path().display().to_string())).unwrap();
    assert!(dir.path().join("y_j3.map").exists());
    assert!(dir.path().join("y_j4.map").exists());
}

#[test]
fn needlet_coefficients_runs() {
    needlet_coefficients::main().unwrap();
}

#[test]
fn estimate_scale_runs() {
    estimate_scale::main().unwrap();
}

#[test]
fn monte_carlo_runs() {
    monte_carlo::run(Some("8".into())).unwrap();
}

#[test]
fn localization_runs() {
    localization::main().unwrap();
}

#[test]
fn config_pipeline_runs_on_every_shipped_config() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["quick.toml", "desk.toml", "theorem_schedule.toml"] {
        config_pipeline::run(Some(root.join(name).display().to_string())).unwrap();
    }
}
