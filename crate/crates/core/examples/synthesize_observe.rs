//! A Gaussian field seen through a polar-cap mask with latitude-dependent
//! noise, written as map files.
//!
//! ```text
//! cargo run --example synthesize_observe [OUT_DIR]
//! ```

use nse::io::write_map;
use nse::mc::{Experiment, ScaleRun};
use nse::model::{MaskSpec, NoiseSpec, Scenario, SeededRng, SpectrumModel, StreamRole};
use nse::estimator::EstimatorConfig;
use nse::{CutoffFunction, WindowFamily, WindowMode};

fn main() -> nse::Result<()> {
    run(std::env::args().nth(1))
}

pub fn run(out: Option<String>) -> nse::Result<()> {
    let out = out.map(std::path::PathBuf::from);
    let exp = Experiment {
        family: WindowFamily::new(CutoffFunction::new(2.0, 5)?, WindowMode::Tight, 0, 8)?,
        model: SpectrumModel::power_law(3.0, 2.0)?,
        scenario: Scenario::uniform(
            MaskSpec::PolarCap { theta_cut: 0.8 },
            NoiseSpec::ColatitudeLinear { north: 0.01, south: 0.05 },
        ),
        scales: vec![3, 4],
        replicates: 2,
        seed: 42,
        estimator: EstimatorConfig::new(3.0),
    };

    let field = exp.replicate_field(0)?;
    let seeds = SeededRng::new(exp.seed);
    for &j in &exp.scales {
        let run = ScaleRun::new(&exp, j)?;
        let obs = run.observe(&field, &mut seeds.stream(0, StreamRole::Noise, j as u32))?;
        let masked = obs.masked_field.iter().filter(|v| **v == 0.0).count();
        let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
        println!(
            "j = {j}: {} points, {masked} masked, rms WX {:.4}, rms WZ {:.4}, rms Y {:.4}",
            obs.y.len(),
            rms(&obs.masked_field),
            rms(&obs.masked_noise),
            rms(&obs.y)
        );
        if let Some(dir) = &out {
            write_map(&dir.join(format!("y_j{j}.map")), run.scale.pixelization(), &obs.y)?;
        }
    }
    if let Some(dir) = out {
        println!("maps written to {}", dir.display());
    }
    Ok(())
}
