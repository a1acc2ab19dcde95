//! Single-scale spectral estimate under a mask, comparing kept-set rules and
//! weights.
//!
//! ```text
//! cargo run --example estimate_scale
//! ```

use nse::estimator::{two_pass_estimate, EstimatorConfig, PreparedScale, ThresholdRule, WeightMode};
use nse::mc::{Experiment, ScaleRun};
use nse::model::{MaskSpec, NoiseSpec, Scenario, SeededRng, SpectrumModel, StreamRole};
use nse::{CutoffFunction, WindowFamily, WindowMode};

pub fn main() -> nse::Result<()> {
    let exp = Experiment {
        family: WindowFamily::new(CutoffFunction::new(2.0, 5)?, WindowMode::Tight, 0, 8)?,
        model: SpectrumModel::power_law(3.0, 2.0)?,
        scenario: Scenario::uniform(
            MaskSpec::PolarCap { theta_cut: 1.0 },
            NoiseSpec::HemisphereStep { north: 0.02, south: 0.08 },
        ),
        scales: vec![4],
        replicates: 2,
        seed: 7,
        estimator: EstimatorConfig::new(3.0),
    };
    let run = ScaleRun::new(&exp, 4)?;
    let field = exp.replicate_field(0)?;
    let obs = run.observe(&field, &mut SeededRng::new(exp.seed).stream(0, StreamRole::Noise, 4))?;
    println!("target C^(4) = {:.6e}", run.target);

    let rules = [
        ThresholdRule::default(),
        ThresholdRule::Absolute(0.05),
        ThresholdRule::Quantile(0.5),
    ];
    for rule in rules {
        for weights in [WeightMode::Uniform, WeightMode::Mle] {
            let cfg = EstimatorConfig::new(3.0).with_threshold(rule).with_weights(weights);
            let prepared = PreparedScale::new(&run.scale, &run.mask, &run.sigma, &cfg)?;
            match two_pass_estimate(&obs.y, &run.scale, &prepared, &cfg, run.target) {
                Ok(e) => println!(
                    "{:<18} {weights:<8} kept {:>5}  c_hat {:.6e}  ratio {:.3}",
                    rule.to_string(),
                    e.kept_count,
                    e.c_hat,
                    e.c_hat / run.target
                ),
                Err(err) => println!("{:<18} {weights:<8} {err}", rule.to_string()),
            }
        }
    }
    Ok(())
}
