//! A small Monte Carlo experiment with per-scale diagnostics.
//!
//! ```text
//! cargo run --release --example monte_carlo [REPLICATES]
//! ```

use nse::estimator::{EstimatorConfig, ThresholdRule};
use nse::io::summary_csv;
use nse::mc::{run_experiment, Experiment};
use nse::model::{MaskSpec, NoiseSpec, ObservationSetup, Scenario, SpectrumModel};
use nse::{CutoffFunction, WindowFamily, WindowMode};

fn main() -> nse::Result<()> {
    run(std::env::args().nth(1))
}

pub fn run(replicates: Option<String>) -> nse::Result<()> {
    let replicates = replicates.and_then(|s| s.parse().ok()).unwrap_or(40);
    let scenario = Scenario::abc(
        2..=2,
        3..=3,
        4..=4,
        [
            ObservationSetup::new("A", MaskSpec::FullSky, NoiseSpec::Constant { sigma: 0.05 }),
            ObservationSetup::new("B", MaskSpec::PolarCap { theta_cut: 1.16 }, NoiseSpec::Constant { sigma: 0.1 }),
            ObservationSetup::new(
                "C",
                MaskSpec::ObservedDisc {
                    center: nse::Direction::SOUTH,
                    radius: 2.0,
                },
                NoiseSpec::Constant { sigma: 0.02 },
            ),
        ],
    );
    let exp = Experiment {
        family: WindowFamily::new(CutoffFunction::new(2.0, 5)?, WindowMode::Tight, 0, 8)?,
        model: SpectrumModel::power_law(3.0, 2.0)?,
        scenario,
        scales: vec![2, 3, 4],
        replicates,
        seed: 2024,
        estimator: EstimatorConfig::new(3.0).with_threshold(ThresholdRule::Quantile(0.5)),
    };
    let out = run_experiment(&exp)?;
    for d in &out.summary {
        println!(
            "j = {} [{}]: mean {:.4e} +- {:.1e}, rel_mse {:.4}, skew {:+.2}",
            d.j,
            exp.scenario.label_for(d.j)?,
            d.mean,
            d.standard_error(),
            d.rel_mse,
            d.skewness
        );
    }
    print!("\n{}", summary_csv(&out.summary));
    Ok(())
}
