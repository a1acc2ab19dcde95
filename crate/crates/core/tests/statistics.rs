use nse::estimator::{EstimatorConfig, ThresholdRule, WeightMode};
use nse::harmonics::Alm;
use nse::mc::{run_experiment, Experiment, ScaleRun};
use nse::model::{MaskSpec, NoiseSpec, Scenario, SeededRng, SpectrumModel, StreamRole};
use nse::stats::{mean, variance};
use nse::{CutoffFunction, WindowFamily, WindowMode};

fn experiment(scenario: Scenario, scales: Vec<i32>, replicates: usize, seed: u64) -> Experiment {
    Experiment {
        family: WindowFamily::new(CutoffFunction::new(2.0, 5).unwrap(), WindowMode::Tight, 0, 8).unwrap(),
        model: SpectrumModel::power_law(3.0, 2.0).unwrap(),
        scenario,
        scales,
        replicates,
        seed,
        estimator: EstimatorConfig::new(3.0),
    }
}

#[test]
fn noise_debias_is_exact_without_signal() {
    let scenario = Scenario::uniform(
        MaskSpec::PolarCap { theta_cut: 0.8 },
        NoiseSpec::HemisphereStep { north: 0.05, south: 0.2 },
    );
    let mut exp = experiment(scenario, vec![3], 500, 21);
    exp.estimator = exp.estimator.with_threshold(ThresholdRule::Quantile(0.5));
    let run = ScaleRun::new(&exp, 3).unwrap();
    let zero = Alm::zeros(run.scale.band_limit());
    let seeds = SeededRng::new(exp.seed);
    for weights in [WeightMode::Uniform, WeightMode::Mle] {
        let cfg = exp.estimator.with_weights(weights);
        let est: Vec<f64> = (0..exp.replicates)
            .map(|r| {
                let obs = run.observe(&zero, &mut seeds.stream(r as u32, StreamRole::Noise, 3)).unwrap();
                run.estimate(&obs.y, &cfg).unwrap().c_hat
            })
            .collect();
        let se = (variance(&est) / est.len() as f64).sqrt();
        assert!(mean(&est).abs() < 3.0 * se, "{weights}: mean {} se {se}", mean(&est));
        assert!(est.iter().any(|c| *c < 0.0), "negative estimates must be kept");
    }
}

#[test]
fn full_sky_without_noise_is_unbiased_at_j4() {
    let exp = experiment(Scenario::full_sky(NoiseSpec::Constant { sigma: 0.0 }), vec![4], 500, 22);
    let out = run_experiment(&exp).unwrap();
    let d = out.summary_for(4).unwrap();
    assert_eq!(out.failures().count(), 0);
    assert!(d.bias.abs() < 3.0 * d.standard_error(), "bias {} se {}", d.bias, d.standard_error());
}

#[test]
fn mle_weights_beat_uniform_under_heteroscedastic_noise() {
    let scenario = Scenario::full_sky(NoiseSpec::HemisphereStep { north: 0.02, south: 1.0 });
    let exp = experiment(scenario, vec![3], 500, 23);
    let run = ScaleRun::new(&exp, 3).unwrap();
    let seeds = SeededRng::new(exp.seed);
    let mut errors = [Vec::new(), Vec::new()];
    for r in 0..exp.replicates {
        let field = exp.replicate_field(r).unwrap();
        let obs = run.observe(&field, &mut seeds.stream(r as u32, StreamRole::Noise, 3)).unwrap();
        for (i, weights) in [WeightMode::Uniform, WeightMode::Mle].into_iter().enumerate() {
            let c = run.estimate(&obs.y, &exp.estimator.with_weights(weights)).unwrap().c_hat;
            errors[i].push((c - run.target).powi(2));
        }
    }
    let (uniform, mle) = (mean(&errors[0]), mean(&errors[1]));
    assert!(mle <= uniform, "mle {mle} uniform {uniform}");
}
