//! Needlet coefficients from harmonic coefficients and from samples.
//!
//! ```text
//! cargo run --example needlet_coefficients
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use nse::model::{synthesize_field, SpectrumModel};
use nse::{CutoffFunction, NeedletScale, WindowFamily, WindowMode};

pub fn main() -> nse::Result<()> {
    let family = WindowFamily::new(CutoffFunction::new(2.0, 5)?, WindowMode::Tight, 0, 8)?;
    let scale = NeedletScale::new(&family, 3)?;
    println!("scale j = 3: band limit {}, {} needlets", scale.band_limit(), scale.len());

    let spectrum = SpectrumModel::power_law(3.0, 2.0)?.values(3, scale.band_limit());
    let alm = synthesize_field(&spectrum, scale.band_limit(), &mut ChaCha20Rng::seed_from_u64(3))?;

    let beta = scale.needlet_transform(&alm)?;
    let samples = scale.plan().inverse(&alm)?;
    let gamma = scale.coeffs_of_sequence(&samples)?;
    let gap = beta.values.iter().zip(&gamma.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |beta_k - gamma_k| for a band-limited field: {gap:.2e}");

    let xi = scale.pixelization().point(0);
    println!("psi_0 at its centre: {:.6}", scale.eval_needlet(0, &xi)?);

    let (lhs, rhs) = scale.norm_identity_check(100)?;
    println!("norm identity at k = 100: {lhs:.12} vs {rhs:.12}");

    let var = scale.signal_covariance(&spectrum, 100, 100)?;
    let near = scale.signal_covariance(&spectrum, 100, 101)?;
    println!("signal variance {var:.4e}, covariance with a neighbour {near:.4e}");
    Ok(())
}
