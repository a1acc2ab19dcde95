//! Synthesis and analysis of band-limited fields.
//!
//! ```text
//! cargo run --example sht_roundtrip
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use nse::model::synthesize_field;
use nse::{Pixelization, ShtPlan};

pub fn main() -> nse::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for lmax in [8, 16, 32, 64] {
        let alm = synthesize_field(&vec![1.0; lmax + 1], lmax, &mut rng)?;
        let pix = Pixelization::new(2 * lmax);
        let plan = ShtPlan::new(&pix, lmax)?;
        let map = plan.inverse(&alm)?;
        let back = plan.forward(&map)?;
        let err: f64 = alm.as_slice().iter().zip(back.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
        println!(
            "lmax = {lmax:>2}, {:>5} points: relative error {:.2e}",
            pix.len(),
            (err / alm.squared_norm()).sqrt()
        );
    }

    let alm = synthesize_field(&[0.0, 1.0, 0.5, 0.25], 3, &mut rng)?;
    let spectrum = alm.empirical_spectrum();
    println!("\nempirical spectrum of one draw from C = (0, 1, 0.5, 0.25): {spectrum:.3?}");
    Ok(())
}
