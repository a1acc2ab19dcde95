//! Gauss-Legendre product grids integrate band-limited functions exactly.
//!
//! ```text
//! cargo run --example cubature
//! ```

use std::f64::consts::PI;

use nse::harmonics::gram_max_error;
use nse::Pixelization;

pub fn main() -> nse::Result<()> {
    for order in [0, 4, 8, 16, 32] {
        let pix = Pixelization::new(order);
        let total: f64 = pix.weights().iter().sum();
        println!(
            "L = {order:>2}: {:>2} rings x {:>2} longitudes = {:>4} points, sum of weights - 4 pi = {:+.1e}, Gram error {:.1e}",
            pix.n_rings(),
            pix.n_phi(),
            pix.len(),
            total - 4.0 * PI,
            gram_max_error(&pix, order)
        );
    }

    // z^4 has degree 4 and integrates to 4 pi / 5.
    let pix = Pixelization::new(4);
    let values: Vec<f64> = pix.points().iter().map(|p| p.z.powi(4)).collect();
    println!("\nintegral of z^4: {:.15} (exact {:.15})", pix.integrate(&values)?, 4.0 * PI / 5.0);

    // Beyond the order the rule is no longer exact.
    let values: Vec<f64> = pix.points().iter().map(|p| p.z.powi(8)).collect();
    println!("integral of z^8 on the L = 4 grid: {:.6} (exact {:.6})", pix.integrate(&values)?, 4.0 * PI / 9.0);
    Ok(())
}
