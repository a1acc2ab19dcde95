//! Spatial decay of needlets and of their correlations.
//!
//! ```text
//! cargo run --example localization
//! ```

use nse::model::SpectrumModel;
use nse::{CutoffFunction, Direction, NeedletScale, WindowFamily, WindowMode};

pub fn main() -> nse::Result<()> {
    for m in [3, 5, 9] {
        let family = WindowFamily::new(CutoffFunction::new(2.0, m)?, WindowMode::Tight, 0, 8)?;
        let scale = NeedletScale::new(&family, 4)?;
        let loc = scale.localization_report(2000, (4.0, 20.0))?;
        let spectrum = SpectrumModel::power_law(3.0, 2.0)?.values(4, scale.band_limit());
        let corr = scale.correlation_decay_report(&spectrum, &Direction::from_angles(1.0, 0.3), (4.0, 20.0))?;
        println!("M = {m}: needlet slope {:.2}, correlation slope {:.2}", loc.slope, corr.slope);
    }

    let family = WindowFamily::new(CutoffFunction::new(2.0, 5)?, WindowMode::Tight, 0, 8)?;
    let scale = NeedletScale::new(&family, 4)?;
    println!("\nB^j d   |Psi|");
    for x in [0.0f64, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        let d = x / 16.0;
        println!("{x:>5.1}   {:.4e}", scale.kernel(d.cos()).abs());
    }
    Ok(())
}
