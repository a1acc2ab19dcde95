//! Needlet windows: the cutoff, per-scale tables and the partition of unity.
//!
//! ```text
//! cargo run --example windows
//! ```

use nse::{CutoffFunction, WindowFamily, WindowMode};

pub fn main() -> nse::Result<()> {
    let cutoff = CutoffFunction::new(2.0, 5)?;
    println!("cutoff degree {}, a(0.5) = {}, a(0.75) = {:.6}, a(1) = {}", cutoff.degree(), cutoff.eval(0.5), cutoff.eval(0.75), cutoff.eval(1.0));

    let tight = WindowFamily::new(cutoff.clone(), WindowMode::Tight, 0, 8)?;
    let literal = WindowFamily::new(cutoff, WindowMode::Literal, 0, 8)?;

    for j in 2..=4 {
        let (lo, hi) = tight.scale_band(j).expect("non-empty band");
        println!("j = {j}: support l in {lo}..={hi}, band limit {}", tight.band_limit(j));
    }

    println!("\n  l   b_3 tight   b_3 literal");
    for l in (4..=16).step_by(2) {
        println!("{l:>3}   {:.6}    {:.6}", tight.eval(3, l), literal.eval(3, l));
    }

    let worst = (1..=128).map(|l| (tight.partition_sum(l) - 1.0).abs()).fold(0.0, f64::max);
    println!("\nmax |sum_j b_jl^2 - 1| over l in 1..=128: {worst:.1e}");
    Ok(())
}
