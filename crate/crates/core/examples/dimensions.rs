//! Layering and winding dimensions for a few mark distributions.
//!
//! ```text
//! cargo run --example dimensions
//! ```

use std::f64::consts::PI;

use bls::charfn::{Dimensions, MarkDistribution};

fn main() -> bls::Result<()> {
    let dists =
        [MarkDistribution::Bernoulli, MarkDistribution::gaussian(1.0)?, MarkDistribution::unit_vector(3)?];
    let lambda = 1.0;
    println!("{:>8} {:>12} {:>12} {:>12}", "beta", "dist", "delta", "delta_w");
    for dist in &dists {
        for i in 0..=8 {
            let beta = PI * i as f64 / 4.0;
            let d = Dimensions::compute(lambda, dist, beta)?;
            println!("{beta:>8.4} {:>12} {:>12.8} {:>12.8}", dist.kind(), d.delta, d.delta_w);
        }
    }
    let d = Dimensions::compute(lambda, &MarkDistribution::Bernoulli, PI)?;
    println!("central charge c = 2λ = {}", d.central_charge());
    Ok(())
}
