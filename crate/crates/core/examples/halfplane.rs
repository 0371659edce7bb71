//! Upper half-plane one- and two-point functions and cluster decomposition
//! as the points move apart.

use std::f64::consts::PI;

use bls::charfn::MarkDistribution;
use bls::correlators::{one_point_halfplane, two_point_halfplane, ChargedPoint, CorrelatorConfig};

fn main() -> bls::Result<()> {
    let dist = MarkDistribution::Bernoulli;
    let one = |x: f64, y: f64| -> bls::Result<f64> {
        let cfg = CorrelatorConfig::half_plane(1.0, dist.clone(), vec![ChargedPoint::new(x, y, PI)])?;
        Ok(one_point_halfplane(&cfg)?.value)
    };
    println!("<O(i)>_H = {:.15}", one(0.0, 1.0)?);
    println!("{:>10} {:>20} {:>20}", "distance", "<O O>_H", "<O><O>");
    for d in [1.0, 10.0, 100.0, 1000.0] {
        let cfg = CorrelatorConfig::half_plane(
            1.0,
            dist.clone(),
            vec![ChargedPoint::new(0.0, 1.0, PI), ChargedPoint::new(d, 1.0, PI)],
        )?;
        let two = two_point_halfplane(&cfg)?;
        println!("{d:>10} {:>20.15} {:>20.15}", two.value, one(0.0, 1.0)? * one(d, 1.0)?);
    }
    Ok(())
}
