//! Large-intensity limit: with `λβ²` fixed the four-point function tends to
//! a free-boson product.

use bls::charfn::MarkDistribution;
use bls::correlators::{four_point_plane, free_field_limit, gamma_of, ChargedPoint, CorrelatorConfig};
use bls::Complex64;

fn main() -> bls::Result<()> {
    let dist = MarkDistribution::gaussian(1.0)?;
    let c = [1.0, -0.4, 0.7, -1.3];
    let z = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.2),
        Complex64::new(0.3, 1.1),
        Complex64::new(-0.8, 0.5),
    ];
    for lambda in [10.0, 100.0, 1000.0, 10000.0] {
        let betas: Vec<f64> = c.iter().map(|ci| ci / f64::sqrt(lambda)).collect();
        let points = z.iter().zip(&betas).map(|(&z, &beta)| ChargedPoint { z, beta }).collect();
        let exact = four_point_plane(&CorrelatorConfig::plane(lambda, dist.clone(), points)?)?.value;
        let gammas = betas.iter().map(|&b| gamma_of(lambda, &dist, b)).collect::<bls::Result<Vec<_>>>()?;
        let free = free_field_limit(&gammas, &z)?;
        println!(
            "λ = {lambda:>7}: {exact:.12} vs {free:.12}, relative gap {:.2e}",
            (exact / free - 1.0).abs()
        );
    }
    Ok(())
}
