//! Plane correlators of vertex operators, their Möbius covariance and the
//! charge-conservation rule.

use bls::charfn::MarkDistribution;
use bls::correlators::{evaluate, transformed_config, ChargedPoint, CorrelatorConfig, Mobius};
use bls::Complex64;

fn main() -> bls::Result<()> {
    let gauss = MarkDistribution::gaussian(1.0)?;
    let pts = [
        ChargedPoint::new(0.0, 0.0, 1.0),
        ChargedPoint::new(1.0, 0.2, -0.4),
        ChargedPoint::new(0.3, 1.1, 0.7),
        ChargedPoint::new(-0.8, 0.5, -1.3),
    ];
    for n in 2..=4 {
        let mut points: Vec<ChargedPoint> = pts[..n].to_vec();
        // close the configuration so the total charge vanishes
        let total: f64 = points[..n - 1].iter().map(|p| p.beta).sum();
        points[n - 1].beta = -total;
        let cfg = CorrelatorConfig::plane(1.0, gauss.clone(), points)?;
        let v = evaluate(&cfg)?;
        println!("{n}-point: {:.15}", v.value);

        let map = Mobius::normalized(
            Complex64::new(1.0, 0.5),
            Complex64::new(0.2, 0.0),
            Complex64::new(0.1, -0.3),
            Complex64::new(2.0, 0.0),
        )?;
        let (moved, factor) = transformed_config(&cfg, &map)?;
        println!("  after a Möbius map: {:.15} = {:.15} × Π|f'|^(-2Δ)", evaluate(&moved)?.value, v.value);
        println!("  ratio {:.15}", evaluate(&moved)?.value / (factor * v.value));
    }

    let unbalanced = CorrelatorConfig::plane(
        1.0,
        gauss,
        vec![ChargedPoint::new(0.0, 0.0, 1.0), ChargedPoint::new(1.0, 0.0, 0.5)],
    )?;
    let v = evaluate(&unbalanced)?;
    println!("charges 1 and 0.5 with Gaussian marks: {} (vanishes: {})", v.value, v.vanishes());

    // Bernoulli marks only see β mod 2π
    let bern = CorrelatorConfig::plane(
        1.0,
        MarkDistribution::Bernoulli,
        vec![ChargedPoint::new(0.0, 0.0, 1.0), ChargedPoint::new(1.0, 0.0, 2.0 * std::f64::consts::PI - 1.0)],
    )?;
    println!("Bernoulli 2-point with β₂ = 2π − β₁: {:.15}", evaluate(&bern)?.value);
    Ok(())
}
