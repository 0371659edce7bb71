//! Self-checks of the analytic correlators: crossing of `A`, Möbius
//! covariance, the λ-power law, the 4→3-point reduction and cluster
//! factorization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charfn::MarkDistribution;
use crate::correlators::{
    evaluate, lambda_power_property, transformed_config, ChargedPoint, CorrelatorConfig, Mobius,
};
use crate::special::{a_direct, MU_REFERENCE};
use crate::{Complex64, Result};

pub const CROSSING_TOL: f64 = 1e-10;
pub const WARD_TOL: f64 = 1e-8;
pub const LAMBDA_POWER_TOL: f64 = 1e-12;
pub const REDUCTION_TOL: f64 = 1e-12;
pub const FACTORIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, max_deviation: f64, tolerance: f64, samples: usize) -> Self {
        Self { name: name.into(), max_deviation, tolerance, samples, passed: max_deviation < tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    pub seed: u64,
    /// Value of `μ` fed to the crossing checks; perturb it to see them fail.
    pub mu: f64,
    pub configs: usize,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self { seed: 0, mu: MU_REFERENCE, configs: 100 }
    }
}

/// 20 × 10 grid in the complex plane, at least 0.15 away from 0 and 1.
pub fn crossing_grid() -> Vec<Complex64> {
    (0..20)
        .flat_map(|i| (0..10).map(move |j| Complex64::new(-1.0 + 0.15 * i as f64, -1.35 + 0.3 * j as f64)))
        .collect()
}

/// Max of `|A(x) − A(1−x)|` and of `|A(x) − A(1/x) + log|x||` over the
/// grid, each `A` evaluated from its defining formula without reduction.
pub fn crossing_checks(mu: f64) -> Result<[IdentityCheck; 2]> {
    let grid = crossing_grid();
    let (mut swap, mut inv) = (0.0f64, 0.0f64);
    for &x in &grid {
        let a = a_direct(x, mu)?.0;
        swap = swap.max((a - a_direct(1.0 - x, mu)?.0).abs());
        inv = inv.max((a - a_direct(1.0 / x, mu)?.0 + x.norm().ln()).abs());
    }
    Ok([
        IdentityCheck::new("crossing A(x) = A(1-x)", swap, CROSSING_TOL, grid.len()),
        IdentityCheck::new("crossing A(1/x) = A(x) + log|x|", inv, CROSSING_TOL, grid.len()),
    ])
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

/// A random plane configuration of `n` charges with total charge 0 and
/// Bernoulli, Gaussian or unit-vector marks.
pub fn random_plane_config(rng: &mut ChaCha8Rng, n: usize) -> Result<CorrelatorConfig> {
    let dist = match rng.random_range(0..3) {
        0 => MarkDistribution::Bernoulli,
        1 => MarkDistribution::gaussian(rng.random_range(0.3..2.0))?,
        _ => MarkDistribution::unit_vector(rng.random_range(1..5))?,
    };
    let mut betas: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
    betas.push(-betas.iter().sum::<f64>());
    let points = betas.into_iter().map(|beta| ChargedPoint { z: random_point(rng), beta }).collect();
    CorrelatorConfig::plane(rng.random_range(0.2..3.0), dist, points)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn ward_check(rng: &mut ChaCha8Rng, configs: usize) -> Result<IdentityCheck> {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for _ in 0..configs {
        for n in 2..=4 {
            let cfg = random_plane_config(rng, n)?;
            let mut c = || random_point(rng);
            let Ok(map) = Mobius::normalized(c(), c(), c(), c()) else {
                continue;
            };
            // maps sending a point to ∞ are skipped
            let Ok((moved, factor)) = transformed_config(&cfg, &map) else {
                continue;
            };
            worst = worst.max(rel(evaluate(&moved)?.value, factor * evaluate(&cfg)?.value));
            samples += 1;
        }
    }
    Ok(IdentityCheck::new("Mobius covariance (2/3/4-point)", worst, WARD_TOL, samples))
}

pub fn lambda_power_check(rng: &mut ChaCha8Rng, configs: usize) -> Result<IdentityCheck> {
    let mut worst: f64 = 0.0;
    for i in 0..configs {
        let cfg = random_plane_config(rng, 2 + i % 3)?;
        let (direct, powered) = lambda_power_property(&cfg)?;
        worst = worst.max(rel(direct, powered));
    }
    Ok(IdentityCheck::new("lambda power <..>_l = <..>_1/2^(2l)", worst, LAMBDA_POWER_TOL, configs))
}

/// A vanishing fourth charge reduces the 4-point function to the 3-point one.
pub fn reduction_check(rng: &mut ChaCha8Rng, configs: usize) -> Result<IdentityCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let three = random_plane_config(rng, 3)?;
        let mut points = three.points.clone();
        points.push(ChargedPoint { z: random_point(rng), beta: 0.0 });
        let four = CorrelatorConfig::plane(three.lambda, three.dist.clone(), points)?;
        worst = worst.max(rel(evaluate(&four)?.value, evaluate(&three)?.value));
    }
    Ok(IdentityCheck::new("4-point -> 3-point at beta4 = 0", worst, REDUCTION_TOL, configs))
}

/// Two neutral pairs a distance `L` apart: relative distance between the
/// 4-point function and the product of 2-point functions. It decays like
/// `L^{−4/3}`; the check uses `L = 10⁶` and requires monotone decay.
pub fn factorization_check(rng: &mut ChaCha8Rng, configs: usize) -> Result<IdentityCheck> {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for _ in 0..configs {
        let base = random_plane_config(rng, 2)?;
        let (b, c) = (base.points[0].beta, rng.random_range(-3.0..3.0));
        let pair = |offset: f64, beta: f64| {
            vec![ChargedPoint::new(offset, 0.0, beta), ChargedPoint::new(offset + 1.0, 0.5, -beta)]
        };
        let mut last = f64::INFINITY;
        for l in [1e2, 1e4, 1e6] {
            let with = |points| CorrelatorConfig::plane(base.lambda, base.dist.clone(), points);
            let four = with([pair(0.0, b), pair(l, c)].concat())?;
            let product = evaluate(&with(pair(0.0, b))?)?.value * evaluate(&with(pair(l, c))?)?.value;
            let d = rel(evaluate(&four)?.value, product);
            monotone &= d <= last;
            last = d;
        }
        worst = worst.max(last);
    }
    let mut check = IdentityCheck::new("cluster factorization (L = 1e6)", worst, FACTORIZATION_TOL, configs);
    check.passed &= monotone;
    Ok(check)
}

/// Every check, in a fixed order.
pub fn run_identities(opts: &IdentityOptions) -> Result<Vec<IdentityCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out: Vec<IdentityCheck> = crossing_checks(opts.mu)?.into();
    out.push(ward_check(&mut rng, opts.configs)?);
    out.push(lambda_power_check(&mut rng, opts.configs)?);
    out.push(reduction_check(&mut rng, opts.configs.min(20))?);
    out.push(factorization_check(&mut rng, opts.configs.min(20))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let checks = run_identities(&IdentityOptions { configs: 10, ..Default::default() }).unwrap();
        for c in &checks {
            assert!(c.passed, "{} failed with {:e}", c.name, c.max_deviation);
        }
    }

    #[test]
    fn perturbed_mu_breaks_crossing() {
        let [swap, inv] = crossing_checks(MU_REFERENCE + 1e-3).unwrap();
        assert!(!swap.passed || !inv.passed);
    }
}
