use std::f64::consts::PI;

use bls::charfn::MarkDistribution;
use bls::correlators::*;
use bls::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

fn random_dist(rng: &mut ChaCha8Rng) -> MarkDistribution {
    match rng.random_range(0..3) {
        0 => MarkDistribution::Bernoulli,
        1 => MarkDistribution::gaussian(rng.random_range(0.3..2.0)).unwrap(),
        _ => MarkDistribution::unit_vector(rng.random_range(1..5)).unwrap(),
    }
}

/// Random charges summing to zero, or to 2πk for lattice marks.
fn random_charges(rng: &mut ChaCha8Rng, dist: &MarkDistribution, n: usize) -> Vec<f64> {
    let mut b: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mut last = -b.iter().sum::<f64>();
    if let Some(period) = dist.lattice_period() {
        last += period * rng.random_range(-1i64..=1) as f64;
    }
    b.push(last);
    b
}

fn random_config(rng: &mut ChaCha8Rng, n: usize) -> CorrelatorConfig {
    let dist = random_dist(rng);
    let betas = random_charges(rng, &dist, n);
    let points = betas.iter().map(|&beta| ChargedPoint { z: random_point(rng), beta }).collect();
    CorrelatorConfig::plane(rng.random_range(0.2..3.0), dist, points).unwrap()
}

fn random_mobius(rng: &mut ChaCha8Rng) -> Mobius {
    let mut c = || random_point(rng);
    Mobius::normalized(c(), c(), c(), c()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn mobius_covariance_of_plane_correlators() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        for n in 2..=4 {
            let cfg = random_config(&mut rng, n);
            let map = random_mobius(&mut rng);
            let (moved, factor) = match transformed_config(&cfg, &map) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let before = evaluate(&cfg).unwrap().value;
            let after = evaluate(&moved).unwrap().value;
            worst = worst.max(rel(after, factor * before));
        }
    }
    assert!(worst < 1e-8, "worst relative deviation {worst}");
}

#[test]
fn four_point_invariant_under_all_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let perms = permutations4();
    assert_eq!(perms.len(), 24);
    for _ in 0..20 {
        let cfg = random_config(&mut rng, 4);
        let base = four_point_plane(&cfg).unwrap().value;
        for p in &perms {
            let mut permuted = cfg.clone();
            permuted.points = p.iter().map(|&i| cfg.points[i]).collect();
            let v = four_point_plane(&permuted).unwrap().value;
            assert!(rel(v, base) < 1e-10, "perm {p:?}: {v} vs {base}");
        }
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn four_point_reduces_to_three_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let three = random_config(&mut rng, 3);
        let mut four = three.clone();
        four.points.push(ChargedPoint { z: random_point(&mut rng), beta: 0.0 });
        let a = four_point_plane(&four).unwrap().value;
        let b = three_point_plane(&three).unwrap().value;
        assert!(rel(a, b) < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn identity_insertion_two_to_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let two = random_config(&mut rng, 2);
        let mut three = two.clone();
        three.points.push(ChargedPoint { z: random_point(&mut rng), beta: 0.0 });
        let a = evaluate(&three).unwrap().value;
        let b = evaluate(&two).unwrap().value;
        assert!(rel(a, b) < 1e-10);
    }
}

#[test]
fn lambda_power_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for i in 0..100 {
        let cfg = random_config(&mut rng, 2 + i % 3);
        let (a, b) = lambda_power_property(&cfg).unwrap();
        assert!(rel(a, b) < 1e-12, "{a} vs {b}");
    }
    let h = CorrelatorConfig::half_plane(
        0.3,
        MarkDistribution::gaussian(1.0).unwrap(),
        vec![ChargedPoint::new(0.0, 1.0, 0.7), ChargedPoint::new(0.5, 0.3, -1.2)],
    )
    .unwrap();
    let (a, b) = lambda_power_property(&h).unwrap();
    assert!(rel(a, b) < 1e-12);
}

#[test]
fn half_plane_cluster_decomposition() {
    let dist = MarkDistribution::gaussian(1.0).unwrap();
    let one = |z: Complex64, beta: f64| {
        let c = CorrelatorConfig::half_plane(1.0, dist.clone(), vec![ChargedPoint { z, beta }]).unwrap();
        one_point_halfplane(&c).unwrap().value
    };
    let mut last_gap = f64::INFINITY;
    for e in 1..=6 {
        let sep = 10f64.powi(e);
        let (z1, z2) = (Complex64::new(0.0, 1.0), Complex64::new(sep, 2.0));
        let cfg = CorrelatorConfig::half_plane(
            1.0,
            dist.clone(),
            vec![ChargedPoint { z: z1, beta: 0.8 }, ChargedPoint { z: z2, beta: 1.1 }],
        )
        .unwrap();
        let ratio = two_point_halfplane(&cfg).unwrap().value / (one(z1, 0.8) * one(z2, 1.1));
        let gap = (ratio - 1.0).abs();
        assert!(gap <= last_gap, "separation {sep}: gap {gap}");
        last_gap = gap;
    }
    assert!(last_gap < 1e-6);
}

#[test]
fn free_field_limit_approached_at_large_intensity() {
    let dist = MarkDistribution::gaussian(1.0).unwrap();
    let c = [1.0, -0.4, 0.7, -1.3];
    let z = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.2),
        Complex64::new(0.3, 1.1),
        Complex64::new(-0.8, 0.5),
    ];
    let mut last = f64::INFINITY;
    for lambda in [10.0, 100.0, 1000.0] {
        let betas: Vec<f64> = c.iter().map(|ci| ci / f64::sqrt(lambda)).collect();
        let points = z.iter().zip(&betas).map(|(&z, &beta)| ChargedPoint { z, beta }).collect();
        let cfg = CorrelatorConfig::plane(lambda, dist.clone(), points).unwrap();
        let exact = four_point_plane(&cfg).unwrap().value;
        let gammas: Vec<f64> = betas.iter().map(|&b| gamma_of(lambda, &dist, b).unwrap()).collect();
        let free = free_field_limit(&gammas, &z).unwrap();
        let dev = rel(exact, free);
        assert!(dev < last, "λ = {lambda}: {dev}");
        last = dev;
    }
    assert!(last < 0.01, "{last}");
}

#[test]
fn bernoulli_charge_violation_is_flagged() {
    let cfg = CorrelatorConfig::plane(
        1.0,
        MarkDistribution::Bernoulli,
        vec![
            ChargedPoint::new(0.0, 0.0, 1.0),
            ChargedPoint::new(1.0, 0.0, 1.0),
            ChargedPoint::new(0.0, 1.0, 1.0),
        ],
    )
    .unwrap();
    let v = three_point_plane(&cfg).unwrap();
    assert_eq!(v.value, 0.0);
    assert_eq!(v.flags, vec![Flag::VanishesByChargeConservation]);
    let ok = CorrelatorConfig::plane(
        1.0,
        MarkDistribution::Bernoulli,
        vec![
            ChargedPoint::new(0.0, 0.0, PI),
            ChargedPoint::new(1.0, 0.0, 0.5 * PI),
            ChargedPoint::new(0.0, 1.0, 0.5 * PI),
        ],
    )
    .unwrap();
    assert_eq!(three_point_plane(&ok).unwrap().diagnostics.charge_k, Some(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plane_correlators_are_positive(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, n);
        let v = evaluate(&cfg).unwrap().value;
        prop_assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn half_plane_two_point_is_positive(
        x1 in -5.0..5.0f64, y1 in 0.01..5.0f64, x2 in -5.0..5.0f64, y2 in 0.01..5.0f64,
        b1 in -4.0..4.0f64, b2 in -4.0..4.0f64,
    ) {
        prop_assume!((x1 - x2).abs() + (y1 - y2).abs() > 1e-6);
        let cfg = CorrelatorConfig::half_plane(
            1.0,
            MarkDistribution::gaussian(1.0).unwrap(),
            vec![ChargedPoint::new(x1, y1, b1), ChargedPoint::new(x2, y2, b2)],
        ).unwrap();
        let v = two_point_halfplane(&cfg).unwrap().value;
        prop_assert!(v > 0.0 && v.is_finite());
    }
}
