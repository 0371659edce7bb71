//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Expensive; the Monte Carlo part dominates.

use std::f64::consts::{E, PI};
use std::time::Instant;

use bls::blocks::{closed_form_c, extract_coefficients, virasoro_block_series, BlockLabel};
use bls::charfn::{delta_layering, delta_winding, MarkDistribution};
use bls::correlators::{
    evaluate, four_point_plane, free_field_limit, gamma_of, lambda_power_property, ChargedPoint,
    CorrelatorConfig, Mobius,
};
use bls::identities::random_plane_config;
use bls::mc::{survey, SurveyConfig, VertexKind};
use bls::special::{a_direct, mu_constant};
use bls::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 2^{1/3}π²/(3√3 Γ(1/6)² Γ(4/3)²) at 50 digits, from `oracles/reference_values.py`.
const MU_MPMATH: f64 = 0.096_859_559_696_221_355_142_391_221_188_504_737;

type Check = fn() -> Result<Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn dimensions() -> Result<Outcome> {
    let b = MarkDistribution::Bernoulli;
    let d = delta_layering(1.0, &b, PI)?;
    // Σ (1 − cos mβ)/m² = β(2π − β)/4 on [0, 2π]
    let closed = |beta: f64| beta * (2.0 * PI - beta) / (8.0 * PI * PI);
    let mut worst_w: f64 = 0.0;
    for beta in [PI, 0.3, 1.0, 2.5, 4.0, 6.0] {
        worst_w = worst_w.max((delta_winding(1.0, &b, beta, 1e-12)? - closed(beta)).abs());
    }
    let dw = delta_winding(1.0, &b, PI, 1e-12)?;
    outcome(
        (d - 0.2).abs() < 1e-12 && worst_w < 1e-10,
        format!("Δ(π) = {d:.15}, Δ_w(π) = {dw:.15}, max |Δ_w − closed form| = {worst_w:.1e}"),
    )
}

fn crossing() -> Result<Outcome> {
    let mu = mu_constant();
    let (mut swap, mut inv) = (0.0f64, 0.0f64);
    let mut n = 0;
    for i in 0..20 {
        for j in 0..10 {
            let x = Complex64::new(-1.0 + 0.15 * i as f64, -1.35 + 0.3 * j as f64);
            let a = a_direct(x, mu)?.0;
            swap = swap.max((a - a_direct(1.0 - x, mu)?.0).abs());
            inv = inv.max((a - a_direct(1.0 / x, mu)?.0 + x.norm().ln()).abs());
            n += 1;
        }
    }
    outcome(
        swap < 1e-10 && inv < 1e-10,
        format!(
            "{n} grid points: max |A(x) − A(1−x)| = {swap:.1e}, max |A(x) − A(1/x) + log|x|| = {inv:.1e}"
        ),
    )
}

fn mu() -> Result<Outcome> {
    let r = rel(mu_constant(), MU_MPMATH);
    outcome(r < 1e-12, format!("μ = {:.17}, relative error {r:.1e}", mu_constant()))
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

fn ward() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut maps) = (0.0f64, 0);
    while maps < 100 {
        let mut c = || random_point(&mut rng);
        let map = Mobius::normalized(c(), c(), c(), c())?;
        let mut ok = true;
        let mut devs = Vec::new();
        for n in 2..=4 {
            let cfg = random_plane_config(&mut rng, n)?;
            let mut moved = cfg.clone();
            let mut factor = 1.0;
            for p in moved.points.iter_mut() {
                let (Ok(w), Ok(d)) = (map.apply(p.z), map.derivative(p.z)) else {
                    ok = false;
                    break;
                };
                if !w.is_finite() || w.norm() > 1e6 {
                    ok = false;
                    break;
                }
                factor *= d.norm().powf(-2.0 * cfg.delta(p.beta)?);
                p.z = w;
            }
            if !ok {
                break;
            }
            devs.push(rel(evaluate(&moved)?.value, factor * evaluate(&cfg)?.value));
        }
        if ok {
            worst = devs.into_iter().fold(worst, f64::max);
            maps += 1;
        }
    }
    outcome(worst < 1e-8, format!("{maps} maps × 2/3/4 points: max relative deviation {worst:.1e}"))
}

fn reduction() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let three = random_plane_config(&mut rng, 3)?;
        let mut points = three.points.clone();
        points.push(ChargedPoint { z: random_point(&mut rng), beta: 0.0 });
        let four = CorrelatorConfig::plane(three.lambda, three.dist.clone(), points)?;
        worst = worst.max(rel(four_point_plane(&four)?.value, evaluate(&three)?.value));
    }
    outcome(worst < 1e-10, format!("20 geometries: max relative deviation {worst:.1e}"))
}

fn lambda_power() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let cfg = random_plane_config(&mut rng, 2 + i % 3)?;
        let (direct, powered) = lambda_power_property(&cfg)?;
        worst = worst.max(rel(direct, powered));
    }
    outcome(worst < 1e-12, format!("100 configs: max relative deviation {worst:.1e}"))
}

fn four_points(lambda: f64, dist: MarkDistribution, betas: [f64; 4]) -> Result<CorrelatorConfig> {
    let z = [(0.0, 0.0), (1.0, 0.3), (-0.6, 1.2), (2.1, -0.7)];
    let points = z.iter().zip(betas).map(|(&(x, y), b)| ChargedPoint::new(x, y, b)).collect();
    CorrelatorConfig::plane(lambda, dist, points)
}

fn blocks() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut c00, mut c11, mut c03, mut c22) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut c00_ok = true;
    for _ in 0..3 {
        let sigma = rng.random_range(0.5..1.5);
        let b1 = rng.random_range(0.3..1.5);
        let b2 = rng.random_range(-1.5..-0.2);
        let b3 = rng.random_range(-1.0..1.0);
        let lambda = rng.random_range(0.5..2.0);
        let cfg = four_points(lambda, MarkDistribution::gaussian(sigma)?, [b1, b2, b3, -b1 - b2 - b3])?;
        let t = extract_coefficients(&cfg, 6)?;
        let get = |p, q| t.get(p, q).expect("label within pmax");
        let d00 = (get(0, 0) - 1.0).abs();
        c00 = c00.max(d00);
        c00_ok &= d00 <= t.solve_residual.max(1e-14);
        c11 = c11.max(rel(get(1, 1), closed_form_c(BlockLabel::new(1, 1), &cfg)?));
        c03 = c03.max(rel(get(0, 3), closed_form_c(BlockLabel::new(0, 3), &cfg)?));
        c22 = c22.max(rel(get(2, 2), get(1, 1).powi(2) / 2.0));
    }
    let bern = four_points(1.0, MarkDistribution::Bernoulli, [0.9, -0.4, 0.7, -1.2])?;
    let c03_bern = extract_coefficients(&bern, 6)?.get(0, 3).expect("label within pmax").abs();
    outcome(
        c00_ok && c11 < 1e-6 && c03 < 1e-6 && c03_bern < 1e-8 && c22 < 1e-5,
        format!(
            "|C00 − 1| ≤ {c00:.1e}; C11 rel {c11:.1e}; Gaussian C03 rel {c03:.1e}; \
             Bernoulli |C03| = {c03_bern:.1e}; C22 vs C11²/2 rel {c22:.1e}"
        ),
    )
}

fn global_block(a: f64, b: f64, c: f64, len: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for n in 0..len - 1 {
        let n = n as f64;
        let last = *out.last().unwrap();
        out.push(last * (a + n) * (b + n) / ((c + n) * (n + 1.0)));
    }
    out
}

fn virasoro() -> Result<Outcome> {
    let cases = [(0.7, [0.1, 0.2, 0.3, 0.15]), (0.35, [0.05, 0.12, 0.2, 0.08]), (1.2, [0.2, 0.05, 0.4, 0.3])];
    let mut worst: f64 = 0.0;
    for (dp, d) in cases {
        let vir = virasoro_block_series(1e6, dp, d, 3)?;
        let glob = global_block(dp + d[1] - d[0], dp + d[2] - d[3], 2.0 * dp, 4);
        for n in 1..=3 {
            worst = worst.max(rel(vir[n], glob[n]));
        }
    }
    outcome(worst < 1e-6, format!("c = 1e6, levels 1..3, 3 cases: max relative deviation {worst:.1e}"))
}

fn mc_config(seed: u64, segments: usize, n_soups: usize) -> SurveyConfig {
    let mut cfg = SurveyConfig::new(1.0, 1.0, E);
    cfg.seed = seed;
    cfg.segments = segments;
    cfg.n_soups = n_soups;
    cfg
}

const MAIN_SOUPS: usize = 40_000;

fn loop_weights(main: &bls::mc::SurveyResult, elapsed: f64) -> Result<Outcome> {
    let alpha = main.alpha()?;
    let w = 1.0 / (2.0 * PI * PI);
    let w1 = main.winding_weight(1)?;
    let w2 = main.winding_weight(2)?;
    let w2_target = w / 4.0;
    // same seed, first 16 batches: must reproduce the main run bit for bit
    let mut again = main.config.clone();
    again.n_soups = 16 * again.batch_size;
    let prefix = survey(&again)?;
    let same = prefix.observations[..] == main.observations[..prefix.observations.len()];
    let passed = (0.18..=0.22).contains(&alpha.mean)
        && (0.9 * w..=1.1 * w).contains(&w1.mean)
        && rel(w2.mean, w2_target) <= 0.15
        && same;
    outcome(
        passed,
        format!(
            "{MAIN_SOUPS} soups, M = 1024: α = {:.4} ± {:.4} (0.2); w(1) = {:.5} ± {:.5} ({w:.5}); \
             w(2) = {:.5} ± {:.5} ({w2_target:.5}); rerun bit-identical: {same}; \
             survey {elapsed:.1} s on {} thread(s); unresolved windings {}, indeterminate rate {:.1e}",
            alpha.mean,
            alpha.stderr,
            w1.mean,
            w1.stderr,
            w2.mean,
            w2.stderr,
            rayon::current_num_threads(),
            main.stats.unresolved_windings,
            main.stats.indeterminate_rate(),
        ),
    )
}

fn one_point(main: &bls::mc::SurveyResult) -> Result<Outcome> {
    let target = (-2.0 * delta_layering(1.0, &MarkDistribution::Bernoulli, PI)?).exp();
    let v = main.vertex(VertexKind::Layering, PI)?;
    let within = rel(v.mean, target) <= 0.1;
    let mut medians = Vec::new();
    for m in [256, 512, 1024] {
        let gaps = (1..=5)
            .map(|seed| {
                let s = survey(&mc_config(100 + seed, m, 20_000))?;
                Ok((s.vertex(VertexKind::Layering, PI)?.mean - target).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        medians.push(median(gaps));
    }
    let shrinking = medians.windows(2).all(|w| w[1] < w[0]);
    outcome(
        within && shrinking,
        format!(
            "<e^(iπN)> = {:.4} ± {:.4} vs {target:.4}; median |gap| over 5 seeds at M = 256/512/1024: \
             {:.4} / {:.4} / {:.4}",
            v.mean, v.stderr, medians[0], medians[1], medians[2]
        ),
    )
}

fn free_field() -> Result<Outcome> {
    let dist = MarkDistribution::gaussian(1.0)?;
    let c = [1.0, -0.4, 0.7, -1.3];
    let z = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.2),
        Complex64::new(0.3, 1.1),
        Complex64::new(-0.8, 0.5),
    ];
    let mut devs = Vec::new();
    for lambda in [10.0, 100.0, 1000.0] {
        let betas: Vec<f64> = c.iter().map(|ci| ci / f64::sqrt(lambda)).collect();
        let points = z.iter().zip(&betas).map(|(&z, &beta)| ChargedPoint { z, beta }).collect();
        let cfg = CorrelatorConfig::plane(lambda, dist.clone(), points)?;
        let gammas = betas.iter().map(|&b| gamma_of(lambda, &dist, b)).collect::<Result<Vec<f64>>>()?;
        devs.push(rel(four_point_plane(&cfg)?.value, free_field_limit(&gammas, &z)?));
    }
    outcome(
        devs.windows(2).all(|w| w[1] < w[0]) && devs[2] < 0.01,
        format!("λ = 10/100/1000: relative deviation {:.2e} / {:.2e} / {:.2e}", devs[0], devs[1], devs[2]),
    )
}

fn report(n: usize, name: &str, start: Instant, result: Result<Outcome>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {n:>2}. {name}: {detail} [{secs:.2} s]");
    passed
}

fn main() {
    let analytic: [(&str, Check); 8] = [
        ("dimension formulas", dimensions),
        ("crossing identities", crossing),
        ("mu constant", mu),
        ("Mobius covariance", ward),
        ("4 -> 3 point reduction", reduction),
        ("lambda-power property", lambda_power),
        ("block extraction", blocks),
        ("Virasoro blocks at large c", virasoro),
    ];
    let mut all = true;
    for (i, (name, check)) in analytic.iter().enumerate() {
        let start = Instant::now();
        all &= report(i + 1, name, start, check());
    }

    let start = Instant::now();
    let main = survey(&mc_config(1, 1024, MAIN_SOUPS));
    let elapsed = start.elapsed().as_secs_f64();
    match &main {
        Ok(s) => {
            all &= report(9, "MC loop weights", start, loop_weights(s, elapsed));
            let start = Instant::now();
            all &= report(10, "MC one-point scaling", start, one_point(s));
        }
        Err(e) => {
            println!("[FAIL]  9. MC loop weights: error: {e}");
            println!("[FAIL] 10. MC one-point scaling: error: {e}");
            all = false;
        }
    }

    let start = Instant::now();
    all &= report(11, "free-field limit", start, free_field());

    if !all {
        std::process::exit(1);
    }
}
