//! Monte Carlo estimates of the loop weights around a point: the layering
//! weight α, the winding weights and a vertex one-point function.
//!
//! ```text
//! cargo run --release --example loop_weights -- 4000
//! ```

use std::f64::consts::{E, PI};

use bls::charfn::{delta_layering, MarkDistribution};
use bls::mc::{survey, SurveyConfig, VertexKind};

fn main() -> bls::Result<()> {
    let n_soups = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let mut cfg = SurveyConfig::new(1.0, 1.0, E);
    cfg.n_soups = n_soups;
    cfg.seed = 7;
    println!("{} loops expected per soup", cfg.expected_loops()?.round());

    let s = survey(&cfg)?;
    let log_ratio = (cfg.r / cfg.delta).ln();
    let a = s.alpha()?;
    println!("alpha = {:.4} ± {:.4} (target {:.4})", a.mean, a.stderr, 0.2 * log_ratio);
    for k in 1..=3 {
        let w = s.winding_weight(k)?;
        let target = log_ratio / (2.0 * PI * PI * (k * k) as f64);
        println!("w({k}) = {:.5} ± {:.5} (target {target:.5})", w.mean, w.stderr);
    }
    let v = s.vertex(VertexKind::Layering, PI)?;
    let target = (-2.0 * delta_layering(1.0, &MarkDistribution::Bernoulli, PI)? * log_ratio).exp();
    println!("<exp(iπN)> = {:.4} ± {:.4} (target {target:.4})", v.mean, v.stderr);
    println!(
        "{} loops, {} flood fills, indeterminate rate {:.1e}, {} unresolved windings",
        s.stats.loops,
        s.stats.flood_fills,
        s.stats.indeterminate_rate(),
        s.stats.unresolved_windings
    );
    Ok(())
}
