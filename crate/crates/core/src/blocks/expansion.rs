//! Series expansion of the four-point function at `(∞, 1, x, 0)` and the
//! extraction of the products `C₃₄^{(p,p′)} C₁₂^{(p,p′)}`.
//!
//! Sending `z₁ → ∞` in the plane four-point function gives
//!
//! ```text
//! G(x) = exp[−2K A(x)] |x|^{2Δ₁₂−2Δ₃−2Δ₄} |1−x|^{2Δ₁₄−2Δ₂−2Δ₃},
//! K = Σ Δ_i − Δ₁₂ − Δ₁₃ − Δ₁₄.
//! ```
//!
//! Writing `G = |x|^{2Δ₁₂−2Δ₃−2Δ₄} H(u, ū)` with `u = x^{1/3}`, `H` is a double
//! power series, and the block expansion reads
//! `H = Σ C_{qq′} u^q ū^{q′} B_q(x) B_{q′}(x̄)` where `B_q` is the Virasoro
//! block series for the exchanged weight `Δ₁₂ + q/3`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::virasoro::{condition_number, virasoro_block_series, MAX_LEVEL};
use crate::charfn::{charge_conservation, phi};
use crate::correlators::CorrelatorConfig;
use crate::special::series::{binomial_series, DoubleSeries};
use crate::special::{a_function, a_series_coefficients, mu_constant, CrossRatio, MAX_SERIES_ORDER};
use crate::{Complex64, Error, Result};

/// Exchange-degeneracy threshold on `|1 − φ(β₁ + β₂)|`.
pub const DEGENERACY_GAP: f64 = 1e-6;
/// Largest label reachable with blocks through level 3.
pub const MAX_PMAX: usize = 3 * MAX_LEVEL + 2;
/// Labels `p, p′ ≤ RESIDUAL_WINDOW` enter the truncation residual.
pub const RESIDUAL_WINDOW: usize = MAX_PMAX;
/// Per-power weight of the truncation residual.
pub const RESIDUAL_RATIO: f64 = 0.3;

/// A primary with `(Δ, Δ̄) = (Δ₁₂ + p/3, Δ₁₂ + p′/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockLabel {
    pub p: usize,
    pub p_bar: usize,
}

impl BlockLabel {
    pub fn new(p: usize, p_bar: usize) -> Self {
        Self { p, p_bar }
    }
}

/// The four charges and the dimensions built from them.
#[derive(Debug, Clone, Copy)]
struct Charges {
    d: [f64; 4],
    d12: f64,
    d13: f64,
    d14: f64,
}

impl Charges {
    fn new(cfg: &CorrelatorConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.points.len() != 4 {
            return Err(Error::InvalidArgument(format!(
                "block expansion needs 4 points, got {}",
                cfg.points.len()
            )));
        }
        let b: Vec<f64> = cfg.betas();
        if !charge_conservation(&cfg.dist, &b).satisfied {
            return Err(Error::InvalidArgument("block expansion requires charge conservation".into()));
        }
        Ok(Self {
            d: [cfg.delta(b[0])?, cfg.delta(b[1])?, cfg.delta(b[2])?, cfg.delta(b[3])?],
            d12: cfg.delta(b[0] + b[1])?,
            d13: cfg.delta(b[0] + b[2])?,
            d14: cfg.delta(b[0] + b[3])?,
        })
    }

    fn k(&self) -> f64 {
        self.d.iter().sum::<f64>() - self.d12 - self.d13 - self.d14
    }

    /// Exponent of `|1 − x|` in `G`, halved.
    fn e(&self) -> f64 {
        self.d14 - self.d[1] - self.d[2]
    }

    /// Exponent of `|x|` in `G`.
    fn leading(&self) -> f64 {
        2.0 * self.d12 - 2.0 * self.d[2] - 2.0 * self.d[3]
    }
}

/// `G(x)` in closed form.
pub fn g_function(cfg: &CorrelatorConfig, x: Complex64) -> Result<f64> {
    let ch = Charges::new(cfg)?;
    let x = CrossRatio::new(x)?.value();
    let k = ch.k();
    let a = if k != 0.0 { a_function(CrossRatio::new(x)?)? } else { 0.0 };
    let log = -2.0 * k * a + ch.leading() * x.norm().ln() + 2.0 * ch.e() * (1.0 - x).norm().ln();
    Ok(log.exp())
}

/// `H(u, ū)`, exact through `xⁿx̄ᵐ` for `n, m ≤ order` (degree `3(order+1) − 1` in `u`).
pub fn expand_g_series(cfg: &CorrelatorConfig, order: usize) -> Result<DoubleSeries> {
    if order > MAX_SERIES_ORDER {
        return Err(Error::InvalidArgument(format!(
            "expansion order {order} exceeds the cap {MAX_SERIES_ORDER}"
        )));
    }
    let ch = Charges::new(cfg)?;
    expand_h(&ch, order)
}

fn expand_h(ch: &Charges, order: usize) -> Result<DoubleSeries> {
    let degree = 3 * (order + 1) - 1;
    let a = a_series_coefficients(order, 3)?;
    let power = binomial_series(ch.e(), order + 1);
    let one_minus = DoubleSeries::from_holomorphic(&power, 3, degree)
        .mul(&DoubleSeries::from_antiholomorphic(&power, 3, degree));
    Ok(a.scaled(-2.0 * ch.k()).exp().mul(&one_minus))
}

/// `|x|^{2Δ₁₂−2Δ₃−2Δ₄} H(x^{1/3}, x̄^{1/3})` from a truncated series.
pub fn resum_g_series(cfg: &CorrelatorConfig, series: &DoubleSeries, x: Complex64) -> Result<f64> {
    let ch = Charges::new(cfg)?;
    let u = x.powf(1.0 / 3.0);
    Ok(x.norm().powf(ch.leading()) * series.evaluate(u).re)
}

/// One extracted product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub p: usize,
    pub p_bar: usize,
    pub delta: f64,
    pub delta_bar: f64,
    pub coeff: f64,
    /// Absolute residual of this label's equation in the matching solve.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub pmax: usize,
    /// Power of `x` through which `G` was expanded.
    pub order: usize,
    pub entries: Vec<CoeffEntry>,
    /// `‖M c − h‖₂` of the matching system.
    pub solve_residual: f64,
    pub condition_number: f64,
    /// Weighted mismatch `(Σ r^{2(p+p′)} |H_{pp′} − Ĥ_{pp′}|²)^{1/2}` over
    /// `p, p′ ≤ RESIDUAL_WINDOW`, where `Ĥ` is rebuilt from the extracted labels.
    pub truncation_residual: f64,
}

impl CoeffTable {
    pub fn get(&self, p: usize, p_bar: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.p == p && e.p_bar == p_bar).map(|e| e.coeff)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,p_bar,delta,delta_bar,coeff,residual\n");
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{},{},{:.17e},{:.17e},{:.17e},{:.3e}",
                e.p, e.p_bar, e.delta, e.delta_bar, e.coeff, e.residual
            );
        }
        s
    }
}

fn check_exchange(cfg: &CorrelatorConfig) -> Result<()> {
    let b = cfg.betas();
    let gap = (1.0 - phi(&cfg.dist, b[0] + b[1])?).abs();
    if gap <= DEGENERACY_GAP {
        return Err(Error::DegenerateExchange { gap });
    }
    Ok(())
}

/// Block coefficient tables `b_n(Δ₁₂ + q/3)` for `q ≤ upto`.
fn block_tables(cfg: &CorrelatorConfig, ch: &Charges, upto: usize) -> Result<Vec<Vec<f64>>> {
    let c = 2.0 * cfg.lambda;
    (0..=upto)
        .map(|q| {
            let level = ((upto - q) / 3).min(MAX_LEVEL);
            virasoro_block_series(c, ch.d12 + q as f64 / 3.0, ch.d, level)
        })
        .collect()
}

fn block_coeff(tables: &[Vec<f64>], q: usize, p: usize) -> f64 {
    if p < q || !(p - q).is_multiple_of(3) {
        return 0.0;
    }
    tables[q].get((p - q) / 3).copied().unwrap_or(0.0)
}

/// Matches `H` against the block expansion over labels `p, p′ ≤ pmax`.
pub fn extract_coefficients(cfg: &CorrelatorConfig, pmax: usize) -> Result<CoeffTable> {
    if pmax > MAX_PMAX {
        return Err(Error::InvalidArgument(format!(
            "pmax {pmax} exceeds {MAX_PMAX} (blocks are computed through level {MAX_LEVEL})"
        )));
    }
    let ch = Charges::new(cfg)?;
    check_exchange(cfg)?;

    let window = RESIDUAL_WINDOW.max(pmax);
    let order = window / 3;
    let h = expand_h(&ch, order)?;
    let tables = block_tables(cfg, &ch, window)?;

    let labels: Vec<BlockLabel> =
        (0..=pmax).flat_map(|p| (0..=pmax).map(move |q| BlockLabel::new(p, q))).collect();
    let n = labels.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let (row, col) = (labels[i], labels[j]);
        block_coeff(&tables, col.p, row.p) * block_coeff(&tables, col.p_bar, row.p_bar)
    });
    let rhs = DVector::from_iterator(n, labels.iter().map(|l| h.get(l.p, l.p_bar)));
    let condition = condition_number(&m);
    let sol = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Contract("block matching system is singular".into()))?;
    let row_residual = &m * &sol - &rhs;

    // rebuild H over the residual window from the extracted labels only
    let mut truncation = 0.0;
    for p in 0..=window {
        for pb in 0..=window {
            let mut rebuilt = 0.0;
            for (j, l) in labels.iter().enumerate() {
                rebuilt += sol[j] * block_coeff(&tables, l.p, p) * block_coeff(&tables, l.p_bar, pb);
            }
            let w = RESIDUAL_RATIO.powi((p + pb) as i32);
            truncation += (w * (h.get(p, pb) - rebuilt)).powi(2);
        }
    }

    let entries = labels
        .iter()
        .enumerate()
        .map(|(i, l)| CoeffEntry {
            p: l.p,
            p_bar: l.p_bar,
            delta: ch.d12 + l.p as f64 / 3.0,
            delta_bar: ch.d12 + l.p_bar as f64 / 3.0,
            coeff: sol[i],
            residual: row_residual[i].abs(),
        })
        .collect();
    Ok(CoeffTable {
        pmax,
        order,
        entries,
        solve_residual: row_residual.norm(),
        condition_number: condition,
        truncation_residual: truncation.sqrt(),
    })
}

/// Closed forms of `C₃₄^{(p,p′)} C₁₂^{(p,p′)}` for the labels where they are known.
pub fn closed_form_c(label: BlockLabel, cfg: &CorrelatorConfig) -> Result<f64> {
    if cfg.points.len() != 4 {
        return Err(Error::InvalidArgument(format!("closed forms need 4 points, got {}", cfg.points.len())));
    }
    cfg.validate()?;
    let b = cfg.betas();
    let f = |x: f64| phi(&cfg.dist, x);
    let (f1, f2, f3, f4) = (f(b[0])?, f(b[1])?, f(b[2])?, f(b[3])?);
    let (f12, f13, f14) = (f(b[0] + b[1])?, f(b[0] + b[2])?, f(b[0] + b[3])?);
    let lambda = cfg.lambda;
    let c11 = 1.2 * lambda * mu_constant() * (1.0 - f1 - f2 - f3 - f4 + f12 + f13 + f14);
    let cross = (f1 - f2) * (f3 - f4);
    let off = |denominator: f64| -> Result<f64> {
        check_exchange(cfg)?;
        Ok(cross / denominator - f13 + f14)
    };
    let key = (label.p.min(label.p_bar), label.p.max(label.p_bar));
    match key {
        (0, 0) => Ok(1.0),
        (1, 1) => Ok(c11),
        (2, 2) => Ok(c11 * c11 / 2.0),
        (3, 3) => Ok(c11 * c11 * c11 / 6.0),
        (0, 3) => Ok(lambda / 20.0 * off(1.0 - f12)?),
        (1, 4) => Ok(lambda / 20.0 * c11 * off((10.0 + 3.0 * lambda * (1.0 - f12)) / (3.0 * lambda))?),
        (2, 5) => Ok(lambda / 40.0 * c11 * c11 * off((20.0 + 3.0 * lambda * (1.0 - f12)) / (3.0 * lambda))?),
        _ => Err(Error::NotImplemented(format!("no closed form for label ({}, {})", label.p, label.p_bar))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::MarkDistribution;
    use crate::correlators::{four_point_plane, ChargedPoint};
    use std::f64::consts::PI;

    fn config(dist: MarkDistribution, betas: [f64; 4]) -> CorrelatorConfig {
        let points =
            betas.iter().enumerate().map(|(i, &b)| ChargedPoint::new(i as f64, 0.3 * i as f64, b)).collect();
        CorrelatorConfig::plane(1.0, dist, points).unwrap()
    }

    fn gaussian_config() -> CorrelatorConfig {
        config(MarkDistribution::gaussian(1.0).unwrap(), [0.9, -0.4, 0.7, -1.2])
    }

    #[test]
    fn g_matches_the_four_point_limit() {
        let cfg = gaussian_config();
        let x = Complex64::new(0.3, 0.2);
        let g = g_function(&cfg, x).unwrap();
        let d1 = cfg.delta(cfg.points[0].beta).unwrap();
        let mut last = f64::INFINITY;
        for z1 in [1e4, 1e6, 1e8] {
            let mut far = cfg.clone();
            let z = [Complex64::new(z1, 0.0), Complex64::new(1.0, 0.0), x, Complex64::new(0.0, 0.0)];
            for (p, z) in far.points.iter_mut().zip(z) {
                p.z = z;
            }
            let v = four_point_plane(&far).unwrap().value * z1.powf(4.0 * d1);
            let err = (v / g - 1.0).abs();
            assert!(err < last, "z₁ = {z1}: {err}");
            assert!(err < 10.0 / z1, "z₁ = {z1}: {err}");
            last = err;
        }
    }

    #[test]
    fn zero_charges_give_unit_g() {
        let cfg = config(MarkDistribution::Bernoulli, [0.0; 4]);
        assert_eq!(g_function(&cfg, Complex64::new(0.2, 0.7)).unwrap(), 1.0);
    }

    #[test]
    fn series_resums_to_g() {
        let cfg = gaussian_config();
        let s = expand_g_series(&cfg, 8).unwrap();
        assert!((s.get(0, 0) - 1.0).abs() < 1e-15);
        for x in [Complex64::new(0.05, 0.0), Complex64::new(0.03, 0.04)] {
            let direct = g_function(&cfg, x).unwrap();
            let resummed = resum_g_series(&cfg, &s, x).unwrap();
            assert!((direct - resummed).abs() < 1e-8 * direct, "{direct} vs {resummed}");
        }
    }

    #[test]
    fn extraction_matches_closed_forms() {
        let cfg = gaussian_config();
        let t = extract_coefficients(&cfg, 5).unwrap();
        for (p, q) in [(0, 0), (1, 1), (0, 3), (3, 0), (2, 2), (1, 4), (4, 1), (2, 5), (5, 2)] {
            let want = closed_form_c(BlockLabel::new(p, q), &cfg).unwrap();
            let got = t.get(p, q).unwrap();
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-3), "({p},{q}): {got} vs {want}");
        }
    }

    #[test]
    fn bernoulli_off_diagonal_vanishes() {
        let cfg = config(MarkDistribution::Bernoulli, [0.9, -0.4, 0.7, -1.2]);
        let t = extract_coefficients(&cfg, 3).unwrap();
        assert!(t.get(0, 3).unwrap().abs() < 1e-12);
        assert!(closed_form_c(BlockLabel::new(0, 3), &cfg).unwrap().abs() < 1e-15);
    }

    #[test]
    fn degenerate_exchange_refused() {
        let cfg = config(MarkDistribution::Bernoulli, [PI, PI, 0.5, -0.5]);
        assert!(matches!(extract_coefficients(&cfg, 3), Err(Error::DegenerateExchange { .. })));
        assert!(matches!(
            closed_form_c(BlockLabel::new(7, 7), &gaussian_config()),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn trivial_bracket_for_zero_charges() {
        let cfg = config(MarkDistribution::gaussian(1.0).unwrap(), [0.0; 4]);
        assert_eq!(closed_form_c(BlockLabel::new(1, 1), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn csv_layout() {
        let t = extract_coefficients(&gaussian_config(), 1).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("p,p_bar,delta,delta_bar,coeff,residual"));
        assert_eq!(lines.count(), 4);
    }
}
