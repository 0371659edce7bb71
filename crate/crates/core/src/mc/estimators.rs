//! Soup surveys around a point and the estimators built on them.
//!
//! A survey samples independent soups whose loops have roots in the square
//! of half-width `R` around `z` (every loop of diameter `< R` that reaches
//! `z` is rooted there) and durations in `[t_min, t_max]`. Each loop is
//! classified by its vertex diameter, winding number around `z` and, when
//! requested, whether `z` lies in its filled interior.
//!
//! Loops are first generated at 16 and then 128 segments by midpoint
//! refinement. Every sub-bridge of duration `τ` stays within
//! `ε = 6√τ` of its chord except with probability `< 4e^{−36}`, which lets a
//! loop be discarded early when its coarse shape already rules out the
//! diameter window or cannot reach `z`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bridge::{check_duration_range, check_segments, duration_from_uniform, BridgeMethod, LevyBridge};
use super::geometry::{bounding_box, diameter, encloses_outer, segment_distance, winding_number, Enclosure};
use super::soup::{expected_loop_count, poisson_count, sample_mark, Window};
use super::{EstimatorResult, Welford};
use crate::charfn::MarkDistribution;
use crate::{Complex64, Error, Result};

/// Largest tolerated fraction of undecided filled-interior tests.
pub const MAX_INDETERMINATE_RATE: f64 = 0.01;
const COARSE_LEVELS: [usize; 2] = [16, 128];
const EPS_SIGMAS: f64 = 6.0;
/// Default cap on midpoint halvings in [`refined_winding`].
pub const MAX_WINDING_DEPTH: u32 = 200;

/// How winding numbers around `z` are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindingMode {
    /// Winding of the `M`-segment polygon.
    Polygon,
    /// Winding of the underlying Brownian loop: sub-bridges whose `6√τ`
    /// tube around the chord contains `z` are refined further.
    #[default]
    Refined,
}

/// Which charge the vertex operator measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Layering,
    Winding,
}

#[derive(Debug, Clone)]
pub struct SurveyConfig {
    pub lambda: f64,
    pub z: Complex64,
    pub delta: f64,
    pub r: f64,
    /// Segments per loop (`M`).
    pub segments: usize,
    pub n_soups: usize,
    pub seed: u64,
    /// Seed of the mark streams; `None` uses `seed`. Loop geometry never
    /// depends on it.
    pub mark_seed: Option<u64>,
    pub batch_size: usize,
    /// Duration range; `None` means `[(δ/10)², (10R)²]`.
    pub t_range: Option<(f64, f64)>,
    /// Flood-fill cell size in units of `δ`.
    pub grid_factor: f64,
    pub bridge: BridgeMethod,
    pub winding: WindingMode,
    /// Cap on midpoint halvings per polygon segment in refined mode.
    pub max_winding_depth: u32,
    /// Run the filled-interior test (needed for layering only).
    pub layering: bool,
    pub dist: MarkDistribution,
    /// Winding counts are kept for `|k| ≤ max_winding`.
    pub max_winding: i64,
}

impl SurveyConfig {
    pub fn new(lambda: f64, delta: f64, r: f64) -> Self {
        Self {
            lambda,
            z: Complex64::new(0.0, 0.0),
            delta,
            r,
            segments: 1024,
            n_soups: 20_000,
            seed: 0,
            mark_seed: None,
            batch_size: 256,
            t_range: None,
            grid_factor: 1.0 / 50.0,
            bridge: BridgeMethod::Levy,
            winding: WindingMode::Refined,
            max_winding_depth: MAX_WINDING_DEPTH,
            layering: true,
            dist: MarkDistribution::Bernoulli,
            max_winding: 4,
        }
    }

    pub fn duration_range(&self) -> (f64, f64) {
        self.t_range.unwrap_or(((self.delta / 10.0).powi(2), (10.0 * self.r).powi(2)))
    }

    pub fn window(&self) -> Result<Window> {
        Window::centered(self.z, self.r)
    }

    /// Mean number of loops per soup.
    pub fn expected_loops(&self) -> Result<f64> {
        Ok(expected_loop_count(self.lambda, &self.window()?, self.duration_range()))
    }

    /// The same survey with the duration range widened by `factor` on both ends.
    pub fn widened(&self, factor: f64) -> Self {
        let (a, b) = self.duration_range();
        Self { t_range: Some((a / factor, b * factor)), ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("intensity must be > 0, got {}", self.lambda));
        }
        if !(self.delta > 0.0 && self.delta <= self.r && self.r.is_finite()) {
            return bad(format!("need 0 < δ ≤ R, got δ = {}, R = {}", self.delta, self.r));
        }
        if self.n_soups < 2 {
            return bad("at least two soups are needed".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive".into());
        }
        if !(self.grid_factor > 0.0) {
            return bad("grid factor must be positive".into());
        }
        if self.max_winding < 1 {
            return bad("max_winding must be ≥ 1".into());
        }
        check_segments(self.segments)?;
        let (a, b) = self.duration_range();
        check_duration_range(a, b)
    }
}

/// What one soup contributes at `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoupObservation {
    /// Loops in the diameter window whose filled interior contains `z`.
    pub layer_count: u32,
    /// Sum of their marks.
    pub layer_charge: f64,
    /// Sum of mark × winding over loops in the diameter window.
    pub winding_charge: f64,
    /// Counts of loops with winding `k`, index `k + max_winding`.
    pub winding_counts: Vec<u32>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveyStats {
    pub loops: u64,
    pub in_window: u64,
    pub flood_fills: u64,
    pub indeterminate: u64,
    /// Loops whose winding around `z` was not resolved exactly.
    pub unresolved_windings: u64,
}

impl SurveyStats {
    fn merge(&mut self, o: &SurveyStats) {
        self.loops += o.loops;
        self.in_window += o.in_window;
        self.flood_fills += o.flood_fills;
        self.indeterminate += o.indeterminate;
        self.unresolved_windings += o.unresolved_windings;
    }

    pub fn indeterminate_rate(&self) -> f64 {
        if self.flood_fills == 0 {
            0.0
        } else {
            self.indeterminate as f64 / self.flood_fills as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct SurveyResult {
    pub config: SurveyConfig,
    /// One entry per soup, in batch order.
    pub observations: Vec<SoupObservation>,
    pub batch_bounds: Vec<(usize, usize)>,
    pub stats: SurveyStats,
}

/// Stream for one batch: ChaCha8 keyed by the master seed, stream id = batch.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

fn mark_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    batch_rng(seed, batch | 1 << 63)
}

struct LoopOutcome {
    winding: Option<i64>,
    exact_winding: bool,
    enclosed: bool,
    flood: bool,
    indeterminate: bool,
}

/// Winding number around `z` of a Brownian loop given its vertices at
/// spacing `tau`. Sub-bridges whose `6√τ` tube around the chord contains `z`
/// are split at a freshly sampled midpoint; the others wind like their chord.
/// Pieces still unresolved after `max_depth` halvings (the path
/// then passes extremely close to `z`) are taken as chords and the flag is
/// cleared.
pub fn refined_winding<R: Rng + ?Sized>(
    v: &[Complex64],
    tau: f64,
    z: Complex64,
    max_depth: u32,
    rng: &mut R,
) -> (i64, bool) {
    let mut angle = 0.0;
    let mut exact = true;
    let mut stack = Vec::new();
    for w in v.windows(2) {
        // work relative to z so deep midpoints keep full precision
        stack.push((w[0] - z, w[1] - z, tau, 0u32));
        while let Some((a, b, tau, depth)) = stack.pop() {
            let far = segment_distance(Complex64::new(0.0, 0.0), a, b) > EPS_SIGMAS * tau.sqrt();
            if far || depth >= max_depth {
                exact &= far;
                angle += (b / a).arg();
                continue;
            }
            let noise = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let mid = 0.5 * (a + b) + noise * (tau / 4.0).sqrt();
            stack.push((mid, b, tau / 2.0, depth + 1));
            stack.push((a, mid, tau / 2.0, depth + 1));
        }
    }
    ((angle / (2.0 * PI)).round() as i64, exact)
}

fn coarse_diameter(v: &[Complex64]) -> f64 {
    if v.len() > 40 {
        return diameter(v);
    }
    let mut best: f64 = 0.0;
    for i in 0..v.len() {
        for j in 0..i {
            best = best.max((v[i] - v[j]).norm_sqr());
        }
    }
    best.sqrt()
}

fn classify(cfg: &SurveyConfig, root: Complex64, t: f64, key: u64) -> Option<LoopOutcome> {
    let z = cfg.z;
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let mut bridge = LevyBridge::new(t, cfg.segments);
    for &level in COARSE_LEVELS.iter().filter(|&&l| l < cfg.segments) {
        bridge.refine_to(cfg.segments / level, &mut rng);
        let v = bridge.vertices(root);
        let eps = EPS_SIGMAS * bridge.sub_duration().sqrt();
        let (lo, hi) = bounding_box(&v);
        if z.re <= lo.re - eps || z.re >= hi.re + eps || z.im <= lo.im - eps || z.im >= hi.im + eps {
            return None;
        }
        let d = coarse_diameter(&v);
        if d >= cfg.r || d + 2.0 * eps < cfg.delta {
            return None;
        }
    }
    bridge.refine_to(1, &mut rng);
    let v = bridge.vertices(root);
    let (lo, hi) = bounding_box(&v);
    if !(lo.re < z.re && z.re < hi.re) || !(lo.im < z.im && z.im < hi.im) {
        return None;
    }
    let d = diameter(&v);
    if d < cfg.delta || d >= cfg.r {
        return None;
    }
    let polygon = winding_number(&v, z).ok();
    let (winding, exact_winding) = match cfg.winding {
        WindingMode::Polygon => (polygon, true),
        WindingMode::Refined if polygon.is_some() => {
            let (k, exact) = refined_winding(&v, bridge.sub_duration(), z, cfg.max_winding_depth, &mut rng);
            (Some(k), exact)
        }
        WindingMode::Refined => (None, false),
    };
    let nonzero = |w: Option<i64>| matches!(w, Some(k) if k != 0);
    let mut out = LoopOutcome {
        winding,
        exact_winding,
        enclosed: nonzero(polygon) || nonzero(winding),
        flood: false,
        indeterminate: winding.is_none(),
    };
    if cfg.layering && !out.enclosed {
        out.flood = true;
        match polygon.map(|_| encloses_outer(&v, z, cfg.grid_factor * cfg.delta)) {
            Some(Ok(Enclosure::Inside)) => out.enclosed = true,
            Some(Ok(Enclosure::Outside)) => {}
            _ => out.indeterminate = true,
        }
    }
    Some(out)
}

fn run_batch(cfg: &SurveyConfig, batch: usize, soups: usize) -> Result<(Vec<SoupObservation>, SurveyStats)> {
    let mut rng = batch_rng(cfg.seed, batch as u64);
    let mut marks = mark_rng(cfg.mark_seed.unwrap_or(cfg.seed), batch as u64);
    let window = cfg.window()?;
    let (t_min, t_max) = cfg.duration_range();
    let mean = expected_loop_count(cfg.lambda, &window, (t_min, t_max));
    let kmax = cfg.max_winding;
    let mut stats = SurveyStats::default();
    let mut out = Vec::with_capacity(soups);
    for _ in 0..soups {
        let count = poisson_count(mean, &mut rng)?;
        let mut obs = SoupObservation {
            layer_count: 0,
            layer_charge: 0.0,
            winding_charge: 0.0,
            winding_counts: vec![0; (2 * kmax + 1) as usize],
        };
        for _ in 0..count {
            // every loop consumes the same draws from the batch stream
            let root = window.uniform_point(&mut rng);
            let t = duration_from_uniform(t_min, t_max, rng.random());
            let key = rng.next_u64();
            let mark = sample_mark(&cfg.dist, &mut marks)?;
            stats.loops += 1;
            let Some(o) = classify(cfg, root, t, key) else {
                continue;
            };
            stats.in_window += 1;
            stats.flood_fills += o.flood as u64;
            stats.indeterminate += (o.flood && o.indeterminate) as u64;
            stats.unresolved_windings += !o.exact_winding as u64;
            if o.enclosed {
                obs.layer_count += 1;
                obs.layer_charge += mark;
            }
            if let Some(k) = o.winding {
                obs.winding_charge += mark * k as f64;
                if k != 0 && k.abs() <= kmax {
                    obs.winding_counts[(k + kmax) as usize] += 1;
                }
            }
        }
        out.push(obs);
    }
    Ok((out, stats))
}

/// Samples `n_soups` soups in batches (in parallel) and records what each
/// contributes at `z`. Output depends only on the seed and batch size.
pub fn survey(cfg: &SurveyConfig) -> Result<SurveyResult> {
    cfg.validate()?;
    let batches: Vec<(usize, usize)> = (0..cfg.n_soups)
        .step_by(cfg.batch_size)
        .map(|start| (start, (start + cfg.batch_size).min(cfg.n_soups)))
        .collect();
    let parts: Vec<Result<(Vec<SoupObservation>, SurveyStats)>> =
        batches.par_iter().enumerate().map(|(b, &(s, e))| run_batch(cfg, b, e - s)).collect();
    let mut observations = Vec::with_capacity(cfg.n_soups);
    let mut stats = SurveyStats::default();
    for part in parts {
        let (obs, st) = part?;
        observations.extend(obs);
        stats.merge(&st);
    }
    if cfg.layering && stats.indeterminate_rate() > MAX_INDETERMINATE_RATE {
        return Err(Error::IndeterminateEnclosure { rate: stats.indeterminate_rate() });
    }
    Ok(SurveyResult { config: cfg.clone(), observations, batch_bounds: batches, stats })
}

impl SurveyResult {
    /// Per-batch accumulators of `f`, merged in batch order.
    pub fn estimate<F: Fn(&SoupObservation) -> f64>(&self, f: F, notes: String) -> EstimatorResult {
        let partials = self.batch_partials(&f);
        let mut total = Welford::default();
        for p in &partials {
            total.merge(p);
        }
        EstimatorResult::from_welford(&total, notes)
    }

    pub fn batch_partials<F: Fn(&SoupObservation) -> f64>(&self, f: F) -> Vec<Welford> {
        self.batch_bounds
            .iter()
            .map(|&(s, e)| {
                let mut w = Welford::default();
                self.observations[s..e].iter().for_each(|o| w.push(f(o)));
                w
            })
            .collect()
    }

    fn notes(&self) -> String {
        let (a, b) = self.config.duration_range();
        format!(
            "M = {}, durations [{a:.3e}, {b:.3e}], root window half-width R, grid h = {:.3e}; \
             {} loops, {} in diameter window reaching z, {} flood fills ({} undecided); \
             vertex polygons under-resolve fractal boundaries",
            self.config.segments,
            self.config.grid_factor * self.config.delta,
            self.stats.loops,
            self.stats.in_window,
            self.stats.flood_fills,
            self.stats.indeterminate
        )
    }

    /// Estimate of `α = μ^loop(z ∈ γ̄, δ ≤ diam γ < R)`.
    pub fn alpha(&self) -> Result<EstimatorResult> {
        if !self.config.layering {
            return Err(Error::InvalidArgument("the survey ran without the filled-interior test".into()));
        }
        let lambda = self.config.lambda;
        Ok(self.estimate(|o| o.layer_count as f64 / lambda, self.notes()))
    }

    /// Estimate of the weight of loops winding exactly `k` times around `z`.
    pub fn winding_weight(&self, k: i64) -> Result<EstimatorResult> {
        let kmax = self.config.max_winding;
        if k == 0 || k.abs() > kmax {
            return Err(Error::InvalidArgument(format!("winding {k} outside 1 ≤ |k| ≤ {kmax}")));
        }
        let lambda = self.config.lambda;
        let idx = (k + kmax) as usize;
        Ok(self.estimate(|o| o.winding_counts[idx] as f64 / lambda, self.notes()))
    }

    /// `Re E[e^{iβN(z)}]` (the imaginary part vanishes for even marks).
    pub fn vertex(&self, kind: VertexKind, beta: f64) -> Result<EstimatorResult> {
        if kind == VertexKind::Layering && !self.config.layering {
            return Err(Error::InvalidArgument("the survey ran without the filled-interior test".into()));
        }
        Ok(match kind {
            VertexKind::Layering => self.estimate(|o| (beta * o.layer_charge).cos(), self.notes()),
            VertexKind::Winding => self.estimate(|o| (beta * o.winding_charge).cos(), self.notes()),
        })
    }
}

/// Runs `estimator` on the survey and on one with the duration range
/// widened 4×, returning both estimates; their difference bounds the
/// duration-truncation bias.
pub fn truncation_check<F>(cfg: &SurveyConfig, estimator: F) -> Result<(EstimatorResult, EstimatorResult)>
where
    F: Fn(&SurveyResult) -> Result<EstimatorResult>,
{
    let base = estimator(&survey(cfg)?)?;
    let wide = estimator(&survey(&cfg.widened(4.0))?)?;
    Ok((base, wide))
}

fn with_window(cfg: &SurveyConfig, delta: f64, r: f64) -> SurveyConfig {
    SurveyConfig { delta, r, ..cfg.clone() }
}

/// `α` at `z` for the diameter window `[δ, R)`; `R = δ` gives exactly 0.
pub fn estimate_alpha_layering(cfg: &SurveyConfig) -> Result<EstimatorResult> {
    if cfg.r == cfg.delta {
        return Ok(EstimatorResult::exact(0.0, cfg.n_soups, "empty diameter window"));
    }
    survey(&SurveyConfig { layering: true, ..cfg.clone() })?.alpha()
}

/// Weight of loops winding exactly `k ≠ 0` times around `z`.
pub fn estimate_winding_weight(cfg: &SurveyConfig, k: i64) -> Result<EstimatorResult> {
    let kmax = cfg.max_winding.max(k.abs());
    survey(&SurveyConfig { layering: false, max_winding: kmax, ..cfg.clone() })?.winding_weight(k)
}

/// `E[e^{iβN(z)}]` for marks drawn from `dist`.
pub fn estimate_vertex_onepoint(
    cfg: &SurveyConfig,
    kind: VertexKind,
    dist: &MarkDistribution,
    beta: f64,
) -> Result<EstimatorResult> {
    if beta == 0.0 {
        return Ok(EstimatorResult::exact(1.0, cfg.n_soups, "β = 0"));
    }
    let run = SurveyConfig { dist: dist.clone(), layering: kind == VertexKind::Layering, ..cfg.clone() };
    survey(&run)?.vertex(kind, beta)
}

/// `α` summed over several diameter windows `[δ_i, R_i)` sharing the other settings.
pub fn alpha_by_window(
    cfg: &SurveyConfig,
    windows: &[(f64, f64)],
) -> Result<BTreeMap<String, EstimatorResult>> {
    windows
        .iter()
        .map(|&(d, r)| Ok((format!("[{d}, {r})"), estimate_alpha_layering(&with_window(cfg, d, r))?)))
        .collect()
}
