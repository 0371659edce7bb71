//! Loop durations and complex Brownian bridges.
//!
//! Each coordinate of the bridge is a standard Brownian bridge, so a loop of
//! duration `t` has `Var[Re B_s] = s(t − s)/t`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

/// Smallest supported number of segments.
pub const MIN_SEGMENTS: usize = 64;

/// Inverse-CDF sample of the density `∝ 1/t²` on `[t_min, t_max]`.
pub fn duration_from_uniform(t_min: f64, t_max: f64, u: f64) -> f64 {
    t_min / (1.0 - u * (1.0 - t_min / t_max))
}

pub fn sample_duration<R: Rng + ?Sized>(t_min: f64, t_max: f64, rng: &mut R) -> Result<f64> {
    check_duration_range(t_min, t_max)?;
    Ok(duration_from_uniform(t_min, t_max, rng.random::<f64>()))
}

pub(crate) fn check_duration_range(t_min: f64, t_max: f64) -> Result<()> {
    if t_min > 0.0 && t_min < t_max && t_max.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "duration range must satisfy 0 < t_min < t_max, got [{t_min}, {t_max}]"
        )))
    }
}

/// How bridge vertices are generated; both give the same law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeMethod {
    /// Midpoint refinement: coarse vertices are drawn first and are shared
    /// by every finer discretization of the same random stream.
    #[default]
    Levy,
    /// `W_k − (k/M) W_M` for a Gaussian random walk `W`.
    RandomWalk,
}

pub(crate) fn check_segments(m: usize) -> Result<()> {
    if m >= MIN_SEGMENTS && m.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("segment count must be a power of two ≥ {MIN_SEGMENTS}, got {m}")))
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Bridge offsets `B_0 = B_M = 0` of duration `t` at `m + 1` equally spaced times.
pub fn sample_bridge<R: Rng + ?Sized>(
    t: f64,
    m: usize,
    method: BridgeMethod,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    check_segments(m)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("duration must be > 0, got {t}")));
    }
    Ok(match method {
        BridgeMethod::Levy => {
            let mut levy = LevyBridge::new(t, m);
            levy.refine_to(1, rng);
            levy.into_offsets()
        }
        BridgeMethod::RandomWalk => random_walk_bridge(t, m, rng),
    })
}

fn random_walk_bridge<R: Rng + ?Sized>(t: f64, m: usize, rng: &mut R) -> Vec<Complex64> {
    let sd = (t / m as f64).sqrt();
    let mut w = Vec::with_capacity(m + 1);
    w.push(Complex64::new(0.0, 0.0));
    for k in 0..m {
        let step = Complex64::new(normal(rng), normal(rng)) * sd;
        w.push(w[k] + step);
    }
    let end = w[m];
    for (k, p) in w.iter_mut().enumerate() {
        *p -= end * (k as f64 / m as f64);
    }
    w[m] = Complex64::new(0.0, 0.0);
    w
}

/// A bridge refined level by level; after `refine_to(s)` the vertices at
/// multiples of `s` are final.
pub struct LevyBridge {
    t: f64,
    m: usize,
    stride: usize,
    offsets: Vec<Complex64>,
}

impl LevyBridge {
    pub fn new(t: f64, m: usize) -> Self {
        Self { t, m, stride: m, offsets: vec![Complex64::new(0.0, 0.0); m + 1] }
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn segments(&self) -> usize {
        self.m
    }

    /// Duration of each current sub-interval.
    pub fn sub_duration(&self) -> f64 {
        self.t * self.stride as f64 / self.m as f64
    }

    pub fn refine_to<R: Rng + ?Sized>(&mut self, stride: usize, rng: &mut R) {
        while self.stride > stride.max(1) {
            let half = self.stride / 2;
            // midpoint of a bridge over an interval of length L has variance L/4 per coordinate
            let sd = (self.sub_duration() / 4.0).sqrt();
            let mut k = half;
            while k < self.m {
                let mid = 0.5 * (self.offsets[k - half] + self.offsets[k + half]);
                self.offsets[k] = mid + Complex64::new(normal(rng), normal(rng)) * sd;
                k += self.stride;
            }
            self.stride = half;
        }
    }

    /// Vertices at the current resolution, shifted by `root`.
    pub fn vertices(&self, root: Complex64) -> Vec<Complex64> {
        self.offsets.iter().step_by(self.stride).map(|&b| root + b).collect()
    }

    pub fn into_offsets(self) -> Vec<Complex64> {
        self.offsets
    }
}
