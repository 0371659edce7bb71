//! Monte Carlo sampling of the loop soup.
//!
//! Used as an independent check of loop weights (layering and winding) and
//! of one-point scaling; the analytic modules never call into it.

pub mod bridge;
pub mod estimators;
pub mod geometry;
pub mod soup;

use serde::{Deserialize, Serialize};

pub use bridge::{sample_bridge, sample_duration, BridgeMethod, LevyBridge};
pub use estimators::{
    batch_rng, estimate_alpha_layering, estimate_vertex_onepoint, estimate_winding_weight, refined_winding,
    survey, truncation_check, SoupObservation, SurveyConfig, SurveyResult, SurveyStats, VertexKind,
    WindingMode,
};
pub use geometry::{convex_hull, diameter, encloses_outer, winding_number, Enclosure};
pub use soup::{
    expected_loop_count, read_loop_dump, sample_mark, sample_soup, write_loop_dump, LoopPath, SoupSample,
    Window,
};

/// Running mean and variance (Welford), mergeable across batches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Welford {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub bias_notes: String,
}

impl EstimatorResult {
    pub fn from_welford(w: &Welford, notes: String) -> Self {
        Self { mean: w.mean, stderr: w.stderr(), n_samples: w.n as usize, bias_notes: notes }
    }

    pub fn exact(value: f64, n: usize, notes: &str) -> Self {
        Self { mean: value, stderr: 0.0, n_samples: n, bias_notes: notes.into() }
    }

    /// `|mean − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.stderr
        }
    }
}
