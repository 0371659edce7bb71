//! Run configuration files and versioned output records.
//!
//! A configuration is a JSON object; every field is optional and command
//! line flags take precedence. The fully resolved configuration is echoed
//! into each JSON output so that it can be fed back with `--config`.
//!
//! ```json
//! {
//!   "lambda": 1.0,
//!   "distribution": {"kind": "gaussian", "sigma": 1.0},
//!   "domain": "plane",
//!   "points": [{"re": 0.0, "im": 0.0, "beta": 1.0}, {"re": 1.0, "im": 0.0, "beta": -1.0}],
//!   "seed": 7
//! }
//! ```
//!
//! JSON outputs are `{"schema": "bls/1", "command", "config", "result"}`.
//! CSV outputs start with a `# schema: bls/1 <command>` line followed by a
//! fixed header.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charfn::MarkDistribution;
use crate::correlators::{ChargedPoint, Domain};
use crate::mc::{BridgeMethod, WindingMode};
use crate::{Error, Result};

pub const SCHEMA: &str = "bls/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSpec {
    pub re: f64,
    pub im: f64,
    pub beta: f64,
}

impl From<PointSpec> for ChargedPoint {
    fn from(p: PointSpec) -> Self {
        ChargedPoint::new(p.re, p.im, p.beta)
    }
}

impl std::str::FromStr for PointSpec {
    type Err = Error;

    /// `re,im,beta`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num =
            |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}' in point '{s}'")));
        match parts.as_slice() {
            [re, im, beta] => Ok(Self { re: num(re)?, im: num(im)?, beta: num(beta)? }),
            _ => Err(Error::Parse(format!("point '{s}' is not of the form re,im,beta"))),
        }
    }
}

/// β grid of the `dim` command: `steps` equally spaced values from
/// `beta_min` to `beta_max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self { beta_min: 0.0, beta_max: 2.0 * PI, steps: 65 }
    }
}

impl Sweep {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps == 0 || !(self.beta_min.is_finite() && self.beta_max.is_finite()) {
            return Err(Error::InvalidArgument("empty β sweep".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.beta_min]);
        }
        let h = (self.beta_max - self.beta_min) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.beta_min + h * i as f64).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McEstimator {
    #[default]
    Alpha,
    Winding,
    VertexLayering,
    VertexWinding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSpec {
    pub estimator: McEstimator,
    pub z: [f64; 2],
    pub delta: f64,
    pub r: f64,
    pub segments: usize,
    pub n_soups: usize,
    pub batch_size: usize,
    /// Winding number for the `winding` estimator.
    pub k: i64,
    /// Flood-fill cell size in units of `delta`.
    pub grid_factor: f64,
    /// Charge for the vertex estimators.
    pub beta: f64,
    pub bridge: BridgeMethod,
    pub winding_mode: WindingMode,
    /// Also run with the duration range widened 4× and report the shift.
    pub bias_check: bool,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            estimator: McEstimator::Alpha,
            z: [0.0, 0.0],
            delta: 1.0,
            r: E,
            segments: 1024,
            n_soups: 20_000,
            batch_size: 256,
            k: 1,
            grid_factor: 1.0 / 50.0,
            beta: PI,
            bridge: BridgeMethod::Levy,
            winding_mode: WindingMode::Refined,
            bias_check: false,
        }
    }
}

/// Resolved or partial run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<MarkDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Serialize)]
struct Record<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

/// Pretty JSON record of one command's result.
pub fn json_record<T: Serialize>(command: &str, config: &RunConfig, result: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Record { schema: SCHEMA, command, config, result })?;
    s.push('\n');
    Ok(s)
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, command: &str) -> String {
        let mut s = format!("# schema: {SCHEMA} {command}\n{}\n", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// Full-precision decimal form used in CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}
