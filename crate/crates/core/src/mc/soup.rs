//! Poisson samples of the loop soup restricted to a root window and a
//! duration range.
//!
//! The loop measure is `λ/(2π) d²z dt/t²` times the complex Brownian bridge
//! law of duration `t` rooted at `z`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::bridge::{check_duration_range, duration_from_uniform, sample_bridge, BridgeMethod};
use crate::charfn::MarkDistribution;
use crate::{Complex64, Error, Result};

/// Axis-aligned box of loop roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: Complex64,
    pub max: Complex64,
}

impl Window {
    pub fn new(min: Complex64, max: Complex64) -> Result<Self> {
        if min.re < max.re && min.im < max.im {
            Ok(Self { min, max })
        } else {
            Err(Error::InvalidArgument(format!("empty window [{min}, {max}]")))
        }
    }

    pub fn centered(center: Complex64, half_width: f64) -> Result<Self> {
        let d = Complex64::new(half_width, half_width);
        Self::new(center - d, center + d)
    }

    pub fn area(&self) -> f64 {
        (self.max.re - self.min.re) * (self.max.im - self.min.im)
    }

    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        Complex64::new(
            self.min.re + u * (self.max.re - self.min.re),
            self.min.im + v * (self.max.im - self.min.im),
        )
    }
}

/// A discretized loop: `vertices[0] = vertices[M] = center`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    pub center: Complex64,
    pub duration: f64,
    pub vertices: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct SoupSample {
    pub loops: Vec<LoopPath>,
    pub marks: Vec<f64>,
    pub window: Window,
    pub t_range: (f64, f64),
}

/// `λ/(2π) · Area · (1/t_min − 1/t_max)`.
pub fn expected_loop_count(lambda: f64, window: &Window, t_range: (f64, f64)) -> f64 {
    lambda / (2.0 * PI) * window.area() * (1.0 / t_range.0 - 1.0 / t_range.1)
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let p = Poisson::new(mean).map_err(|e| Error::InvalidArgument(format!("Poisson mean {mean}: {e}")))?;
    Ok(p.sample(rng) as u64)
}

/// One draw of the mark; vector marks contribute their first coordinate,
/// which is what a charge along a fixed axis sees.
pub fn sample_mark<R: Rng + ?Sized>(dist: &MarkDistribution, rng: &mut R) -> Result<f64> {
    let pick = |weights: &mut dyn Iterator<Item = f64>, rng: &mut R| -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, w) in weights.enumerate() {
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    };
    Ok(match dist {
        MarkDistribution::Bernoulli => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        MarkDistribution::Lattice { spacing, atoms } => {
            let i = pick(&mut atoms.iter().map(|a| a.1), rng);
            spacing * atoms[i].0 as f64
        }
        MarkDistribution::Discrete { atoms } => {
            let i = pick(&mut atoms.iter().map(|a| a.1), rng);
            atoms[i].0
        }
        MarkDistribution::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
        MarkDistribution::UnitVector { dim } => {
            let g: Vec<f64> = (0..*dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                1.0
            } else {
                g[0] / norm
            }
        }
        MarkDistribution::Custom(c) => {
            return Err(Error::InvalidDistribution(format!(
                "custom distribution '{}' has no sampler",
                c.name
            )))
        }
    })
}

/// A full soup in `window` with durations in `t_range`, `m` segments per loop.
pub fn sample_soup<R: Rng + ?Sized>(
    lambda: f64,
    window: &Window,
    t_range: (f64, f64),
    m: usize,
    dist: &MarkDistribution,
    rng: &mut R,
) -> Result<SoupSample> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("intensity must be ≥ 0, got {lambda}")));
    }
    check_duration_range(t_range.0, t_range.1)?;
    let count = poisson_count(expected_loop_count(lambda, window, t_range), rng)?;
    let mut loops = Vec::with_capacity(count as usize);
    let mut marks = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let center = window.uniform_point(rng);
        let duration = duration_from_uniform(t_range.0, t_range.1, rng.random());
        let vertices =
            sample_bridge(duration, m, BridgeMethod::Levy, rng)?.into_iter().map(|b| center + b).collect();
        loops.push(LoopPath { center, duration, vertices });
        marks.push(sample_mark(dist, rng)?);
    }
    Ok(SoupSample { loops, marks, window: *window, t_range })
}

/// Writes loops as little-endian records: center (re, im), duration, vertex
/// count, then interleaved re/im of every vertex, all binary64 except the
/// `u64` count.
pub fn write_loop_dump<W: Write>(out: &mut W, loops: &[LoopPath]) -> Result<()> {
    for l in loops {
        out.write_all(&l.center.re.to_le_bytes())?;
        out.write_all(&l.center.im.to_le_bytes())?;
        out.write_all(&l.duration.to_le_bytes())?;
        out.write_all(&(l.vertices.len() as u64).to_le_bytes())?;
        for v in &l.vertices {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_loop_dump<Rd: Read>(input: &mut Rd) -> Result<Vec<LoopPath>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut words = bytes
        .chunks(8)
        .map(|c| <[u8; 8]>::try_from(c).map_err(|_| Error::Parse("truncated loop dump".into())));
    let mut next = || -> Result<[u8; 8]> {
        words.next().unwrap_or_else(|| Err(Error::Parse("truncated loop dump".into())))
    };
    let mut loops = Vec::new();
    let mut consumed = 0;
    while consumed < bytes.len() {
        let re = f64::from_le_bytes(next()?);
        let im = f64::from_le_bytes(next()?);
        let duration = f64::from_le_bytes(next()?);
        let n = u64::from_le_bytes(next()?) as usize;
        let mut vertices = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let vr = f64::from_le_bytes(next()?);
            let vi = f64::from_le_bytes(next()?);
            vertices.push(Complex64::new(vr, vi));
        }
        consumed += 8 * (4 + 2 * n);
        loops.push(LoopPath { center: Complex64::new(re, im), duration, vertices });
    }
    Ok(loops)
}
