//! Mark distributions, their characteristic functions, and the conformal
//! dimensions of layering and winding vertex operators.
//!
//! Only even distributions are accepted, so `φ(β) = E[cos(βX)]` is real.
//! Vector marks enter through the scalar `β = |β|` only.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::special::{gamma_positive, quad::tanh_sinh};
use crate::{Complex64, Error, Result};

/// Normalization and evenness tolerance for atomic distributions.
pub const PROB_TOL: f64 = 1e-12;
/// Tolerance on charge sums.
pub const CHARGE_TOL: f64 = 1e-9;
/// Default absolute accuracy for winding dimensions.
pub const DEFAULT_WINDING_TOL: f64 = 1e-10;
/// `|β|` above which the unit-vector characteristic function is refused.
pub const MAX_UNIT_VECTOR_BETA: f64 = 1e8;

const ZF1_REL_TOL: f64 = 1e-16;
const ZF1_MAX_TERMS: usize = 100_000;
// Beyond this |β| the alternating ₀F₁ series loses too many digits.
const ZF1_SERIES_BETA: f64 = 6.0;
const WINDING_MAX_TERMS: usize = 10_000_000;

/// User-supplied even characteristic function.
#[derive(Clone)]
pub struct CustomPhi {
    pub name: String,
    pub phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Optional nonincreasing bound `|φ(t)| ≤ envelope(t)` for `t ≥ 0`,
    /// used to bound winding-series tails.
    pub envelope: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for CustomPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPhi")
            .field("name", &self.name)
            .field("envelope", &self.envelope.is_some())
            .finish()
    }
}

/// The random mark attached to every loop.
#[derive(Debug, Clone)]
pub enum MarkDistribution {
    /// `±1` with probability ½ each.
    Bernoulli,
    /// Atoms `b·n` with probabilities `p_n`.
    Lattice {
        spacing: f64,
        atoms: Vec<(i64, f64)>,
    },
    /// Finitely many real atoms `(x, p)`.
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
    /// Centered normal with standard deviation `sigma`.
    Gaussian {
        sigma: f64,
    },
    /// Uniform unit vector in `R^dim`.
    UnitVector {
        dim: u32,
    },
    Custom(CustomPhi),
}

impl MarkDistribution {
    pub fn bernoulli() -> Self {
        Self::Bernoulli
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        let d = Self::Gaussian { sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_vector(dim: u32) -> Result<Self> {
        let d = Self::UnitVector { dim };
        d.validate()?;
        Ok(d)
    }

    pub fn lattice(spacing: f64, atoms: Vec<(i64, f64)>) -> Result<Self> {
        let d = Self::Lattice { spacing, atoms };
        d.validate()?;
        Ok(d)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let d = Self::Discrete { atoms };
        d.validate()?;
        Ok(d)
    }

    /// Shifts finitely many atoms to zero mean; the result must be even.
    pub fn centered(atoms: &[(f64, f64)]) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let mean: f64 = atoms.iter().map(|(x, p)| x * p).sum();
        Self::discrete(atoms.iter().map(|&(x, p)| (x - mean, p)).collect())
    }

    pub fn custom<F>(name: &str, phi: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::Custom(CustomPhi { name: name.to_string(), phi: Arc::new(phi), envelope: None })
    }

    /// Checks evenness, normalization and parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        match self {
            Self::Bernoulli => Ok(()),
            Self::Gaussian { sigma } => {
                if sigma.is_finite() && *sigma > 0.0 {
                    Ok(())
                } else {
                    bad(format!("gaussian sigma must be > 0, got {sigma}"))
                }
            }
            Self::UnitVector { dim } => {
                if *dim >= 1 {
                    Ok(())
                } else {
                    bad("unit vector dimension must be >= 1".into())
                }
            }
            Self::Lattice { spacing, atoms } => {
                if !(spacing.is_finite() && *spacing > 0.0) {
                    return bad(format!("lattice spacing must be > 0, got {spacing}"));
                }
                let as_real: Vec<(f64, f64)> = atoms.iter().map(|&(n, p)| (n as f64, p)).collect();
                check_atoms(&as_real)
            }
            Self::Discrete { atoms } => check_atoms(atoms),
            Self::Custom(c) => {
                let v0 = (c.phi)(0.0);
                if (v0 - 1.0).abs() > 1e-12 {
                    return bad(format!("custom φ(0) = {v0}, expected 1"));
                }
                for k in 1..=64 {
                    let b = 0.37 * k as f64;
                    let (p, m) = ((c.phi)(b), (c.phi)(-b));
                    if !p.is_finite() || p.abs() > 1.0 + 1e-12 {
                        return bad(format!("custom |φ({b})| = {} exceeds 1", p.abs()));
                    }
                    if (p - m).abs() > 1e-12 {
                        return bad(format!("custom φ is not even at β = {b}"));
                    }
                }
                Ok(())
            }
        }
    }

    /// `2π/b` for lattice marks (Bernoulli included), `None` otherwise.
    pub fn lattice_period(&self) -> Option<f64> {
        match self {
            Self::Bernoulli => Some(2.0 * PI),
            Self::Lattice { spacing, .. } => Some(2.0 * PI / spacing),
            _ => None,
        }
    }

    /// `E[X²]` (for vector marks, the second moment of one projection).
    pub fn second_moment(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            Self::Bernoulli => 1.0,
            Self::Lattice { spacing, atoms } => {
                atoms.iter().map(|&(n, p)| p * (spacing * n as f64).powi(2)).sum()
            }
            Self::Discrete { atoms } => atoms.iter().map(|(x, p)| p * x * x).sum(),
            Self::Gaussian { sigma } => sigma * sigma,
            Self::UnitVector { dim } => 1.0 / *dim as f64,
            Self::Custom(c) => {
                let h = 1e-4;
                -((c.phi)(h) - 2.0 + (c.phi)(-h)) / (h * h)
            }
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Bernoulli => "bernoulli",
            Self::Lattice { .. } => "lattice",
            Self::Discrete { .. } => "discrete",
            Self::Gaussian { .. } => "gaussian",
            Self::UnitVector { .. } => "unit_vector",
            Self::Custom(_) => "custom",
        }
    }
}

fn check_atoms(atoms: &[(f64, f64)]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::InvalidDistribution("no atoms".into()));
    }
    let mut total = 0.0;
    for &(x, p) in atoms {
        if !(p >= 0.0) || !x.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "atom ({x}, {p}) has a negative or invalid probability"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    // evenness: the mass at x equals the mass at −x
    let mass_at = |v: f64| -> f64 {
        atoms.iter().filter(|a| (a.0 - v).abs() <= 1e-12 * (1.0 + v.abs())).map(|a| a.1).sum()
    };
    for &(x, _) in atoms {
        if (mass_at(x) - mass_at(-x)).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!(
                "distribution is not even: mass at {x} differs from mass at {}",
                -x
            )));
        }
    }
    Ok(())
}

/// `φ(β) = E[cos(βX)]`.
pub fn phi(dist: &MarkDistribution, beta: f64) -> Result<f64> {
    dist.validate()?;
    phi_unchecked(dist, beta)
}

pub(crate) fn phi_unchecked(dist: &MarkDistribution, beta: f64) -> Result<f64> {
    Ok(match dist {
        MarkDistribution::Bernoulli => beta.cos(),
        MarkDistribution::Lattice { spacing, atoms } => {
            atoms.iter().map(|&(n, p)| p * (beta * spacing * n as f64).cos()).sum()
        }
        MarkDistribution::Discrete { atoms } => atoms.iter().map(|(x, p)| p * (beta * x).cos()).sum(),
        MarkDistribution::Gaussian { sigma } => (-0.5 * sigma * sigma * beta * beta).exp(),
        MarkDistribution::UnitVector { dim } => phi_unit_vector(*dim, beta)?,
        MarkDistribution::Custom(c) => (c.phi)(beta),
    })
}

/// `₀F₁(; d/2; −β²/4)`, the characteristic function of a uniform unit vector
/// in `R^d` at `|β| = beta`.
///
/// Power series for `|β| ≤ 6`; beyond that the series cancels badly and the
/// equivalent angular average `E[cos(β cos θ)]` with density `∝ sin^{d−2}θ`
/// is integrated instead (`d = 1` is `cos β` exactly).
pub fn phi_unit_vector(dim: u32, beta: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDistribution("unit vector dimension must be >= 1".into()));
    }
    let b = beta.abs();
    if b > MAX_UNIT_VECTOR_BETA || !b.is_finite() {
        return Err(Error::NotConverged { func: "phi_unit_vector", terms: 0, last_term: b });
    }
    if b <= ZF1_SERIES_BETA {
        return hyp0f1_neg(dim as f64 / 2.0, b * b / 4.0);
    }
    if dim == 1 {
        return Ok(b.cos());
    }
    Ok(angular_average(dim, |t| (b * t).cos()))
}

/// `₀F₁(; a; −z)` by its power series.
pub fn hyp0f1_neg(a: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..ZF1_MAX_TERMS {
        let kf = k as f64;
        term *= -z / ((kf + 1.0) * (a + kf));
        sum += term;
        if term.abs() < ZF1_REL_TOL * sum.abs().max(1e-300) || term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NotConverged { func: "hyp0f1", terms: ZF1_MAX_TERMS, last_term: term.abs() })
}

/// `E[f(Y)]` where `Y` is one coordinate of a uniform unit vector in `R^dim`,
/// `dim ≥ 2`, computed as an integral over the polar angle.
fn angular_average<F: Fn(f64) -> f64>(dim: u32, f: F) -> f64 {
    let d = dim as f64;
    // ∫₀^π sin^{d−2}θ dθ = √π Γ((d−1)/2) / Γ(d/2)
    let norm = PI.sqrt() * gamma_positive((d - 1.0) / 2.0).unwrap_or(f64::NAN)
        / gamma_positive(d / 2.0).unwrap_or(f64::NAN);
    let q = tanh_sinh(
        |s, sc| {
            // θ = π s; sin θ from the nearer endpoint to keep accuracy
            let theta = PI * s;
            let sin = if s < 0.5 { theta.sin() } else { (PI * sc).sin() };
            let cos = if s < 0.5 { theta.cos() } else { -(PI * sc).cos() };
            Complex64::new(f(cos) * sin.powf(d - 2.0), 0.0)
        },
        1e-15,
    );
    PI * q.value.re / norm
}

/// Layering and winding dimensions of one vertex operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub delta: f64,
    pub delta_w: f64,
    pub lambda: f64,
}

impl Dimensions {
    pub fn compute(lambda: f64, dist: &MarkDistribution, beta: f64) -> Result<Self> {
        Ok(Self {
            delta: delta_layering(lambda, dist, beta)?,
            delta_w: delta_winding(lambda, dist, beta, DEFAULT_WINDING_TOL)?,
            lambda,
        })
    }

    /// Central charge `c = 2λ`.
    pub fn central_charge(&self) -> f64 {
        2.0 * self.lambda
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("intensity λ must be > 0, got {lambda}")))
    }
}

/// `Δ(β) = (λ/10)(1 − φ(β))`.
pub fn delta_layering(lambda: f64, dist: &MarkDistribution, beta: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(lambda / 10.0 * (1.0 - phi(dist, beta)?))
}

/// `Σ_{m≥1} (1 − cos mθ)/m² = πθ/2 − θ²/4` after reducing `|θ|` into `[0, 2π]`.
pub fn winding_kernel(theta: f64) -> f64 {
    let t = theta.abs().rem_euclid(2.0 * PI);
    PI * t / 2.0 - t * t / 4.0
}

/// `Δ_w(β) = (λ/2π²) Σ_{m≥1} (1 − φ(mβ))/m²` to absolute accuracy `tol`.
///
/// Atomic marks use the per-atom closed form of the Fourier sum. Unit-vector
/// marks average the same closed form over the projection density. Gaussian
/// and custom marks sum `π²/6 − Σ φ(mβ)/m²` and stop once the envelope tail
/// bound drops below `tol`.
pub fn delta_winding(lambda: f64, dist: &MarkDistribution, beta: f64, tol: f64) -> Result<f64> {
    check_lambda(lambda)?;
    dist.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be > 0, got {tol}")));
    }
    let pref = lambda / (2.0 * PI * PI);
    if beta == 0.0 {
        return Ok(0.0);
    }
    let sum = match dist {
        MarkDistribution::Bernoulli => winding_kernel(beta),
        MarkDistribution::Lattice { spacing, atoms } => {
            atoms.iter().map(|&(n, p)| p * winding_kernel(beta * spacing * n as f64)).sum()
        }
        MarkDistribution::Discrete { atoms } => {
            atoms.iter().map(|&(x, p)| p * winding_kernel(beta * x)).sum()
        }
        MarkDistribution::UnitVector { dim } => {
            if *dim == 1 {
                winding_kernel(beta)
            } else {
                unit_vector_winding_sum(*dim, beta, tol / pref)?
            }
        }
        MarkDistribution::Gaussian { sigma } => {
            let s = *sigma;
            envelope_sum(
                |t| (-0.5 * s * s * t * t).exp(),
                |t| (-0.5 * s * s * t * t).exp(),
                beta,
                tol / pref,
            )?
        }
        MarkDistribution::Custom(c) => match &c.envelope {
            Some(env) => envelope_sum(|t| (c.phi)(t), |t| env(t), beta, tol / pref)?,
            None => envelope_sum(|t| (c.phi)(t), |_| 1.0, beta, tol / pref)?,
        },
    };
    Ok(pref * sum)
}

fn envelope_sum<P, E>(phi: P, envelope: E, beta: f64, tol: f64) -> Result<f64>
where
    P: Fn(f64) -> f64,
    E: Fn(f64) -> f64,
{
    // Σ (1 − φ(mβ))/m² = π²/6 − Σ φ(mβ)/m²; the remainder after M terms is
    // bounded by envelope((M+1)|β|) · Σ_{m>M} 1/m² < envelope((M+1)|β|)/M.
    let b = beta.abs();
    let mut partial = 0.0;
    let mut bound = f64::INFINITY;
    for m in 1..=WINDING_MAX_TERMS {
        let mf = m as f64;
        partial += phi(mf * b) / (mf * mf);
        bound = envelope((mf + 1.0) * b) / mf;
        if bound < tol {
            return Ok(PI * PI / 6.0 - partial);
        }
    }
    Err(Error::AccuracyNotReached { requested: tol, achieved: bound })
}

fn unit_vector_winding_sum(dim: u32, beta: f64, tol: f64) -> Result<f64> {
    // Σ (1 − φ(mβ))/m² = E[B(βY)] with B the closed-form kernel; B has kinks
    // where |βY| hits multiples of 2π, so integrate piecewise in θ.
    let b = beta.abs();
    let d = dim as f64;
    let norm = PI.sqrt() * gamma_positive((d - 1.0) / 2.0)? / gamma_positive(d / 2.0)?;
    let mut cuts = vec![0.0, PI];
    let kmax = (b / (2.0 * PI)).floor() as i64;
    if kmax > 100_000 {
        return Err(Error::AccuracyNotReached { requested: tol, achieved: f64::INFINITY });
    }
    for k in 1..=kmax {
        let c = 2.0 * PI * k as f64 / b;
        if c < 1.0 {
            cuts.push(c.acos());
            cuts.push(PI - c.acos());
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    let mut total = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let q = tanh_sinh(
            |s, _| {
                let theta = lo + (hi - lo) * s;
                Complex64::new(winding_kernel(b * theta.cos()) * theta.sin().powf(d - 2.0), 0.0)
            },
            1e-15,
        );
        total += (hi - lo) * q.value.re;
        err += (hi - lo) * q.error_estimate;
    }
    if err / norm > tol {
        return Err(Error::AccuracyNotReached { requested: tol, achieved: err / norm });
    }
    Ok(total / norm)
}

/// Result of a charge-conservation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeConservation {
    pub satisfied: bool,
    pub k: Option<i64>,
}

/// `Σβ_j ∈ (2π/b)ℤ` for lattice marks, `Σβ_j = 0` otherwise.
pub fn charge_conservation(dist: &MarkDistribution, betas: &[f64]) -> ChargeConservation {
    let total: f64 = betas.iter().sum();
    match dist.lattice_period() {
        Some(period) => {
            let k = (total / period).round();
            let satisfied = (total - k * period).abs() < CHARGE_TOL;
            ChargeConservation { satisfied, k: satisfied.then_some(k as i64) }
        }
        None => {
            let satisfied = total.abs() < CHARGE_TOL;
            ChargeConservation { satisfied, k: satisfied.then_some(0) }
        }
    }
}

/// Serialized form `{kind, params}` of a mark distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    Bernoulli,
    Lattice { b: f64, atoms: Vec<(i64, f64)> },
    Discrete { atoms: Vec<(f64, f64)> },
    Gaussian { sigma: f64 },
    UnitVector { d: u32 },
}

impl TryFrom<DistributionSpec> for MarkDistribution {
    type Error = Error;

    fn try_from(spec: DistributionSpec) -> Result<Self> {
        let d = match spec {
            DistributionSpec::Bernoulli => MarkDistribution::Bernoulli,
            DistributionSpec::Lattice { b, atoms } => MarkDistribution::Lattice { spacing: b, atoms },
            DistributionSpec::Discrete { atoms } => MarkDistribution::Discrete { atoms },
            DistributionSpec::Gaussian { sigma } => MarkDistribution::Gaussian { sigma },
            DistributionSpec::UnitVector { d } => MarkDistribution::UnitVector { dim: d },
        };
        d.validate()?;
        Ok(d)
    }
}

impl TryFrom<&MarkDistribution> for DistributionSpec {
    type Error = Error;

    fn try_from(d: &MarkDistribution) -> Result<Self> {
        Ok(match d {
            MarkDistribution::Bernoulli => DistributionSpec::Bernoulli,
            MarkDistribution::Lattice { spacing, atoms } => {
                DistributionSpec::Lattice { b: *spacing, atoms: atoms.clone() }
            }
            MarkDistribution::Discrete { atoms } => DistributionSpec::Discrete { atoms: atoms.clone() },
            MarkDistribution::Gaussian { sigma } => DistributionSpec::Gaussian { sigma: *sigma },
            MarkDistribution::UnitVector { dim } => DistributionSpec::UnitVector { d: *dim },
            MarkDistribution::Custom(c) => {
                return Err(Error::InvalidArgument(format!(
                    "custom distribution '{}' cannot be serialized",
                    c.name
                )))
            }
        })
    }
}

impl Serialize for MarkDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionSpec::try_from(self).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = DistributionSpec::deserialize(d)?;
        MarkDistribution::try_from(spec).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for MarkDistribution {
    type Err = Error;

    /// Accepts a JSON record or the short forms `bernoulli`, `gaussian:σ`,
    /// `unit-vector:d` and `lattice:b:n=p,n=p,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let mut parts = s.splitn(3, ':');
        let kind = parts.next().unwrap_or_default().to_ascii_lowercase();
        let num = |v: Option<&str>| -> Result<f64> {
            v.ok_or_else(|| Error::Parse(format!("missing parameter in '{s}'")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{e} in '{s}'")))
        };
        match kind.as_str() {
            "bernoulli" => Ok(Self::Bernoulli),
            "gaussian" | "normal" => Self::gaussian(num(parts.next())?),
            "unit-vector" | "unit_vector" | "vector" => {
                let d = num(parts.next())?;
                if d.fract() != 0.0 || d < 1.0 {
                    return Err(Error::Parse(format!("bad dimension in '{s}'")));
                }
                Self::unit_vector(d as u32)
            }
            "lattice" => {
                let b = num(parts.next())?;
                let atoms = parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("missing atoms in '{s}'")))?
                    .split(',')
                    .map(|a| {
                        let (n, p) =
                            a.split_once('=').ok_or_else(|| Error::Parse(format!("bad atom '{a}'")))?;
                        Ok((
                            n.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string()))?,
                            p.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::lattice(b, atoms)
            }
            _ => Err(Error::Parse(format!("unknown distribution '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&MarkDistribution::Bernoulli, PI).unwrap(), -1.0);
        let g = MarkDistribution::gaussian(1.0).unwrap();
        assert!((phi(&g, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!((phi_unit_vector(1, 2.0).unwrap() - 2f64.cos()).abs() < 1e-14);
        assert!((phi_unit_vector(1, PI).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(phi_unit_vector(2, 0.0).unwrap(), 1.0);
        for d in [MarkDistribution::Bernoulli, g, MarkDistribution::unit_vector(4).unwrap()] {
            assert_eq!(phi(&d, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn unit_vector_series_and_quadrature_join_smoothly() {
        for dim in 2..=5 {
            let a = hyp0f1_neg(dim as f64 / 2.0, 6.0 * 6.0 / 4.0).unwrap();
            let b = angular_average(dim, |t| (6.0 * t).cos());
            assert!((a - b).abs() < 1e-12, "d = {dim}: {a} vs {b}");
        }
    }

    #[test]
    fn unit_vector_three_is_sinc() {
        for &b in &[0.5, 2.0, PI, 7.5, 19.0] {
            let want = b.sin() / b;
            assert!((phi_unit_vector(3, b).unwrap() - want).abs() < 1e-13, "β = {b}");
        }
    }

    #[test]
    fn validation_rejects_bad_distributions() {
        assert!(MarkDistribution::lattice(1.0, vec![(1, 0.7), (-1, 0.3)]).is_err());
        assert!(MarkDistribution::lattice(1.0, vec![(1, 0.5), (-1, 0.6)]).is_err());
        assert!(MarkDistribution::lattice(0.0, vec![(1, 0.5), (-1, 0.5)]).is_err());
        assert!(MarkDistribution::gaussian(-1.0).is_err());
        assert!(MarkDistribution::unit_vector(0).is_err());
        let bad = MarkDistribution::Lattice { spacing: 1.0, atoms: vec![(2, 1.0)] };
        assert!(matches!(phi(&bad, 1.0), Err(Error::InvalidDistribution(_))));
        let odd = MarkDistribution::custom("odd", |b: f64| (b.cos() + 0.1 * b.sin()) / 1.0);
        assert!(odd.validate().is_err());
    }

    #[test]
    fn centered_constructor() {
        let d = MarkDistribution::centered(&[(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert!((phi(&d, 1.3).unwrap() - 1.3f64.cos()).abs() < 1e-15);
        assert!(MarkDistribution::centered(&[(0.0, 0.5), (1.0, 0.25), (3.0, 0.25)]).is_err());
    }

    #[test]
    fn layering_dimension_examples() {
        let b = MarkDistribution::Bernoulli;
        assert!((delta_layering(1.0, &b, PI).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(delta_layering(1.0, &b, 0.0).unwrap(), 0.0);
        let g = MarkDistribution::gaussian(1.0).unwrap();
        assert!((delta_layering(1.0, &g, 50.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(delta_layering(0.0, &b, 1.0).is_err());
    }

    #[test]
    fn winding_dimension_bernoulli_closed_form() {
        let b = MarkDistribution::Bernoulli;
        assert!((delta_winding(1.0, &b, PI, 1e-12).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(delta_winding(1.0, &b, 0.0, 1e-10).unwrap(), 0.0);
        // closed form λβ(2π−β)/(8π²) on [0, 2π]
        for &beta in &[0.3, 1.0, 2.5, 4.0, 6.0] {
            let want = beta * (2.0 * PI - beta) / (8.0 * PI * PI);
            assert!((delta_winding(1.0, &b, beta, 1e-12).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn winding_dimension_gaussian_partial_sum() {
        // direct partial sum until e^{−M²/2} < 1e−16
        let g = MarkDistribution::gaussian(1.0).unwrap();
        let mut direct = 0.0;
        for m in 1..=1_000_000u64 {
            let mf = m as f64;
            direct += (1.0 - (-0.5 * mf * mf).exp()) / (mf * mf);
        }
        // tail Σ_{m>10⁶} 1/m² ≈ 1/10⁶
        direct += 1.0 / 1_000_000.5;
        let want = direct / (2.0 * PI * PI);
        let got = delta_winding(1.0, &g, 1.0, 1e-12).unwrap();
        assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        assert!((got - 0.050_828_487_986_970_991).abs() < 1e-12);
    }

    #[test]
    fn winding_without_envelope_reports_accuracy() {
        let c = MarkDistribution::custom("cos-like", |b: f64| b.cos());
        let err = delta_winding(1.0, &c, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::AccuracyNotReached { .. }));
    }

    #[test]
    fn lattice_period_and_charge() {
        assert_eq!(MarkDistribution::Bernoulli.lattice_period(), Some(2.0 * PI));
        let l = MarkDistribution::lattice(2.0, vec![(1, 0.5), (-1, 0.5)]).unwrap();
        assert!((l.lattice_period().unwrap() - PI).abs() < 1e-15);
        let g = MarkDistribution::gaussian(1.0).unwrap();
        assert_eq!(g.lattice_period(), None);

        let cc = charge_conservation(&MarkDistribution::Bernoulli, &[PI, PI]);
        assert_eq!(cc, ChargeConservation { satisfied: true, k: Some(1) });
        assert!(charge_conservation(&g, &[0.3, -0.3]).satisfied);
        assert!(!charge_conservation(&g, &[0.3, 0.3]).satisfied);
    }

    #[test]
    fn serialization_round_trip() {
        let text = r#"{"kind": "lattice", "b": 1.0, "atoms": [[1, 0.5], [-1, 0.5]]}"#;
        let d: MarkDistribution = serde_json::from_str(text).unwrap();
        assert!((phi(&d, 0.7).unwrap() - 0.7f64.cos()).abs() < 1e-15);
        let back = serde_json::to_string(&d).unwrap();
        let again: MarkDistribution = serde_json::from_str(&back).unwrap();
        assert_eq!(DistributionSpec::try_from(&again).unwrap(), DistributionSpec::try_from(&d).unwrap());
        let short: MarkDistribution = "lattice:0.5:1=0.25,-1=0.25,0=0.5".parse().unwrap();
        assert_eq!(short.lattice_period(), Some(4.0 * PI));
        assert!("gaussian:-1".parse::<MarkDistribution>().is_err());
    }
}
