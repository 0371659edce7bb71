//! Closed-form correlators of layering vertex operators.
//!
//! Plane correlators are canonically normalized: the two-point function is
//! `|z₁₂|^{−4Δ}` with unit coefficient. Relative to the bare exponentials
//! `e^{iβN(z)}` with diameter cutoff `δ` this corresponds to
//! `O_β = (2δ e^{−π/√3 − 5α̂})^{−2Δ} e^{iβN}` in the plane and
//! `Õ_β = e^{π/√3} O_β` in the upper half-plane; those constants never enter
//! the formulas below.
//!
//! The general `n`-point skeleton takes loop weights from a
//! [`WeightProvider`], so it works for any domain and cutoffs the caller can
//! supply weights for (for example Monte Carlo estimates).

use serde::{Deserialize, Serialize};

use crate::charfn::{charge_conservation, delta_layering, phi, MarkDistribution};
use crate::special::{
    a_function, hyp3f2_11_43_2_53, x_hyp3f2_11_43_2_53_integral, CrossRatio, SERIES_RADIUS,
};
use crate::{Complex64, Error, Result};

/// Minimum separation between insertion points.
pub const MIN_SEPARATION: f64 = 1e-12;
/// Largest number of points accepted by the subset skeletons.
pub const MAX_SKELETON_POINTS: usize = 20;

/// An insertion `O_β(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargedPoint {
    pub z: Complex64,
    pub beta: f64,
}

impl ChargedPoint {
    pub fn new(re: f64, im: f64, beta: f64) -> Self {
        Self { z: Complex64::new(re, im), beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Plane,
    UpperHalfPlane,
}

#[derive(Debug, Clone)]
pub struct CorrelatorConfig {
    pub lambda: f64,
    pub dist: MarkDistribution,
    pub points: Vec<ChargedPoint>,
    pub domain: Domain,
}

impl CorrelatorConfig {
    pub fn new(
        lambda: f64,
        dist: MarkDistribution,
        points: Vec<ChargedPoint>,
        domain: Domain,
    ) -> Result<Self> {
        let cfg = Self { lambda, dist, points, domain };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn plane(lambda: f64, dist: MarkDistribution, points: Vec<ChargedPoint>) -> Result<Self> {
        Self::new(lambda, dist, points, Domain::Plane)
    }

    pub fn half_plane(lambda: f64, dist: MarkDistribution, points: Vec<ChargedPoint>) -> Result<Self> {
        Self::new(lambda, dist, points, Domain::UpperHalfPlane)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("intensity λ must be > 0, got {}", self.lambda)));
        }
        self.dist.validate()?;
        for (i, p) in self.points.iter().enumerate() {
            if !(p.z.re.is_finite() && p.z.im.is_finite() && p.beta.is_finite()) {
                return Err(Error::InvalidArgument(format!("point {i} is not finite")));
            }
            if self.domain == Domain::UpperHalfPlane && p.z.im <= 0.0 {
                return Err(Error::Domain {
                    func: "CorrelatorConfig",
                    detail: format!("point {i} has Im z = {} ≤ 0", p.z.im),
                });
            }
            for (j, q) in self.points.iter().enumerate().take(i) {
                if (p.z - q.z).norm() <= MIN_SEPARATION {
                    return Err(Error::Singularity {
                        func: "CorrelatorConfig",
                        detail: format!("points {j} and {i} coincide"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.beta).collect()
    }

    /// `Δ(β)` at this config's intensity and distribution.
    pub fn delta(&self, beta: f64) -> Result<f64> {
        delta_layering(self.lambda, &self.dist, beta)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }

    fn expect_points(&self, n: usize, domain: Domain, func: &'static str) -> Result<()> {
        if self.points.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{func} needs {n} points, got {}",
                self.points.len()
            )));
        }
        if self.domain != domain {
            return Err(Error::InvalidArgument(format!(
                "{func} needs domain {domain:?}, config has {:?}",
                self.domain
            )));
        }
        self.validate()
    }
}

/// Machine-readable annotations on a correlator value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    VanishesByChargeConservation,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Complex64>,
    #[serde(rename = "a_of_x", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// `Δ(β_j)` per insertion.
    pub dims: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charge_k: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorValue {
    pub value: f64,
    pub flags: Vec<Flag>,
    pub diagnostics: Diagnostics,
}

impl CorrelatorValue {
    pub fn vanishes(&self) -> bool {
        self.flags.contains(&Flag::VanishesByChargeConservation)
    }
}

fn dims_of(cfg: &CorrelatorConfig) -> Result<Vec<f64>> {
    cfg.points.iter().map(|p| cfg.delta(p.beta)).collect()
}

// Shared prologue of the plane correlators: dimensions and the charge check.
fn plane_prologue(cfg: &CorrelatorConfig) -> Result<std::result::Result<Diagnostics, CorrelatorValue>> {
    let dims = dims_of(cfg)?;
    let cc = charge_conservation(&cfg.dist, &cfg.betas());
    let diagnostics = Diagnostics { dims, charge_k: cc.k, ..Default::default() };
    if cc.satisfied {
        Ok(Ok(diagnostics))
    } else {
        Ok(Err(CorrelatorValue { value: 0.0, flags: vec![Flag::VanishesByChargeConservation], diagnostics }))
    }
}

fn ln_dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm().ln()
}

/// `⟨O_{β₁}(z₁) O_{β₂}(z₂)⟩ = |z₁ − z₂|^{−4Δ₁}`.
pub fn two_point_plane(cfg: &CorrelatorConfig) -> Result<CorrelatorValue> {
    cfg.expect_points(2, Domain::Plane, "two_point_plane")?;
    let diagnostics = match plane_prologue(cfg)? {
        Ok(d) => d,
        Err(zero) => return Ok(zero),
    };
    let p = &cfg.points;
    let value = (-4.0 * diagnostics.dims[0] * ln_dist(p[0].z, p[1].z)).exp();
    Ok(CorrelatorValue { value, flags: vec![], diagnostics })
}

/// The plane three-point function; its structure constant is one.
pub fn three_point_plane(cfg: &CorrelatorConfig) -> Result<CorrelatorValue> {
    cfg.expect_points(3, Domain::Plane, "three_point_plane")?;
    let diagnostics = match plane_prologue(cfg)? {
        Ok(d) => d,
        Err(zero) => return Ok(zero),
    };
    let p = &cfg.points;
    let d = &diagnostics.dims;
    let log = -2.0 * (d[0] + d[1] - d[2]) * ln_dist(p[0].z, p[1].z)
        - 2.0 * (d[0] + d[2] - d[1]) * ln_dist(p[0].z, p[2].z)
        - 2.0 * (d[1] + d[2] - d[0]) * ln_dist(p[1].z, p[2].z);
    Ok(CorrelatorValue { value: log.exp(), flags: vec![], diagnostics })
}

/// The plane four-point function.
///
/// With `K = ΣΔ_i − Δ₁₂ − Δ₁₃ − Δ₁₄` and `Δ_ij = Δ(β_i + β_j)`:
///
/// ```text
/// exp[−2K A(x)] |z₁₃z₂₄/(z₁₂z₃₄)|^{−2Δ₁₂} |z₁₃z₂₄/(z₁₄z₂₃)|^{−2Δ₁₄}
///   × |z₁₂z₁₄/z₂₄|^{−2Δ₁} |z₁₂z₂₃/z₁₃|^{−2Δ₂} |z₂₃z₃₄/z₂₄|^{−2Δ₃} |z₁₄z₃₄/z₁₃|^{−2Δ₄}
/// ```
pub fn four_point_plane(cfg: &CorrelatorConfig) -> Result<CorrelatorValue> {
    cfg.expect_points(4, Domain::Plane, "four_point_plane")?;
    let mut diagnostics = match plane_prologue(cfg)? {
        Ok(d) => d,
        Err(zero) => return Ok(zero),
    };
    let p = &cfg.points;
    let z = [p[0].z, p[1].z, p[2].z, p[3].z];
    let l = |i: usize, j: usize| ln_dist(z[i - 1], z[j - 1]);
    let d = &diagnostics.dims;
    let d12 = cfg.delta(p[0].beta + p[1].beta)?;
    let d13 = cfg.delta(p[0].beta + p[2].beta)?;
    let d14 = cfg.delta(p[0].beta + p[3].beta)?;
    let k = d.iter().sum::<f64>() - d12 - d13 - d14;

    let x = CrossRatio::from_points(z)?;
    // A(x) only matters when its coefficient is nonzero
    let a = if k != 0.0 { a_function(x)? } else { 0.0 };

    let log = -2.0 * k * a
        - 2.0 * d12 * (l(1, 3) + l(2, 4) - l(1, 2) - l(3, 4))
        - 2.0 * d14 * (l(1, 3) + l(2, 4) - l(1, 4) - l(2, 3))
        - 2.0 * d[0] * (l(1, 2) + l(1, 4) - l(2, 4))
        - 2.0 * d[1] * (l(1, 2) + l(2, 3) - l(1, 3))
        - 2.0 * d[2] * (l(2, 3) + l(3, 4) - l(2, 4))
        - 2.0 * d[3] * (l(1, 4) + l(3, 4) - l(1, 3));
    diagnostics.x = Some(x.value());
    diagnostics.a = (k != 0.0).then_some(a);
    Ok(CorrelatorValue { value: log.exp(), flags: vec![], diagnostics })
}

/// `⟨Õ_β(z)⟩_H = (2 Im z)^{−2Δ}`.
pub fn one_point_halfplane(cfg: &CorrelatorConfig) -> Result<CorrelatorValue> {
    cfg.expect_points(1, Domain::UpperHalfPlane, "one_point_halfplane")?;
    let dims = dims_of(cfg)?;
    let value = (-2.0 * dims[0] * (2.0 * cfg.points[0].z.im).ln()).exp();
    Ok(CorrelatorValue { value, flags: vec![], diagnostics: Diagnostics { dims, ..Default::default() } })
}

/// `(1 − σ) ₃F₂(1, 1, 4/3; 2, 5/3; 1 − σ)` for `σ ∈ (0, 1]`.
fn halfplane_kernel(sigma: f64) -> Result<f64> {
    let y = 1.0 - sigma;
    assert!((0.0..1.0).contains(&y), "1 − σ = {y} outside [0, 1)");
    let y = Complex64::new(y, 0.0);
    let v =
        if y.norm() <= SERIES_RADIUS { y * hyp3f2_11_43_2_53(y)? } else { x_hyp3f2_11_43_2_53_integral(y)? };
    Ok(v.re)
}

/// The upper half-plane two-point function, with
/// `σ = |z₁ − z₂|² / |z₁ − z̄₂|²`.
pub fn two_point_halfplane(cfg: &CorrelatorConfig) -> Result<CorrelatorValue> {
    cfg.expect_points(2, Domain::UpperHalfPlane, "two_point_halfplane")?;
    let dims = dims_of(cfg)?;
    let (z1, z2) = (cfg.points[0].z, cfg.points[1].z);
    let d12 = cfg.delta(cfg.points[0].beta + cfg.points[1].beta)?;
    let e = dims[0] + dims[1] - d12;
    let near = (z1 - z2).norm_sqr();
    let far = (z1 - z2.conj()).norm_sqr();
    let sigma = near / far;
    if !(sigma > 0.0) {
        return Err(Error::Singularity { func: "two_point_halfplane", detail: "σ = 0".into() });
    }
    let kernel = if e != 0.0 { halfplane_kernel(sigma)? } else { 0.0 };
    let log = -e * near.ln() + e * far.ln()
        - 2.0 * dims[0] * (2.0 * z1.im).ln()
        - 2.0 * dims[1] * (2.0 * z2.im).ln()
        - e * kernel;
    Ok(CorrelatorValue {
        value: log.exp(),
        flags: vec![],
        diagnostics: Diagnostics { sigma: Some(sigma), dims, ..Default::default() },
    })
}

/// Dispatches on domain and number of points.
pub fn evaluate(cfg: &CorrelatorConfig) -> Result<CorrelatorValue> {
    match (cfg.domain, cfg.points.len()) {
        (Domain::Plane, 2) => two_point_plane(cfg),
        (Domain::Plane, 3) => three_point_plane(cfg),
        (Domain::Plane, 4) => four_point_plane(cfg),
        (Domain::UpperHalfPlane, 1) => one_point_halfplane(cfg),
        (Domain::UpperHalfPlane, 2) => two_point_halfplane(cfg),
        (domain, n) => Err(Error::NotImplemented(format!("no closed form for {n} points in {domain:?}"))),
    }
}

/// Loop weights `α(S|Sᶜ)` for the layering skeleton. Subsets are bitmasks
/// over insertion indices.
pub trait WeightProvider {
    fn weight(&self, subset: u32, n: usize) -> f64;
}

impl<F: Fn(u32, usize) -> f64> WeightProvider for F {
    fn weight(&self, subset: u32, n: usize) -> f64 {
        self(subset, n)
    }
}

/// One class of loops in the winding skeleton: those winding `windings[i]`
/// times around the `i`-th point of the subset (in increasing index order).
#[derive(Debug, Clone, PartialEq)]
pub struct WindingClass {
    pub windings: Vec<i64>,
    pub weight: f64,
}

/// Weights `α(S|Sᶜ; K)`; only classes with nonzero weight need be listed.
pub trait WindingWeightProvider {
    fn classes(&self, subset: u32, n: usize) -> Vec<WindingClass>;
}

impl<F: Fn(u32, usize) -> Vec<WindingClass>> WindingWeightProvider for F {
    fn classes(&self, subset: u32, n: usize) -> Vec<WindingClass> {
        self(subset, n)
    }
}

fn check_skeleton(cfg: &CorrelatorConfig) -> Result<usize> {
    cfg.validate()?;
    let n = cfg.points.len();
    if n > MAX_SKELETON_POINTS {
        return Err(Error::InvalidArgument(format!(
            "skeleton supports at most {MAX_SKELETON_POINTS} points, got {n}"
        )));
    }
    Ok(n)
}

fn check_weight(w: f64, subset: u32) -> Result<()> {
    if w.is_finite() && w >= 0.0 {
        Ok(())
    } else {
        Err(Error::Contract(format!("weight provider returned {w} for subset {subset:#b}")))
    }
}

/// `Π_{S≠∅} exp[−λ α(S|Sᶜ)(1 − φ(Σ_{i∈S} β_i))]`.
pub fn n_point_skeleton<W: WeightProvider + ?Sized>(cfg: &CorrelatorConfig, weights: &W) -> Result<f64> {
    let n = check_skeleton(cfg)?;
    let mut log = 0.0;
    for subset in 1u32..(1u32 << n) {
        let w = weights.weight(subset, n);
        check_weight(w, subset)?;
        if w == 0.0 {
            continue;
        }
        let charge: f64 = (0..n).filter(|i| subset >> i & 1 == 1).map(|i| cfg.points[i].beta).sum();
        log -= cfg.lambda * w * (1.0 - phi(&cfg.dist, charge)?);
    }
    Ok(log.exp())
}

/// The winding analogue: product over subsets and winding classes of
/// `exp[−λ α(S|Sᶜ;K)(1 − φ(Σ k_i β_i))]`.
pub fn winding_n_point_skeleton<W: WindingWeightProvider + ?Sized>(
    cfg: &CorrelatorConfig,
    weights: &W,
) -> Result<f64> {
    let n = check_skeleton(cfg)?;
    let mut log = 0.0;
    for subset in 1u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|i| subset >> i & 1 == 1).collect();
        for class in weights.classes(subset, n) {
            check_weight(class.weight, subset)?;
            if class.windings.len() != members.len() {
                return Err(Error::Contract(format!(
                    "winding class for subset {subset:#b} has {} entries, expected {}",
                    class.windings.len(),
                    members.len()
                )));
            }
            let charge: f64 =
                members.iter().zip(&class.windings).map(|(&i, &k)| k as f64 * cfg.points[i].beta).sum();
            log -= cfg.lambda * class.weight * (1.0 - phi(&cfg.dist, charge)?);
        }
    }
    Ok(log.exp())
}

/// `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).norm() > 1e-12 {
            return Err(Error::InvalidArgument(format!("Möbius determinant ad − bc = {det}, expected 1")));
        }
        Ok(Self { a, b, c, d })
    }

    /// Rescales arbitrary nondegenerate coefficients to unit determinant.
    pub fn normalized(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::InvalidArgument("degenerate Möbius map".into()));
        }
        let s = det.sqrt();
        Self::new(a / s, b / s, c / s, d / s)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    fn denominator(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() <= 1e-12 * (1.0 + (self.c * z).norm()) {
            return Err(Error::Singularity { func: "Mobius", detail: format!("{z} is mapped to infinity") });
        }
        Ok(den)
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.a * z + self.b) / self.denominator(z)?)
    }

    /// `f′(z) = 1/(cz + d)²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = self.denominator(z)?;
        Ok(1.0 / (den * den))
    }
}

/// Images `f(z_j)` together with `|f′(z_j)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusImage {
    pub points: Vec<Complex64>,
    pub scale: Vec<f64>,
}

pub fn mobius_image(points: &[Complex64], map: &Mobius) -> Result<MobiusImage> {
    let mut image =
        MobiusImage { points: Vec::with_capacity(points.len()), scale: Vec::with_capacity(points.len()) };
    for &z in points {
        image.points.push(map.apply(z)?);
        image.scale.push(map.derivative(z)?.norm());
    }
    Ok(image)
}

/// The config with every insertion moved by `map`, plus the covariance
/// factor `Π|f′(z_j)|^{−2Δ_j}` relating the two correlators.
pub fn transformed_config(cfg: &CorrelatorConfig, map: &Mobius) -> Result<(CorrelatorConfig, f64)> {
    let zs: Vec<Complex64> = cfg.points.iter().map(|p| p.z).collect();
    let image = mobius_image(&zs, map)?;
    let mut log = 0.0;
    let mut points = Vec::with_capacity(zs.len());
    for ((p, &w), &s) in cfg.points.iter().zip(&image.points).zip(&image.scale) {
        log -= 2.0 * cfg.delta(p.beta)? * s.ln();
        points.push(ChargedPoint { z: w, beta: p.beta });
    }
    let moved = CorrelatorConfig::new(cfg.lambda, cfg.dist.clone(), points, cfg.domain)?;
    Ok((moved, log.exp()))
}

/// `γ = √(λ E[X²]/20) β`.
pub fn gamma_of(lambda: f64, dist: &MarkDistribution, beta: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("intensity λ must be > 0, got {lambda}")));
    }
    Ok((lambda * dist.second_moment()? / 20.0).sqrt() * beta)
}

/// Free-field vertex correlator `Π_{i<j} |z_ij|^{4γ_iγ_j}` with `Σγ = 0`.
pub fn free_field_limit(gammas: &[f64], points: &[Complex64]) -> Result<f64> {
    if gammas.len() != points.len() {
        return Err(Error::InvalidArgument(format!("{} charges for {} points", gammas.len(), points.len())));
    }
    let total: f64 = gammas.iter().sum();
    let scale: f64 = gammas.iter().map(|g| g.abs()).sum::<f64>().max(1.0);
    if total.abs() > 1e-9 * scale {
        return Err(Error::InvalidArgument(format!("free-field charges must sum to zero, got {total}")));
    }
    let mut log = 0.0;
    for i in 0..points.len() {
        for j in 0..i {
            let r = (points[i] - points[j]).norm();
            if r <= MIN_SEPARATION {
                return Err(Error::Singularity {
                    func: "free_field_limit",
                    detail: format!("points {j} and {i} coincide"),
                });
            }
            log += 4.0 * gammas[i] * gammas[j] * r.ln();
        }
    }
    Ok(log.exp())
}

/// Both sides of `⟨…⟩_λ = ⟨…⟩_{1/2}^{2λ}`, each from the closed forms.
pub fn lambda_power_property(cfg: &CorrelatorConfig) -> Result<(f64, f64)> {
    let direct = evaluate(cfg)?.value;
    let half = evaluate(&cfg.with_lambda(0.5))?.value;
    Ok((direct, half.powf(2.0 * cfg.lambda)))
}
