//! The crossing-symmetric function `A(x)` entering the plane four-point
//! function, evaluated through the S₃ crossing orbit of the cross ratio.
//!
//! The two generating identities `A(x) = A(1−x)` and `A(1/x) = A(x) + log|x|`
//! give, for every crossing map `g`, `A(g(x)) = A(x) + L_g(x)` with
//!
//! | g(x)        | L_g(x)     |
//! |-------------|------------|
//! | x           | 0          |
//! | 1 − x       | 0          |
//! | 1/x         | log\|x\|     |
//! | (x − 1)/x   | log\|x\|     |
//! | 1/(1 − x)   | log\|1 − x\| |
//! | x/(x − 1)   | log\|1 − x\| |
//!
//! `a_function(y)` picks the image `w = g(y)` of smallest modulus and returns
//! `A(w) − L_g(y)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hypergeometric::{
    binomial_root_coefficients, hyp2f1_23_1_43, hyp2f1_23_1_43_integral, hyp2f1_coefficients,
    hyp3f2_11_43_2_53, x_hyp3f2_11_43_2_53_integral, x_hyp3f2_coefficients,
};
use super::mu_constant;
use super::series::{convolve, DoubleSeries};
use crate::{Error, Result};

/// Largest modulus at which the power series are used.
pub const SERIES_RADIUS: f64 = 0.75;
/// Distance from 0 and 1 below which the cross ratio is treated as singular.
pub const SINGULAR_EPS: f64 = 1e-13;
/// Largest `order` accepted by [`a_series_coefficients`].
pub const MAX_SERIES_ORDER: usize = 12;

/// A cross ratio `x = z₁₂z₃₄/(z₁₃z₂₄)`, validated away from `{0, 1, ∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossRatio(Complex64);

impl CrossRatio {
    pub fn new(x: Complex64) -> Result<Self> {
        if !x.re.is_finite() || !x.im.is_finite() {
            return Err(Error::Singularity { func: "CrossRatio", detail: "x is not finite".into() });
        }
        if x.norm() < SINGULAR_EPS || (x - 1.0).norm() < SINGULAR_EPS {
            return Err(Error::Singularity {
                func: "CrossRatio",
                detail: format!("x = {x} coincides with 0 or 1"),
            });
        }
        Ok(Self(x))
    }

    /// Cross ratio of four points.
    pub fn from_points(z: [Complex64; 4]) -> Result<Self> {
        let d = |i: usize, j: usize| z[i] - z[j];
        let den = d(0, 2) * d(1, 3);
        if den.norm() == 0.0 {
            return Err(Error::Singularity {
                func: "CrossRatio",
                detail: "coincident insertion points".into(),
            });
        }
        Self::new(d(0, 1) * d(2, 3) / den)
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// The six elements of the crossing group acting on the cross ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingMap {
    Identity,
    OneMinus,
    Inverse,
    OneMinusInverse,
    InverseOneMinus,
    Ratio,
}

impl CrossingMap {
    pub const ALL: [CrossingMap; 6] = [
        CrossingMap::Identity,
        CrossingMap::OneMinus,
        CrossingMap::Inverse,
        CrossingMap::OneMinusInverse,
        CrossingMap::InverseOneMinus,
        CrossingMap::Ratio,
    ];

    pub fn apply(self, x: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            CrossingMap::Identity => x,
            CrossingMap::OneMinus => one - x,
            CrossingMap::Inverse => one / x,
            CrossingMap::OneMinusInverse => (x - one) / x,
            CrossingMap::InverseOneMinus => one / (one - x),
            CrossingMap::Ratio => x / (x - one),
        }
    }

    /// `L_g(x)` in `A(g(x)) = A(x) + L_g(x)`.
    pub fn log_correction(self, x: Complex64) -> f64 {
        match self {
            CrossingMap::Identity | CrossingMap::OneMinus => 0.0,
            CrossingMap::Inverse | CrossingMap::OneMinusInverse => x.norm().ln(),
            CrossingMap::InverseOneMinus | CrossingMap::Ratio => (1.0 - x).norm().ln(),
        }
    }
}

/// How `A` was evaluated at the chosen representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AMethod {
    Series,
    Quadrature,
}

/// `A(x)` with the representative and route actually used.
#[derive(Debug, Clone, Copy)]
pub struct AEvaluation {
    pub value: f64,
    pub map: CrossingMap,
    pub representative: Complex64,
    pub method: AMethod,
}

/// Evaluates the defining formula of `A` at `x` without any crossing
/// reduction: power series for `|x| ≤ 0.75`, integral representations
/// otherwise (`x` must then lie off the cut `[1, ∞)`).
pub fn a_direct(x: Complex64, mu: f64) -> Result<(f64, AMethod)> {
    let (x3f2, f21, method) = if x.norm() <= SERIES_RADIUS {
        (x * hyp3f2_11_43_2_53(x)?, hyp2f1_23_1_43(x)?, AMethod::Series)
    } else {
        (x_hyp3f2_11_43_2_53_integral(x)?, hyp2f1_23_1_43_integral(x)?, AMethod::Quadrature)
    };
    let modulus = (x * (1.0 - x)).norm().powf(2.0 / 3.0);
    Ok((0.5 * x3f2.re - 6.0 * mu * modulus * f21.norm_sqr(), method))
}

/// `A(x)` for any cross ratio.
pub fn a_function(x: CrossRatio) -> Result<f64> {
    a_function_with_mu(x, mu_constant()).map(|e| e.value)
}

/// `A(x)` with an explicit constant `μ` (used for sensitivity checks).
pub fn a_function_with_mu(x: CrossRatio, mu: f64) -> Result<AEvaluation> {
    let y = x.value();
    let (map, w) = CrossingMap::ALL
        .iter()
        .map(|&g| (g, g.apply(y)))
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("six maps");
    let (aw, method) = a_direct(w, mu)?;
    Ok(AEvaluation { value: aw - map.log_correction(y), map, representative: w, method })
}

/// Double series of `A` in `u = x^{1/r}`, `ū = x̄^{1/r}` (`r = root_order`),
/// exact through `xⁿ x̄ᵐ` for `n, m ≤ order`. The truncation degree in `u` is
/// `r·(order + 1) − 1`.
pub fn a_series_coefficients(order: usize, root_order: usize) -> Result<DoubleSeries> {
    a_series_coefficients_with_mu(order, root_order, mu_constant())
}

pub fn a_series_coefficients_with_mu(order: usize, root_order: usize, mu: f64) -> Result<DoubleSeries> {
    if order > MAX_SERIES_ORDER {
        return Err(Error::InvalidArgument(format!(
            "series order {order} exceeds the cap {MAX_SERIES_ORDER}"
        )));
    }
    if root_order == 0 || !root_order.is_multiple_of(3) {
        return Err(Error::InvalidArgument(format!(
            "root order {root_order} must be a positive multiple of 3"
        )));
    }
    let r = root_order;
    let degree = r * (order + 1) - 1;
    let len = order + 1;

    let d: Vec<f64> = x_hyp3f2_coefficients(len).iter().map(|c| 0.25 * c).collect();
    let hyp =
        DoubleSeries::from_holomorphic(&d, r, degree).add(&DoubleSeries::from_antiholomorphic(&d, r, degree));

    // g(x) = (1 − x)^{1/3} ₂F₁(2/3, 1; 4/3; x); |x(1−x)|^{2/3}|₂F₁|² = (uū)^{r/3} g(x) g(x̄)
    let g = convolve(&binomial_root_coefficients(1, 3, len), &hyp2f1_coefficients(len), len);
    let gg = DoubleSeries::from_holomorphic(&g, r, degree)
        .mul(&DoubleSeries::from_antiholomorphic(&g, r, degree))
        .shifted_diagonal(r / 3)
        .scaled(-6.0 * mu);
    Ok(hyp.add(&gg))
}
