//! Special functions for the plane correlators: the hypergeometric series
//! `₂F₁(2/3, 1; 4/3; x)` and `₃F₂(1, 1, 4/3; 2, 5/3; x)`, the gamma function,
//! the constant `μ`, and the crossing-symmetric `A(x)`.

mod crossing;
mod gamma;
mod hypergeometric;
pub mod quad;
pub mod series;

use std::f64::consts::PI;

pub use crossing::{
    a_direct, a_function, a_function_with_mu, a_series_coefficients, a_series_coefficients_with_mu,
    AEvaluation, AMethod, CrossRatio, CrossingMap, MAX_SERIES_ORDER, SERIES_RADIUS,
};
pub use gamma::{beta_positive, gamma_positive};
pub use hypergeometric::{
    binomial_root_coefficients, hyp2f1_23_1_43, hyp2f1_23_1_43_integral, hyp2f1_23_1_43_series,
    hyp2f1_coefficients, hyp3f2_11_43_2_53, hyp3f2_11_43_2_53_series, x_hyp3f2_11_43_2_53_integral,
    x_hyp3f2_coefficients, SeriesValue, SERIES_MAX_TERMS,
};

/// Frozen 50-digit evaluation of `μ` (mpmath), kept as a cross-check.
pub const MU_REFERENCE: f64 = 0.096_859_559_696_221_355_142_391_221_188_504_737;

/// `μ = 2^{1/3} π² / (3√3 Γ(1/6)² Γ(4/3)²)`.
pub fn mu_constant() -> f64 {
    let g16 = gamma_positive(1.0 / 6.0).expect("positive argument");
    let g43 = gamma_positive(4.0 / 3.0).expect("positive argument");
    2f64.powf(1.0 / 3.0) * PI * PI / (3.0 * 3f64.sqrt() * g16 * g16 * g43 * g43)
}
