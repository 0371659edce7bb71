//! The two fixed-parameter hypergeometric series that build `A(x)`, their
//! exact rational coefficients, and integral representations valid off the
//! cut `[1, ∞)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::gamma::beta_positive;
use super::quad::tanh_sinh;
use crate::{Error, Result};

/// Relative size of the last retained term.
pub const SERIES_REL_TOL: f64 = 1e-16;
/// Hard cap on the number of series terms.
pub const SERIES_MAX_TERMS: usize = 100_000;

/// A series value together with the number of terms summed.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: usize,
}

fn sum_series<R>(func: &'static str, x: Complex64, ratio: R) -> Result<SeriesValue>
where
    R: Fn(f64) -> f64,
{
    if !(x.norm() < 1.0) {
        return Err(Error::Domain {
            func,
            detail: format!("|x| = {} must be < 1; reduce the domain first", x.norm()),
        });
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..SERIES_MAX_TERMS {
        term *= x * ratio(n as f64);
        sum += term;
        if term.norm() < SERIES_REL_TOL * sum.norm() {
            return Ok(SeriesValue { value: sum, terms: n + 2 });
        }
    }
    Err(Error::NotConverged { func, terms: SERIES_MAX_TERMS, last_term: term.norm() })
}

/// `₂F₁(2/3, 1; 4/3; x)` by its power series, `|x| < 1`.
pub fn hyp2f1_23_1_43(x: Complex64) -> Result<Complex64> {
    hyp2f1_23_1_43_series(x).map(|s| s.value)
}

pub fn hyp2f1_23_1_43_series(x: Complex64) -> Result<SeriesValue> {
    sum_series("hyp2f1_23_1_43", x, |n| (n + 2.0 / 3.0) / (n + 4.0 / 3.0))
}

/// `₃F₂(1, 1, 4/3; 2, 5/3; x)` by its power series, `|x| < 1`.
pub fn hyp3f2_11_43_2_53(x: Complex64) -> Result<Complex64> {
    hyp3f2_11_43_2_53_series(x).map(|s| s.value)
}

pub fn hyp3f2_11_43_2_53_series(x: Complex64) -> Result<SeriesValue> {
    sum_series("hyp3f2_11_43_2_53", x, |n| (n + 1.0) * (n + 4.0 / 3.0) / ((n + 2.0) * (n + 5.0 / 3.0)))
}

fn is_on_cut(x: Complex64) -> bool {
    x.im == 0.0 && x.re >= 1.0
}

/// `₂F₁(2/3, 1; 4/3; x) = ∫₀¹ (1 − x(1 − s³))^{−2/3} ds`, any `x ∉ [1, ∞)`.
pub fn hyp2f1_23_1_43_integral(x: Complex64) -> Result<Complex64> {
    if is_on_cut(x) {
        return Err(Error::Domain {
            func: "hyp2f1_23_1_43_integral",
            detail: format!("x = {x} lies on the branch cut"),
        });
    }
    let q = tanh_sinh(
        |s, _| {
            let base = Complex64::new(1.0, 0.0) - x * (1.0 - s * s * s);
            base.powf(-2.0 / 3.0)
        },
        1e-15,
    );
    Ok(q.value)
}

/// `x·₃F₂(1, 1, 4/3; 2, 5/3; x) = −∫₀¹ t^{−2/3}(1−t)^{−2/3} log(1 − x t) dt / B(4/3, 1/3)`,
/// any `x ∉ [1, ∞)`.
pub fn x_hyp3f2_11_43_2_53_integral(x: Complex64) -> Result<Complex64> {
    if is_on_cut(x) {
        return Err(Error::Domain {
            func: "x_hyp3f2_11_43_2_53_integral",
            detail: format!("x = {x} lies on the branch cut"),
        });
    }
    let norm = beta_positive(4.0 / 3.0, 1.0 / 3.0)?;
    let q = tanh_sinh(
        |t, tc| {
            let w = t.powf(-2.0 / 3.0) * tc.powf(-2.0 / 3.0);
            let log = (Complex64::new(1.0, 0.0) - x * t).ln();
            -w * log
        },
        1e-15,
    );
    Ok(q.value / norm)
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact coefficients `c_n`, `n < len`, of `₂F₁(2/3, 1; 4/3; x) = Σ c_n xⁿ`.
pub fn hyp2f1_coefficients(len: usize) -> Vec<f64> {
    let mut c = ratio(1, 1);
    let mut out = Vec::with_capacity(len);
    for k in 0..len as i64 {
        out.push(to_f64(&c));
        c *= ratio(3 * k + 2, 3 * k + 4);
    }
    out
}

/// Exact coefficients `d_n`, `n < len`, of `x·₃F₂(1, 1, 4/3; 2, 5/3; x) = Σ d_n xⁿ`
/// (so `d_0 = 0`, `d_1 = 1`).
pub fn x_hyp3f2_coefficients(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(0.0);
    let mut poch = ratio(1, 1); // (4/3)_n / (5/3)_n
    for n in 0..(len as i64 - 1) {
        out.push(to_f64(&(poch.clone() / BigInt::from(n + 1))));
        poch *= ratio(3 * n + 4, 3 * n + 5);
    }
    out
}

/// Exact coefficients of `(1 − x)^{num/den}`.
pub fn binomial_root_coefficients(num: i64, den: i64, len: usize) -> Vec<f64> {
    let a = ratio(num, den);
    let mut c = ratio(1, 1);
    let mut out = Vec::with_capacity(len);
    for k in 0..len as i64 {
        out.push(to_f64(&c));
        // c_{k+1} = c_k (k − a) / (k + 1)
        c = c * (ratio(k, 1) - a.clone()) / BigInt::from(k + 1);
    }
    out
}
