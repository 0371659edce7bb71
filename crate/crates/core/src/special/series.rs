//! Truncated double power series `Σ c[p][q] u^p ū^q` with real coefficients.

use num_complex::Complex64;

/// Real coefficients of `u^p ū^q` for `0 ≤ p, q ≤ degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSeries {
    degree: usize,
    coeffs: Vec<f64>,
}

impl DoubleSeries {
    pub fn zeros(degree: usize) -> Self {
        Self { degree, coeffs: vec![0.0; (degree + 1) * (degree + 1)] }
    }

    pub fn one(degree: usize) -> Self {
        let mut s = Self::zeros(degree);
        s.set(0, 0, 1.0);
        s
    }

    /// Lifts a series in `x = u^root` to the `u` side (holomorphic factor).
    pub fn from_holomorphic(x_coeffs: &[f64], root: usize, degree: usize) -> Self {
        let mut s = Self::zeros(degree);
        for (n, &c) in x_coeffs.iter().enumerate() {
            let p = n * root;
            if p > degree {
                break;
            }
            s.set(p, 0, c);
        }
        s
    }

    /// Lifts a series in `x̄ = ū^root` to the `ū` side.
    pub fn from_antiholomorphic(x_coeffs: &[f64], root: usize, degree: usize) -> Self {
        let mut s = Self::zeros(degree);
        for (n, &c) in x_coeffs.iter().enumerate() {
            let q = n * root;
            if q > degree {
                break;
            }
            s.set(0, q, c);
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    fn idx(&self, p: usize, q: usize) -> usize {
        p * (self.degree + 1) + q
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        if p > self.degree || q > self.degree {
            0.0
        } else {
            self.coeffs[self.idx(p, q)]
        }
    }

    pub fn set(&mut self, p: usize, q: usize, value: f64) {
        let i = self.idx(p, q);
        self.coeffs[i] = value;
    }

    /// Iterates over `(p, q, coefficient)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let d = self.degree + 1;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i / d, i % d, c))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    /// Multiplies by `(u ū)^shift`, dropping terms beyond the degree.
    pub fn shifted_diagonal(&self, shift: usize) -> Self {
        let mut out = Self::zeros(self.degree);
        for p in 0..=self.degree {
            for q in 0..=self.degree {
                if p + shift <= self.degree && q + shift <= self.degree {
                    out.set(p + shift, q + shift, self.get(p, q));
                }
            }
        }
        out
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        let d = self.degree;
        let mut out = Self::zeros(d);
        for p1 in 0..=d {
            for q1 in 0..=d {
                let a = self.get(p1, q1);
                if a == 0.0 {
                    continue;
                }
                for p2 in 0..=(d - p1) {
                    for q2 in 0..=(d - q1) {
                        let b = other.get(p2, q2);
                        if b != 0.0 {
                            let i = out.idx(p1 + p2, q1 + q2);
                            out.coeffs[i] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Truncated `exp(self)`.
    pub fn exp(&self) -> Self {
        let c0 = self.get(0, 0);
        let mut nil = self.clone();
        nil.set(0, 0, 0.0);
        // every power of `nil` raises p + q by at least one
        let mut out = Self::one(self.degree);
        let mut power = Self::one(self.degree);
        for k in 1..=(2 * self.degree) {
            power = power.mul(&nil).scaled(1.0 / k as f64);
            if power.coeffs.iter().all(|&c| c == 0.0) {
                break;
            }
            out = out.add(&power);
        }
        out.scaled(c0.exp())
    }

    /// `Σ c u^p ū^q` with `ū = conj(u)`.
    pub fn evaluate(&self, u: Complex64) -> Complex64 {
        let ub = u.conj();
        let mut total = Complex64::new(0.0, 0.0);
        let mut up = Complex64::new(1.0, 0.0);
        for p in 0..=self.degree {
            let mut row = Complex64::new(0.0, 0.0);
            let mut uq = Complex64::new(1.0, 0.0);
            for q in 0..=self.degree {
                row += self.get(p, q) * uq;
                uq *= ub;
            }
            total += up * row;
            up *= u;
        }
        total
    }
}

/// Truncated Cauchy product of two single-variable coefficient lists.
pub fn convolve(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `(1 − x)^a` for real `a`.
pub fn binomial_series(a: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut c = 1.0;
    for k in 0..len {
        out.push(c);
        c *= (k as f64 - a) / (k as f64 + 1.0);
    }
    out
}

/// Coefficients of `exp(f(x))` for a single-variable series with `f(0) = 0`.
pub fn exp_series(f: &[f64], len: usize) -> Vec<f64> {
    // g' = f' g
    let mut g = vec![0.0; len];
    if len == 0 {
        return g;
    }
    g[0] = f.first().copied().unwrap_or(0.0).exp();
    for n in 1..len {
        let mut acc = 0.0;
        for k in 1..=n {
            let fk = f.get(k).copied().unwrap_or(0.0);
            acc += k as f64 * fk * g[n - k];
        }
        g[n] = acc / n as f64;
    }
    g
}
