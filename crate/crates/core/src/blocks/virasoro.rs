//! Holomorphic Virasoro blocks through level 3.
//!
//! For `⟨h₁|φ₂(1) φ₃(x)|h₄⟩` in the channel where `φ₃` and `φ₄` fuse into a
//! primary of weight `h`, the block is `x^{h−h₃−h₄} Σ_N b_N x^N` with
//!
//! ```text
//! b_N = Σ_{M,M′} v₂(M) (G⁽ᴺ⁾)⁻¹_{MM′} v₃(M′),
//! v_i(M) = Π_j (h + k_j h_i − h_o + Σ_{l>j} k_l),
//! ```
//!
//! where `M = (k₁ ≥ k₂ ≥ …)` labels `L_{−k₁}L_{−k₂}⋯|h⟩`, `h_o` is `h₁` for
//! `v₂` and `h₄` for `v₃`, and `G⁽ᴺ⁾` is the level-`N` Gram matrix.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Highest supported level.
pub const MAX_LEVEL: usize = 3;
/// Gram matrices with a larger condition number are treated as degenerate.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Partitions of `n` as nonincreasing part lists.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `⟨h| L_{w₀} L_{w₁} ⋯ |h⟩` in the Verma module of weight `h`, central charge `c`.
pub fn verma_expectation(word: &[i64], h: f64, c: f64) -> f64 {
    let n = word.len();
    if n == 0 {
        return 1.0;
    }
    if word[n - 1] > 0 || word[0] < 0 {
        return 0.0;
    }
    if word[n - 1] == 0 {
        return h * verma_expectation(&word[..n - 1], h, c);
    }
    if word[0] == 0 {
        return h * verma_expectation(&word[1..], h, c);
    }
    // word[0] > 0 and word[n−1] < 0: commute the first raising/lowering pair
    let i = (0..n - 1)
        .find(|&i| word[i] > 0 && word[i + 1] <= 0)
        .expect("a positive mode precedes a nonpositive one");
    let (a, b) = (word[i], word[i + 1]);
    let mut swapped = word.to_vec();
    swapped.swap(i, i + 1);
    let mut total = verma_expectation(&swapped, h, c);

    let mut merged = word[..i].to_vec();
    merged.push(a + b);
    merged.extend_from_slice(&word[i + 2..]);
    total += (a - b) as f64 * verma_expectation(&merged, h, c);

    if a + b == 0 {
        let mut dropped = word[..i].to_vec();
        dropped.extend_from_slice(&word[i + 2..]);
        total += c / 12.0 * ((a * a * a - a) as f64) * verma_expectation(&dropped, h, c);
    }
    total
}

/// Level-`n` Gram matrix in the partition basis.
pub fn gram_matrix(level: usize, h: f64, c: f64) -> DMatrix<f64> {
    let basis = partitions(level);
    let m = basis.len();
    DMatrix::from_fn(m, m, |i, j| {
        // ⟨h| L_{k_r}⋯L_{k_1} L_{−k′_1}⋯L_{−k′_s} |h⟩
        let mut word: Vec<i64> = basis[i].iter().rev().map(|&k| k as i64).collect();
        word.extend(basis[j].iter().map(|&k| -(k as i64)));
        verma_expectation(&word, h, c)
    })
}

fn vertex(parts: &[usize], h: f64, h_in: f64, h_out: f64) -> f64 {
    let mut prod = 1.0;
    for (j, &k) in parts.iter().enumerate() {
        let tail: usize = parts[j + 1..].iter().sum();
        prod *= h + k as f64 * h_in - h_out + tail as f64;
    }
    prod
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Block coefficients `b₀ = 1, b₁, …, b_level` for exchanged weight `dp`
/// and external weights `d = [h₁, h₂, h₃, h₄]`.
pub fn virasoro_block_series(c: f64, dp: f64, d: [f64; 4], level: usize) -> Result<Vec<f64>> {
    if level > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!("block level {level} exceeds the cap {MAX_LEVEL}")));
    }
    let [h1, h2, h3, h4] = d;
    let mut out = vec![1.0];
    for n in 1..=level {
        let basis = partitions(n);
        let gram = gram_matrix(n, dp, c);
        let cond = condition_number(&gram);
        if !(cond < MAX_GRAM_CONDITION) {
            return Err(Error::DegenerateGram { level: n, condition: cond });
        }
        let v2 = DMatrix::from_iterator(basis.len(), 1, basis.iter().map(|m| vertex(m, dp, h2, h1)));
        let v3 = DMatrix::from_iterator(basis.len(), 1, basis.iter().map(|m| vertex(m, dp, h3, h4)));
        let y = gram.lu().solve(&v3).ok_or(Error::DegenerateGram { level: n, condition: f64::INFINITY })?;
        out.push(v2.dot(&y));
    }
    Ok(out)
}
