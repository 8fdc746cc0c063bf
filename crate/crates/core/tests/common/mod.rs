//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's series or arithmetic code.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Dense integer power series, truncated after index `len - 1`.
pub type Dense = Vec<i128>;

pub fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let len = a.len().min(b.len());
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Inverse of a series with constant term 1.
pub fn dense_inv(a: &Dense) -> Dense {
    assert_eq!(a[0], 1);
    let mut out = vec![0i128; a.len()];
    out[0] = 1;
    for n in 1..a.len() {
        let s: i128 = (1..=n).map(|k| a[k] * out[n - k]).sum();
        out[n] = -s;
    }
    out
}

/// `Π_{n≥1} (1 − q^{kn})` with `len` coefficients.
pub fn euler(k: usize, len: usize) -> Dense {
    let mut out = vec![0i128; len];
    out[0] = 1;
    let mut n = k;
    while n < len {
        // Multiply in place by (1 − qⁿ), from the top down.
        for i in (n..len).rev() {
            out[i] -= out[i - n];
        }
        n += k;
    }
    out
}

pub fn dense_pow(a: &Dense, e: i32) -> Dense {
    let base = if e < 0 { dense_inv(a) } else { a.clone() };
    let mut out = vec![0i128; a.len()];
    out[0] = 1;
    for _ in 0..e.unsigned_abs() {
        out = dense_mul(&out, &base);
    }
    out
}

/// `#{(x, y) ∈ ℤ² : x² + c·y² = n}` by enumeration.
pub fn lattice_count(n: u64, c: u64) -> u64 {
    let mut count = 0;
    let mut y: i64 = 0;
    while c * (y * y) as u64 <= n {
        let rest = n - c * (y * y) as u64;
        let x = (rest as f64).sqrt().round() as u64;
        for cand in x.saturating_sub(1)..=x + 1 {
            if cand * cand == rest {
                let xs = if cand == 0 { 1 } else { 2 };
                let ys = if y == 0 { 1 } else { 2 };
                count += xs * ys;
            }
        }
        y += 1;
    }
    count
}

/// Coefficients of `θ[ε;ε′](0, kτ)` by direct summation over `|n| ≤ 60`,
/// as (exponent of x, value) with like exponents merged.
pub fn theta_terms(eps: f64, epsp: f64, k: f64, deriv: bool, max_exp: f64) -> Vec<(f64, Complex64)> {
    let mut out: Vec<(f64, Complex64)> = Vec::new();
    for n in -60i64..=60 {
        let m = n as f64 + eps / 2.0;
        let e = k * m * m;
        if e > max_exp + 1e-9 {
            continue;
        }
        let phase = Complex64::new(0.0, PI * m * epsp).exp();
        let v = if deriv { phase * m } else { phase };
        match out.iter_mut().find(|(x, _)| (x - e).abs() < 1e-9) {
            Some(slot) => slot.1 += v,
            None => out.push((e, v)),
        }
    }
    out.retain(|(_, v)| v.norm() > 1e-9);
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// `θ[ε;ε′](0, τ)` by partial summation with a fixed generous range.
pub fn theta_value(eps: f64, epsp: f64, tau: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in -80i64..=80 {
        let m = n as f64 + eps / 2.0;
        acc += (Complex64::new(0.0, PI) * (m * m * tau + m * epsp)).exp();
    }
    acc
}

/// `Φ_N` by dividing `x^N − 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_by_division(n: usize) -> Vec<i64> {
    let mut memo: Vec<Option<Vec<i64>>> = vec![None; n + 1];
    fn go(n: usize, memo: &mut Vec<Option<Vec<i64>>>) -> Vec<i64> {
        if let Some(p) = &memo[n] {
            return p.clone();
        }
        // x^n − 1, lowest degree first.
        let mut num = vec![0i64; n + 1];
        num[0] = -1;
        num[n] = 1;
        for d in 1..n {
            if n.is_multiple_of(d) {
                let den = go(d, memo);
                num = poly_div_exact(&num, &den);
            }
        }
        memo[n] = Some(num.clone());
        num
    }
    go(n, &mut memo)
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().unwrap();
    assert_eq!(lead, 1);
    let mut q = vec![0i64; rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    assert!(rem.iter().all(|&r| r == 0), "division was not exact");
    q
}
