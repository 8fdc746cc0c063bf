//! Divisor-class counts, representation numbers and the other arithmetic
//! functions that appear as coefficients of the theta identities, together
//! with brute-force lattice oracles.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::cyclotomic::CycloNumber;
use crate::qseries::QSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("divisor counts are defined for n ≥ 1")]
    ZeroArgument,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("unknown lambert variant '{0}' (expected half, quarter or threequarter)")]
    UnknownVariant(String),
}

/// Positive divisors of `n` in ascending order, by trial division.
pub fn divisors_of(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `d_{j,k}(n)`: the number of positive divisors `d` of `n` with `d ≡ j (mod k)`.
pub fn divisor_class_count(n: u64, j: i64, k: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument);
    }
    if k == 0 {
        return Err(ArithError::ZeroModulus);
    }
    let j = j.rem_euclid(k as i64) as u64;
    Ok(divisors_of(n).into_iter().filter(|d| d % k == j).count() as u64)
}

fn dcc(n: u64, j: i64, k: u64) -> i64 {
    divisor_class_count(n, j, k).expect("n ≥ 1 and k ≥ 1") as i64
}

/// `S₂(n) = 4 Σ_{d|n, d odd} (−1)^{(d−1)/2}`, with `S₂(0) = 1`.
pub fn s2_formula(n: u64) -> i64 {
    if n == 0 {
        return 1;
    }
    4 * (dcc(n, 1, 4) - dcc(n, 3, 4))
}

/// `S₁,₂(n) = 2(d_{1,8} + d_{3,8} − d_{5,8} − d_{7,8})(n)`, with `S₁,₂(0) = 1`.
pub fn s12_formula(n: u64) -> i64 {
    if n == 0 {
        return 1;
    }
    2 * (dcc(n, 1, 8) + dcc(n, 3, 8) - dcc(n, 5, 8) - dcc(n, 7, 8))
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `#{(x, y) ∈ ℤ² : x² + y² = n}` by enumeration.
pub fn s2_lattice(n: u64) -> u64 {
    let r = isqrt(n) as i64;
    let mut count = 0;
    for x in -r..=r {
        let rest = n - (x * x) as u64;
        let y = isqrt(rest);
        if y * y == rest {
            count += if y == 0 { 1 } else { 2 };
        }
    }
    count
}

/// `#{(x, y) ∈ ℤ² : x² + 2y² = n}` by enumeration.
pub fn s12_lattice(n: u64) -> u64 {
    let r = isqrt(n / 2) as i64;
    let mut count = 0;
    for y in -r..=r {
        let rest = n - 2 * (y * y) as u64;
        let x = isqrt(rest);
        if x * x == rest {
            count += if x == 0 { 1 } else { 2 };
        }
    }
    count
}

/// `(−1/n)`: 1 for n ≡ 1, −1 for n ≡ 3 (mod 4), 0 for even n.
pub fn kronecker_m1(n: i64) -> i64 {
    match n.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// `(−2/n)`: 1 for n ≡ 1, 3 and −1 for n ≡ 5, 7 (mod 8), 0 for even n.
pub fn kronecker_m2(n: i64) -> i64 {
    match n.rem_euclid(8) {
        1 | 3 => 1,
        5 | 7 => -1,
        _ => 0,
    }
}

/// `t_n = n(n+1)/2`, for every integer `n`.
pub fn triangular(n: i64) -> i64 {
    n * (n + 1) / 2
}

fn int(n: i64) -> CycloNumber {
    CycloNumber::from_int(1, n)
}

/// Builds `Σ c_j x^{e_j}` from `(x-exponent, integer)` pairs at grading `D`.
fn integer_series<I>(grading: u32, cutoff: i64, terms: I) -> QSeries
where
    I: IntoIterator<Item = (i64, i64)>,
{
    QSeries::from_terms(
        grading,
        cutoff,
        terms.into_iter().map(|(e, c)| (e * grading as i64, int(c))),
    )
}

/// Largest integer `m ≥ 0` with `m·D ≤ T` (the last whole x-power in the window).
fn whole_window(grading: u32, cutoff: i64) -> i64 {
    if cutoff < 0 {
        -1
    } else {
        cutoff / grading as i64
    }
}

/// `Σ_{n≥0} S₂(n) xⁿ`.
pub fn s2_series(grading: u32, cutoff: i64) -> QSeries {
    let top = whole_window(grading, cutoff);
    integer_series(grading, cutoff, (0..=top).map(|n| (n, s2_formula(n as u64))))
}

/// `Σ_{n≥0} S₁,₂(n) xⁿ`.
pub fn s12_series(grading: u32, cutoff: i64) -> QSeries {
    let top = whole_window(grading, cutoff);
    integer_series(grading, cutoff, (0..=top).map(|n| (n, s12_formula(n as u64))))
}

/// `Σ_{n≥0} (−1)ⁿ(2n+1) q^{t_n}`.
pub fn cube_series(grading: u32, cutoff: i64) -> QSeries {
    let top = whole_window(grading, cutoff);
    let terms = (0..)
        .map(|n: i64| (2 * triangular(n), if n % 2 == 0 { 2 * n + 1 } else { -(2 * n + 1) }))
        .take_while(|(e, _)| *e <= top);
    integer_series(grading, cutoff, terms)
}

/// `Σ_{n≥0} (−2/n) n q^{t_{(n−1)/2}}`; only odd `n` contribute.
pub fn kron2_series(grading: u32, cutoff: i64) -> QSeries {
    let top = whole_window(grading, cutoff);
    let terms = (0..)
        .map(|m: i64| {
            let n = 2 * m + 1;
            (2 * triangular(m), kronecker_m2(n) * n)
        })
        .take_while(|(e, _)| *e <= top);
    integer_series(grading, cutoff, terms)
}

/// `Σ_{n≥0} (−2/n) n q^{n²/8}`, i.e. exponents `n²/4` in `x`; needs `4 | D`.
pub fn kron2sq_series(grading: u32, cutoff: i64) -> QSeries {
    assert!(grading.is_multiple_of(4), "x^(n²/4) needs a grading divisible by 4");
    let quarter = grading as i64 / 4;
    let terms = (1..)
        .map(|n: i64| (n * n * quarter, int(kronecker_m2(n) * n)))
        .take_while(|(e, _)| *e <= cutoff)
        .filter(|(_, c)| !c.is_zero());
    QSeries::from_terms(grading, cutoff, terms)
}

/// Which `θ[1;ε′]` the logarithmic-derivative expansion describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambertVariant {
    Half,
    Quarter,
    ThreeQuarter,
}

impl LambertVariant {
    pub const ALL: [LambertVariant; 3] = [Self::Half, Self::Quarter, Self::ThreeQuarter];

    pub fn name(self) -> &'static str {
        match self {
            Self::Half => "half",
            Self::Quarter => "quarter",
            Self::ThreeQuarter => "threequarter",
        }
    }

    /// The lower characteristic `ε′` of `θ[1;ε′]`.
    pub fn epsp(self) -> BigRational {
        let (n, d) = match self {
            Self::Half => (1, 2),
            Self::Quarter => (1, 4),
            Self::ThreeQuarter => (3, 4),
        };
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

impl fmt::Display for LambertVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LambertVariant {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" => Ok(Self::Half),
            "quarter" => Ok(Self::Quarter),
            "threequarter" => Ok(Self::ThreeQuarter),
            other => Err(ArithError::UnknownVariant(other.to_string())),
        }
    }
}

/// `sin(πk/4) = (ζ₈^k − ζ₈^{−k})/(2i)`, exactly in Q(ζ₈).
pub fn sin_eighth_turn(k: i64) -> CycloNumber {
    let diff = CycloNumber::from_root_power(8, k) - CycloNumber::from_root_power(8, -k);
    let minus_half_i = CycloNumber::i().scalar_mul(&BigRational::new((-1).into(), 2.into()));
    diff * minus_half_i
}

/// The Lambert-type expansion of `θ′[1;ε′]/θ[1;ε′]`, divided by `2πi`.
///
/// * half: `(i/2)(1 + 4 Σ_N x^{2N} Σ_{d|N, d odd} (−1)^{(d−1)/2})`
/// * quarter: `i/√2 − i/2 + 2i Σ_N x^{2N} Σ_{d|N} (−1)^{d−1} sin(πd/4)`
/// * three-quarter: `i/√2 + i/2 + 2i Σ_N x^{2N} Σ_{d|N} (−1)^{d−1} sin(3πd/4)`
pub fn lambert_logderiv_series(variant: LambertVariant, grading: u32, cutoff: i64) -> QSeries {
    let i = CycloNumber::i();
    let half = BigRational::new(1.into(), 2.into());
    let i_half = i.scalar_mul(&half);
    let top = whole_window(grading, cutoff);
    let mut terms: Vec<(i64, CycloNumber)> = Vec::new();
    match variant {
        LambertVariant::Half => {
            terms.push((0, i_half.clone()));
            for n in (1..).take_while(|n: &i64| 2 * n <= top) {
                let odd_sum = dcc(n as u64, 1, 4) - dcc(n as u64, 3, 4);
                terms.push((2 * n, i_half.scalar_mul(&BigRational::from_integer((4 * odd_sum).into()))));
            }
        }
        LambertVariant::Quarter | LambertVariant::ThreeQuarter => {
            let (step, sign) = if variant == LambertVariant::Quarter { (1, -1) } else { (3, 1) };
            let inv_sqrt2 = CycloNumber::sqrt2().scalar_mul(&half);
            let constant = &i * &inv_sqrt2 + i_half.scalar_mul(&BigRational::from_integer(sign.into()));
            terms.push((0, constant));
            let two_i = i.scalar_mul(&BigRational::from_integer(2.into()));
            for n in (1..).take_while(|n: &i64| 2 * n <= top) {
                let mut inner = CycloNumber::zero(8);
                for d in divisors_of(n as u64) {
                    let s = sin_eighth_turn(step * d as i64);
                    inner = if d % 2 == 1 { inner + s } else { inner - s };
                }
                terms.push((2 * n, &two_i * &inner));
            }
        }
    }
    QSeries::from_terms(
        grading,
        cutoff,
        terms.into_iter().map(|(e, c)| (e * grading as i64, c)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_classes() {
        assert_eq!(divisor_class_count(9, 1, 8), Ok(2));
        assert_eq!(divisor_class_count(1, 1, 8), Ok(1));
        assert_eq!(divisor_class_count(8, 3, 8), Ok(0));
        assert_eq!(divisor_class_count(0, 1, 8), Err(ArithError::ZeroArgument));
        assert_eq!(divisor_class_count(5, 1, 0), Err(ArithError::ZeroModulus));
        assert_eq!(divisors_of(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
    }

    #[test]
    fn representation_numbers() {
        assert_eq!(s2_formula(5), 8);
        assert_eq!(s2_formula(3), 0);
        assert_eq!(s2_formula(0), 1);
        assert_eq!(s12_formula(3), 4);
        assert_eq!(s12_formula(9), 6);
        assert_eq!(s12_formula(5), 0);
        assert_eq!(s2_lattice(1), 4);
        assert_eq!(s2_lattice(2), 4);
        assert_eq!(s2_lattice(25), 12);
        assert_eq!(s12_lattice(1), 2);
        assert_eq!(s12_lattice(0), 1);
        for n in 0..300 {
            assert_eq!(s2_formula(n), s2_lattice(n) as i64, "S2({n})");
            assert_eq!(s12_formula(n), s12_lattice(n) as i64, "S12({n})");
        }
    }

    #[test]
    fn symbols_and_triangles() {
        assert_eq!([1, 3, 6].map(kronecker_m1), [1, -1, 0]);
        assert_eq!([3, 5, 8, 1, 7].map(kronecker_m2), [1, -1, 0, 1, -1]);
        assert_eq!([0, 3, -1, -2].map(triangular), [0, 6, 0, 1]);
    }

    #[test]
    fn sine_table_is_exact() {
        let s1 = sin_eighth_turn(1);
        let two = CycloNumber::from_int(1, 2);
        assert_eq!(&(&s1 * &s1) * &two, CycloNumber::one(1));
        assert_eq!(sin_eighth_turn(2), CycloNumber::one(1));
        assert!(sin_eighth_turn(4).is_zero());
        assert_eq!(sin_eighth_turn(6), -CycloNumber::one(1));
        assert_eq!(sin_eighth_turn(3), s1);
        assert_eq!(sin_eighth_turn(-1), -s1);
    }

    #[test]
    fn lambert_constants() {
        let i = CycloNumber::i();
        let half = BigRational::new(1.into(), 2.into());
        let inv_sqrt2 = CycloNumber::sqrt2().scalar_mul(&half);
        let q = lambert_logderiv_series(LambertVariant::Quarter, 1, 10);
        assert_eq!(q.coefficient(0).unwrap(), &i * &inv_sqrt2 - i.scalar_mul(&half));
        let t = lambert_logderiv_series(LambertVariant::ThreeQuarter, 1, 10);
        assert_eq!(t.coefficient(0).unwrap(), &i * &inv_sqrt2 + i.scalar_mul(&half));
        let h = lambert_logderiv_series(LambertVariant::Half, 1, 10);
        assert_eq!(h.coefficient(2).unwrap(), i.scalar_mul(&BigRational::from_integer(2.into())));
        assert!("fifth".parse::<LambertVariant>().is_err());
        assert_eq!("threequarter".parse::<LambertVariant>(), Ok(LambertVariant::ThreeQuarter));
    }

    #[test]
    fn gf_series_values() {
        let c = cube_series(1, 20);
        let got: Vec<(i64, CycloNumber)> = c.terms().map(|(e, v)| (e, v.clone())).collect();
        assert_eq!(got, vec![(0, int(1)), (2, int(-3)), (6, int(5)), (12, int(-7)), (20, int(9))]);
        let k = kron2_series(1, 20);
        let got: Vec<(i64, CycloNumber)> = k.terms().map(|(e, v)| (e, v.clone())).collect();
        assert_eq!(got, vec![(0, int(1)), (2, int(3)), (6, int(-5)), (12, int(-7)), (20, int(9))]);
        let k8 = kron2sq_series(4, 40);
        assert_eq!(k8.lead(), Some(1));
        assert_eq!(k8.coefficient(9).unwrap(), int(3));
        assert_eq!(k8.coefficient(25).unwrap(), int(-5));
    }
}
