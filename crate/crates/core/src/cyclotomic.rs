//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! An element is stored in the power basis `1, ζ_N, …, ζ_N^(φ(N)−1)` after
//! reduction modulo the N-th cyclotomic polynomial, so two elements of the
//! same order are equal exactly when their coordinates are. Binary
//! operations on elements of different orders embed both operands into the
//! field of order `lcm(N, M)` first.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An order every registered constant and characteristic fits into:
/// lcm(64, 36, 12, 8).
pub const UNIVERSAL_ORDER: u32 = 576;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("order {from} does not divide target order {to}")]
    NotEmbeddable { from: u32, to: u32 },
    #[error("{0} is not a rational multiple of a root of unity")]
    NotAUnit(String),
}

/// Reduction data for Φ_N: `x^degree ≡ −Σ tail[i].1 · x^tail[i].0`.
#[derive(Debug)]
pub(crate) struct Modulus {
    pub(crate) degree: usize,
    tail: Vec<(usize, i64)>,
}

type PolyTable = Mutex<HashMap<u32, Arc<[i64]>>>;
type ModulusTable = Mutex<HashMap<u32, Arc<Modulus>>>;

static PHI_TABLE: OnceLock<PolyTable> = OnceLock::new();
static MODULUS_TABLE: OnceLock<ModulusTable> = OnceLock::new();

/// The N-th cyclotomic polynomial, coefficients from the constant term up.
///
/// Computed by dividing `x^N − 1` by `Φ_d` for every proper divisor `d` of
/// `N`, and memoized process-wide. Panics on `n == 0` and on coefficient
/// overflow of `i64`, which does not happen for any order this crate uses.
pub fn cyclotomic_polynomial(n: u32) -> Arc<[i64]> {
    assert!(n >= 1, "cyclotomic polynomial requires N >= 1");
    let table = PHI_TABLE.get_or_init(Default::default);
    if let Some(p) = table.lock().expect("phi table poisoned").get(&n) {
        return p.clone();
    }
    // Computed without holding the lock: the recursion re-enters the table.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d < n {
            num = exact_divide(&num, &cyclotomic_polynomial(d));
        }
    }
    let poly: Arc<[i64]> = num.into();
    table
        .lock()
        .expect("phi table poisoned")
        .entry(n)
        .or_insert(poly)
        .clone()
}

/// Euler's totient, the degree of Φ_N.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

pub(crate) fn modulus(n: u32) -> Arc<Modulus> {
    let table = MODULUS_TABLE.get_or_init(Default::default);
    if let Some(m) = table.lock().expect("modulus table poisoned").get(&n) {
        return m.clone();
    }
    let phi = cyclotomic_polynomial(n);
    let degree = phi.len() - 1;
    let tail = phi[..degree]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| (i, *c))
        .collect();
    let m = Arc::new(Modulus { degree, tail });
    table
        .lock()
        .expect("modulus table poisoned")
        .entry(n)
        .or_insert(m)
        .clone()
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u32) -> Vec<u32> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    debug_assert_eq!(lead, 1, "cyclotomic polynomials are monic");
    let qlen = rem.len() - dd;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(*dj).expect("Φ_N coefficient overflow"))
                    .expect("Φ_N coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|c| *c == 0), "inexact cyclotomic division");
    quot
}

/// Scalars that can be reduced modulo Φ_N in place.
pub(crate) trait ReduceScalar: Clone {
    fn is_zero_scalar(&self) -> bool;
    /// `self += c * k`; returns `false` on overflow.
    fn add_scaled(&mut self, c: &Self, k: i64) -> bool;
    fn zero_scalar() -> Self;
}

impl ReduceScalar for i128 {
    fn is_zero_scalar(&self) -> bool {
        *self == 0
    }
    fn add_scaled(&mut self, c: &Self, k: i64) -> bool {
        match c.checked_mul(k as i128).and_then(|p| self.checked_add(p)) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn zero_scalar() -> Self {
        0
    }
}

impl ReduceScalar for BigInt {
    fn is_zero_scalar(&self) -> bool {
        self.is_zero()
    }
    fn add_scaled(&mut self, c: &Self, k: i64) -> bool {
        *self += c * k;
        true
    }
    fn zero_scalar() -> Self {
        BigInt::zero()
    }
}

impl ReduceScalar for BigRational {
    fn is_zero_scalar(&self) -> bool {
        self.is_zero()
    }
    fn add_scaled(&mut self, c: &Self, k: i64) -> bool {
        *self += c * BigRational::from_integer(BigInt::from(k));
        true
    }
    fn zero_scalar() -> Self {
        BigRational::zero()
    }
}

/// Reduces a polynomial in ζ modulo Φ_N, leaving exactly `degree` entries.
/// Returns `false` if an `i128` accumulator overflowed.
pub(crate) fn reduce_poly<T: ReduceScalar>(poly: &mut Vec<T>, m: &Modulus) -> bool {
    let deg = m.degree;
    for i in (deg..poly.len()).rev() {
        if poly[i].is_zero_scalar() {
            continue;
        }
        let c = std::mem::replace(&mut poly[i], T::zero_scalar());
        for &(j, t) in &m.tail {
            if !poly[i - deg + j].add_scaled(&c, -t) {
                return false;
            }
        }
    }
    poly.truncate(deg);
    poly.resize(deg, T::zero_scalar());
    true
}

/// An exact element of Q(ζ_N).
#[derive(Clone, Debug)]
pub struct CycloNumber {
    order: u32,
    coords: Vec<BigRational>,
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CycloNumber {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        CycloNumber {
            order,
            coords: vec![BigRational::zero(); totient(order)],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_rational(order: u32, r: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coords[0] = r;
        z
    }

    pub fn from_int(order: u32, n: i64) -> Self {
        Self::from_rational(order, rat(n))
    }

    /// ζ_N^k, with `k` reduced mod `N` and the result reduced mod Φ_N.
    pub fn from_root_power(order: u32, k: i64) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let j = k.rem_euclid(order as i64) as usize;
        let m = modulus(order);
        let mut poly = vec![BigRational::zero(); j.max(m.degree - 1) + 1];
        poly[j] = BigRational::one();
        reduce_poly(&mut poly, &m);
        CycloNumber { order, coords: poly }
    }

    /// Builds an element from coordinates in the power basis of Q(ζ_N).
    /// Entries beyond φ(N) are reduced modulo Φ_N.
    pub fn from_coords(order: u32, mut coords: Vec<BigRational>) -> Self {
        let m = modulus(order);
        if coords.len() < m.degree {
            coords.resize(m.degree, BigRational::zero());
        }
        reduce_poly(&mut coords, &m);
        CycloNumber { order, coords }
    }

    /// i = ζ₄.
    pub fn i() -> Self {
        Self::from_root_power(4, 1)
    }

    /// √2 = ζ₈ + ζ₈⁻¹.
    pub fn sqrt2() -> Self {
        &Self::from_root_power(8, 1) + &Self::from_root_power(8, -1)
    }

    /// √3 = ζ₁₂ + ζ₁₂⁻¹.
    pub fn sqrt3() -> Self {
        &Self::from_root_power(12, 1) + &Self::from_root_power(12, -1)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// The same element expressed in Q(ζ_M) via ζ_N ↦ ζ_M^(M/N).
    pub fn embed(&self, target: u32) -> Result<Self, CycloError> {
        if target == 0 || !target.is_multiple_of(self.order) {
            return Err(CycloError::NotEmbeddable {
                from: self.order,
                to: target,
            });
        }
        if target == self.order {
            return Ok(self.clone());
        }
        let step = (target / self.order) as usize;
        let m = modulus(target);
        let len = ((self.coords.len() - 1) * step + 1).max(m.degree);
        let mut poly = vec![BigRational::zero(); len];
        for (j, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                poly[j * step] = c.clone();
            }
        }
        reduce_poly(&mut poly, &m);
        Ok(CycloNumber {
            order: target,
            coords: poly,
        })
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let n = lcm(a.order, b.order);
        (
            a.embed(n).expect("lcm is a multiple"),
            b.embed(n).expect("lcm is a multiple"),
        )
    }

    pub fn scalar_mul(&self, r: &BigRational) -> Self {
        CycloNumber {
            order: self.order,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplies by ζ_N^k without a general product.
    pub fn mul_root_power(&self, k: i64) -> Self {
        let n = self.order as i64;
        let m = modulus(self.order);
        let mut poly = vec![BigRational::zero(); self.order as usize];
        for (j, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                poly[(j as i64 + k).rem_euclid(n) as usize] = c.clone();
            }
        }
        reduce_poly(&mut poly, &m);
        CycloNumber {
            order: self.order,
            coords: poly,
        }
    }

    /// Least common denominator of the coordinates and the numerators over it.
    pub(crate) fn scaled_integers(&self) -> (BigInt, Vec<BigInt>) {
        let den = self
            .coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (den, nums)
    }

    /// Builds an element from an unreduced integer polynomial divided by `den`.
    pub(crate) fn from_scaled_integers(order: u32, mut nums: Vec<BigInt>, den: &BigInt) -> Self {
        let m = modulus(order);
        if nums.len() < m.degree {
            nums.resize(m.degree, BigInt::zero());
        }
        reduce_poly(&mut nums, &m);
        let coords = nums
            .into_iter()
            .map(|n| {
                if n.is_zero() {
                    BigRational::zero()
                } else {
                    BigRational::new(n, den.clone())
                }
            })
            .collect();
        CycloNumber { order, coords }
    }

    fn mul_same_order(&self, other: &Self) -> Self {
        let (da, na) = self.scaled_integers();
        let (db, nb) = other.scaled_integers();
        let mut acc = vec![BigInt::zero(); na.len() + nb.len() - 1];
        for (i, x) in na.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate() {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
        Self::from_scaled_integers(self.order, acc, &(da * db))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut out = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Inverse of an element of the form `r·ζ_N^k` with `r` a nonzero
    /// rational; any other element is rejected.
    pub fn unit_inverse(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::NotAUnit(self.to_string()));
        }
        let n = self.order as i64;
        for k in 0..n {
            if let Some(r) = self.mul_root_power(-k).as_rational() {
                if !r.is_zero() {
                    return Ok(Self::from_root_power(self.order, -k).scalar_mul(&r.recip()));
                }
            }
        }
        Err(CycloError::NotAUnit(self.to_string()))
    }

    /// Complex value under ζ_N ↦ exp(2πi/N).
    pub fn to_complex(&self) -> Complex64 {
        let n = self.order as f64;
        let mut out = Complex64::new(0.0, 0.0);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * j as f64 / n;
            out += Complex64::from_polar(v, angle);
        }
        out
    }

    /// Tries to express the element in the smaller field Q(ζ_d), `d | N`.
    pub fn restrict(&self, d: u32) -> Option<Self> {
        if d == 0 || !self.order.is_multiple_of(d) {
            return None;
        }
        if d == self.order {
            return Some(self.clone());
        }
        let small_deg = totient(d);
        let big_deg = self.coords.len();
        // Columns: images of ζ_d^j in Q(ζ_N); last column: self.
        let cols: Vec<CycloNumber> = (0..small_deg)
            .map(|j| {
                CycloNumber::from_root_power(d, j as i64)
                    .embed(self.order)
                    .expect("d divides N")
            })
            .collect();
        let mut rows: Vec<Vec<BigRational>> = (0..big_deg)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    cols.iter().map(|c| c.coords[r].clone()).collect();
                row.push(self.coords[r].clone());
                row
            })
            .collect();
        let mut pivot_row = 0;
        let mut pivots = Vec::with_capacity(small_deg);
        for col in 0..small_deg {
            let Some(p) = (pivot_row..big_deg).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(pivot_row, p);
            let inv = rows[pivot_row][col].recip();
            for v in rows[pivot_row].iter_mut() {
                *v = &*v * &inv;
            }
            let prow = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, y) in row.iter_mut().zip(&prow) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        // Inconsistent iff a zero row has a nonzero right-hand side.
        if rows[pivot_row..].iter().any(|r| !r[small_deg].is_zero()) {
            return None;
        }
        let mut coords = vec![BigRational::zero(); small_deg];
        for (r, &col) in pivots.iter().enumerate() {
            coords[col] = rows[r][small_deg].clone();
        }
        Some(CycloNumber { order: d, coords })
    }

    /// The element in the smallest field Q(ζ_d) containing it.
    pub fn minimal_form(&self) -> Self {
        for d in divisors(self.order) {
            if let Some(x) = self.restrict(d) {
                return x;
            }
        }
        self.clone()
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            self.coords == other.coords
        } else {
            let (a, b) = Self::aligned(self, other);
            a.coords == b.coords
        }
    }
}

impl Eq for CycloNumber {}

impl<'a> Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &'a CycloNumber) -> CycloNumber {
        if self.order != rhs.order {
            let (a, b) = CycloNumber::aligned(self, rhs);
            return &a + &b;
        }
        CycloNumber {
            order: self.order,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &'a CycloNumber) -> CycloNumber {
        self + &(-rhs)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            order: self.order,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl<'a> Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &'a CycloNumber) -> CycloNumber {
        if self.order != rhs.order {
            let (a, b) = CycloNumber::aligned(self, rhs);
            return a.mul_same_order(&b);
        }
        self.mul_same_order(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints in the smallest field containing the value, as an expression in
/// `zeta(N)` that the identity language reads back.
impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.minimal_form();
        let mut first = true;
        for (j, c) in m.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", fmt_rational(&mag))?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{}*", fmt_rational(&mag))?;
            }
            if j == 1 {
                write!(f, "zeta({})", m.order)?;
            } else {
                write!(f, "zeta({})^{}", m.order, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn phi_small_cases() {
        assert_eq!(&*cyclotomic_polynomial(1), &[-1, 1]);
        assert_eq!(&*cyclotomic_polynomial(8), &[1, 0, 0, 0, 1]);
        assert_eq!(&*cyclotomic_polynomial(6), &[1, -1, 1]);
        assert_eq!(&*cyclotomic_polynomial(12), &[1, 0, -1, 0, 1]);
    }

    #[test]
    fn phi_576_is_sparse() {
        let p = cyclotomic_polynomial(576);
        assert_eq!(p.len(), 193);
        for (i, c) in p.iter().enumerate() {
            let want = match i {
                0 | 192 => 1,
                96 => -1,
                _ => 0,
            };
            assert_eq!(*c, want, "coefficient {i}");
        }
    }

    #[test]
    fn phi_prime_power_times_three_matches_substitution() {
        // Φ_{2^a 3^b}(x) = Φ_6(x^{2^{a-1} 3^{b-1}})
        for (a, b) in [(1u32, 1u32), (2, 1), (3, 2), (6, 2), (4, 3)] {
            let n = 2u32.pow(a) * 3u32.pow(b);
            let s = (2u32.pow(a - 1) * 3u32.pow(b - 1)) as usize;
            let mut want = vec![0i64; 2 * s + 1];
            want[0] = 1;
            want[s] = -1;
            want[2 * s] = 1;
            assert_eq!(&*cyclotomic_polynomial(n), &want[..], "N = {n}");
        }
    }

    #[test]
    fn root_powers() {
        let i = CycloNumber::from_root_power(4, 1);
        assert_eq!(i.coords(), &[r(0, 1), r(1, 1)]);
        assert_eq!(CycloNumber::from_root_power(6, 3), CycloNumber::from_int(6, -1));
        let z = CycloNumber::from_root_power(576, 96);
        assert_eq!(z.pow(6), CycloNumber::one(576));
        assert_eq!(z.pow(3), CycloNumber::from_int(576, -1));
        assert_eq!(z, CycloNumber::from_root_power(6, 1));
    }

    #[test]
    fn root_of_unity_and_phi_vanish() {
        for n in [1u32, 2, 3, 4, 6, 8, 12, 24, 36, 64, 576] {
            let z = CycloNumber::from_root_power(n, 1);
            assert_eq!(z.pow(n), CycloNumber::one(n), "ζ^N at {n}");
            let phi = cyclotomic_polynomial(n);
            let mut acc = CycloNumber::zero(n);
            for (k, c) in phi.iter().enumerate() {
                if *c != 0 {
                    let term = CycloNumber::from_root_power(n, k as i64).scalar_mul(&r(*c, 1));
                    acc = &acc + &term;
                }
            }
            assert!(acc.is_zero(), "Φ_N(ζ_N) at {n}");
        }
    }

    #[test]
    fn square_roots() {
        let s2 = CycloNumber::sqrt2();
        assert_eq!(&s2 * &s2, CycloNumber::from_int(8, 2));
        let s3 = CycloNumber::sqrt3();
        assert_eq!(&s3 * &s3, CycloNumber::from_int(12, 3));
        let e = s2.embed(64).unwrap();
        assert_eq!(&e * &e, CycloNumber::from_int(1, 2));
    }

    #[test]
    fn phi_576_relation_holds() {
        let a = CycloNumber::from_root_power(576, 192);
        let b = CycloNumber::from_root_power(576, 96);
        let sum = &(&a - &b) + &CycloNumber::one(576);
        assert!(sum.is_zero());
    }

    #[test]
    fn embed_errors_and_values() {
        let i = CycloNumber::i();
        assert_eq!(i.embed(8).unwrap(), CycloNumber::from_root_power(8, 2));
        assert!(matches!(i.embed(6), Err(CycloError::NotEmbeddable { .. })));
        let three = CycloNumber::from_int(1, 3).embed(576).unwrap();
        assert_eq!(three.as_rational(), Some(r(3, 1)));
    }

    #[test]
    fn mixed_orders_auto_embed() {
        let sum = &CycloNumber::i() + &CycloNumber::from_root_power(6, 1);
        assert_eq!(sum.order(), 12);
        let back = &sum - &CycloNumber::from_root_power(6, 1);
        assert_eq!(back, CycloNumber::i());
    }

    #[test]
    fn complex_values() {
        let z = CycloNumber::from_root_power(8, 1).to_complex();
        assert!((z.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((z.im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let s = CycloNumber::sqrt2().to_complex();
        assert!((s.re - std::f64::consts::SQRT_2).abs() < 1e-15 && s.im.abs() < 1e-15);
        assert_eq!(CycloNumber::zero(8).to_complex(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unit_inverse_of_scaled_roots() {
        let z = CycloNumber::from_root_power(3, 2).scalar_mul(&r(-2, 3));
        let inv = z.unit_inverse().unwrap();
        assert_eq!(&z * &inv, CycloNumber::one(3));
        assert!(CycloNumber::sqrt2().unit_inverse().is_err());
        assert!(CycloNumber::zero(4).unit_inverse().is_err());
    }

    #[test]
    fn minimal_form_and_display() {
        let i = CycloNumber::i().embed(576).unwrap();
        assert_eq!(i.minimal_form().order(), 4);
        assert_eq!(i.to_string(), "zeta(4)");
        let half = CycloNumber::from_rational(64, r(-1, 2));
        assert_eq!(half.to_string(), "-1/2");
        let s2 = CycloNumber::sqrt2().embed(64).unwrap();
        assert_eq!(s2.minimal_form().order(), 8);
        assert_eq!(CycloNumber::zero(8).to_string(), "0");
    }
}
