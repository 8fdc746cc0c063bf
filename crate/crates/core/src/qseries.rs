//! Truncated formal series in `u = x^(1/D)`, `x = exp(πiτ)`, with
//! coefficients in a cyclotomic field.
//!
//! A series stores its grading `D`, a cutoff `T` and the nonzero terms with
//! exponent numerator `e ≤ T`. Coefficients with `e > T` are unknown, not
//! zero, and every operation shrinks the cutoff so that it never reports a
//! coefficient it cannot know. Series in `q = exp(2πiτ)` are stored with
//! doubled `x`-exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclotomic::{modulus, reduce_poly, CycloError, CycloNumber, ReduceScalar};

/// Cutoff of a series that is known exactly (a polynomial or a constant).
pub const EXACT: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    #[error("grading mismatch: {0} vs {1}")]
    GradingMismatch(u32, u32),
    #[error("grading {from} does not divide {to}")]
    NotDivisible { from: u32, to: u32 },
    #[error("exponent {exponent}/{grading} lies beyond the cutoff {cutoff}/{grading}")]
    BeyondCutoff {
        exponent: i64,
        cutoff: i64,
        grading: u32,
    },
    #[error("series has no known nonzero term and cannot be inverted")]
    ZeroSeries,
    #[error("an exact polynomial with several terms has no finite inverse; truncate it first")]
    UnboundedInverse,
    #[error("leading coefficient is not invertible: {0}")]
    NotInvertible(#[from] CycloError),
}

#[derive(Clone, Debug)]
pub struct QSeries {
    grading: u32,
    order: u32,
    cutoff: i64,
    terms: BTreeMap<i64, CycloNumber>,
}

fn clamp_cutoff(c: i64) -> i64 {
    c.min(EXACT)
}

impl QSeries {
    /// The zero series known up to `cutoff`.
    pub fn zero(grading: u32, order: u32, cutoff: i64) -> Self {
        assert!(grading >= 1, "grading must be positive");
        QSeries {
            grading,
            order,
            cutoff: clamp_cutoff(cutoff),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(grading: u32) -> Self {
        Self::constant(CycloNumber::one(1), grading)
    }

    /// An exact constant series.
    pub fn constant(c: CycloNumber, grading: u32) -> Self {
        Self::from_terms(grading, EXACT, [(0, c)])
    }

    pub fn monomial(c: CycloNumber, exponent: i64, grading: u32, cutoff: i64) -> Self {
        Self::from_terms(grading, cutoff, [(exponent, c)])
    }

    /// Collects terms, summing repeated exponents, embedding every
    /// coefficient into a common order and dropping zeros and terms past the
    /// cutoff.
    pub fn from_terms<I>(grading: u32, cutoff: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, CycloNumber)>,
    {
        let cutoff = clamp_cutoff(cutoff);
        let raw: Vec<(i64, CycloNumber)> = terms.into_iter().filter(|(e, _)| *e <= cutoff).collect();
        let order = raw.iter().fold(1u32, |acc, (_, c)| acc.lcm(&c.order()));
        let mut map: BTreeMap<i64, CycloNumber> = BTreeMap::new();
        for (e, c) in raw {
            let c = c.embed(order).expect("order is a common multiple");
            match map.get_mut(&e) {
                Some(existing) => *existing = &*existing + &c,
                None => {
                    map.insert(e, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        let mut s = QSeries {
            grading,
            order,
            cutoff,
            terms: map,
        };
        s.assert_canonical();
        s
    }

    fn assert_canonical(&mut self) {
        debug_assert!(self.terms.values().all(|c| !c.is_zero() && c.order() == self.order));
        debug_assert!(self.terms.keys().all(|e| *e <= self.cutoff));
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    /// Cyclotomic order shared by every stored coefficient.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn is_exact(&self) -> bool {
        self.cutoff >= EXACT
    }

    /// The known window as an `x`-exponent, `T/D`.
    pub fn cutoff_exponent(&self) -> BigRational {
        BigRational::new(BigInt::from(self.cutoff), BigInt::from(self.grading))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycloNumber)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest stored exponent numerator.
    pub fn lead(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Lower bound on the exponent of the first nonzero term: the lead, or
    /// one past the cutoff for a series with no known nonzero term.
    pub fn valuation(&self) -> i64 {
        self.lead().unwrap_or(self.cutoff.saturating_add(1))
    }

    pub fn first_nonzero(&self) -> Option<(i64, &CycloNumber)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// The coefficient of `u^e`; zero when not stored, an error past the cutoff.
    pub fn coefficient(&self, e: i64) -> Result<CycloNumber, QSeriesError> {
        if e > self.cutoff {
            return Err(QSeriesError::BeyondCutoff {
                exponent: e,
                cutoff: self.cutoff,
                grading: self.grading,
            });
        }
        Ok(self
            .terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| CycloNumber::zero(self.order)))
    }

    /// Re-expresses every coefficient in Q(ζ_M).
    pub fn embed_order(&self, target: u32) -> Result<Self, CycloError> {
        if target == self.order {
            return Ok(self.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((*e, c.embed(target)?)))
            .collect::<Result<BTreeMap<_, _>, CycloError>>()?;
        Ok(QSeries {
            grading: self.grading,
            order: target,
            cutoff: self.cutoff,
            terms,
        })
    }

    /// Lowers the cutoff to `cutoff` (never raises it).
    pub fn truncate(&self, cutoff: i64) -> Self {
        let cutoff = cutoff.min(self.cutoff);
        QSeries {
            grading: self.grading,
            order: self.order,
            cutoff,
            terms: self.terms.range(..=cutoff).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    fn check_grading(&self, other: &Self) -> Result<(), QSeriesError> {
        if self.grading != other.grading {
            Err(QSeriesError::GradingMismatch(self.grading, other.grading))
        } else {
            Ok(())
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let n = self.order.lcm(&other.order);
        (
            self.embed_order(n).expect("lcm order"),
            other.embed_order(n).expect("lcm order"),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self, QSeriesError> {
        self.check_grading(other)?;
        let (a, b) = self.aligned(other);
        let cutoff = a.cutoff.min(b.cutoff);
        let mut terms = a.terms;
        terms.retain(|e, _| *e <= cutoff);
        for (e, c) in b.terms.into_iter().filter(|(e, _)| *e <= cutoff) {
            match terms.get_mut(&e) {
                Some(x) => *x = &*x + &c,
                None => {
                    terms.insert(e, c);
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(QSeries {
            grading: a.grading,
            order: a.order,
            cutoff,
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        QSeries {
            grading: self.grading,
            order: self.order,
            cutoff: self.cutoff,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QSeriesError> {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &CycloNumber) -> Self {
        if c.is_zero() {
            return QSeries::zero(self.grading, self.order.lcm(&c.order()), self.cutoff);
        }
        self.mul(&QSeries::constant(c.clone(), self.grading))
            .expect("same grading")
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut terms: BTreeMap<i64, CycloNumber> =
            self.terms.iter().map(|(e, c)| (*e, c.scalar_mul(r))).collect();
        terms.retain(|_, c| !c.is_zero());
        QSeries {
            grading: self.grading,
            order: self.order,
            cutoff: self.cutoff,
            terms,
        }
    }

    /// Multiplies by `u^shift` exactly.
    pub fn shift(&self, shift: i64) -> Self {
        QSeries {
            grading: self.grading,
            order: self.order,
            cutoff: if self.is_exact() {
                EXACT
            } else {
                clamp_cutoff(self.cutoff.saturating_add(shift))
            },
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    /// Truncated Cauchy product. The result is known up to
    /// `min(T_a + v_b, T_b + v_a)` where `v` is the valuation.
    pub fn mul(&self, other: &Self) -> Result<Self, QSeriesError> {
        self.check_grading(other)?;
        let (a, b) = self.aligned(other);
        let cutoff = clamp_cutoff(
            a.cutoff
                .saturating_add(b.valuation())
                .min(b.cutoff.saturating_add(a.valuation())),
        );
        let mut out = QSeries::zero(a.grading, a.order, cutoff);
        if a.terms.is_empty() || b.terms.is_empty() {
            return Ok(out);
        }
        let ia = IntSeries::from_series(&a);
        let ib = IntSeries::from_series(&b);
        let den = &ia.den * &ib.den;
        let deg = modulus(a.order).degree;
        let products = match (ia.narrow(), ib.narrow()) {
            (Some(na), Some(nb)) => convolve(&na, &nb, deg, a.order, cutoff),
            _ => None,
        }
        .or_else(|| convolve(&ia, &ib, deg, a.order, cutoff))
        .expect("arbitrary-precision convolution cannot overflow");
        for (e, nums) in products {
            let c = CycloNumber::from_scaled_integers(a.order, nums, &den);
            if !c.is_zero() {
                out.terms.insert(e, c);
            }
        }
        Ok(out)
    }

    /// Binary exponentiation; `pow(a, 0)` is the exact series 1.
    pub fn pow(&self, m: u32) -> Self {
        let mut out = QSeries::one(self.grading);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base).expect("same grading");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same grading");
            }
        }
        out
    }

    /// The multiplicative inverse up to the cutoff. The leading coefficient
    /// must be a rational multiple of a root of unity.
    pub fn invert(&self) -> Result<Self, QSeriesError> {
        let (lead, c0) = self.first_nonzero().ok_or(QSeriesError::ZeroSeries)?;
        let c0_inv = c0.unit_inverse()?;
        // Normalized series a' = a·u^(−lead)/c0 has constant term 1.
        let normalized: Vec<(i64, CycloNumber)> = self
            .terms
            .iter()
            .skip(1)
            .map(|(e, c)| (e - lead, c * &c0_inv))
            .collect();
        if self.is_exact() {
            if normalized.is_empty() {
                return Ok(QSeries::monomial(c0_inv, -lead, self.grading, EXACT));
            }
            // The inverse of a non-monomial polynomial is an infinite series.
            return Err(QSeriesError::UnboundedInverse);
        }
        let window = self.cutoff - lead;
        let order = self.order.lcm(&c0_inv.order());
        let size = (window + 1) as usize;
        let mut inv: Vec<Option<CycloNumber>> = vec![None; size];
        inv[0] = Some(CycloNumber::one(order));
        for m in 1..size {
            let mut acc = CycloNumber::zero(order);
            let mut any = false;
            for (k, ak) in &normalized {
                let k = *k as usize;
                if k > m {
                    break;
                }
                if let Some(b) = &inv[m - k] {
                    acc = &acc + &(ak * b);
                    any = true;
                }
            }
            if any && !acc.is_zero() {
                inv[m] = Some(-acc);
            }
        }
        let cutoff = window - lead;
        let terms = inv
            .into_iter()
            .enumerate()
            .filter_map(|(m, c)| c.map(|c| (m as i64 - lead, &c * &c0_inv)));
        Ok(QSeries::from_terms(self.grading, cutoff, terms))
    }

    /// The same series at grading `D' = rD`; numerators scale by `r`.
    pub fn regrade(&self, new_grading: u32) -> Result<Self, QSeriesError> {
        if new_grading == 0 || !new_grading.is_multiple_of(self.grading) {
            return Err(QSeriesError::NotDivisible {
                from: self.grading,
                to: new_grading,
            });
        }
        let r = (new_grading / self.grading) as i64;
        Ok(QSeries {
            grading: new_grading,
            order: self.order,
            cutoff: scale_cutoff(self.cutoff, r),
            terms: self.terms.iter().map(|(e, c)| (e * r, c.clone())).collect(),
        })
    }

    /// Substitutes `τ ↦ kτ`: every exponent numerator is multiplied by `k`.
    pub fn rescale_tau(&self, k: u32) -> Self {
        assert!(k >= 1, "tau scale must be positive");
        let k = k as i64;
        QSeries {
            grading: self.grading,
            order: self.order,
            cutoff: scale_cutoff(self.cutoff, k),
            terms: self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// Evaluates the truncated sum at `τ`, with `u^e = exp(πiτe/D)`.
    pub fn eval_at_tau(&self, tau: Complex64) -> Complex64 {
        let d = self.grading as f64;
        self.terms
            .iter()
            .map(|(e, c)| {
                let ex = Complex64::new(0.0, std::f64::consts::PI) * tau * (*e as f64 / d);
                c.to_complex() * ex.exp()
            })
            .sum()
    }

    /// Structural equality of the known windows after aligning orders.
    pub fn same_terms(&self, other: &Self) -> bool {
        self.grading == other.grading
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|((e1, c1), (e2, c2))| e1 == e2 && c1 == c2)
    }
}

fn scale_cutoff(cutoff: i64, r: i64) -> i64 {
    if cutoff >= EXACT {
        EXACT
    } else {
        clamp_cutoff(cutoff.saturating_mul(r))
    }
}

/// Coefficients over one common denominator, with sparse integer coordinates.
struct IntSeries<T> {
    den: BigInt,
    terms: Vec<(i64, Vec<(usize, T)>)>,
}

impl IntSeries<BigInt> {
    fn from_series(s: &QSeries) -> Self {
        let den = s
            .terms
            .values()
            .flat_map(|c| c.coords().iter())
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let terms = s
            .terms
            .iter()
            .map(|(e, c)| {
                let coords = c
                    .coords()
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !r.is_zero())
                    .map(|(i, r)| (i, r.numer() * (&den / r.denom())))
                    .collect();
                (*e, coords)
            })
            .collect();
        IntSeries { den, terms }
    }

    fn narrow(&self) -> Option<IntSeries<i128>> {
        let terms = self
            .terms
            .iter()
            .map(|(e, cs)| {
                let small = cs
                    .iter()
                    .map(|(i, v)| v.to_i128().map(|v| (*i, v)))
                    .collect::<Option<Vec<_>>>()?;
                Some((*e, small))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntSeries {
            den: self.den.clone(),
            terms,
        })
    }
}

trait Accumulate: ReduceScalar {
    fn mul_acc(acc: &mut Self, x: &Self, y: &Self) -> bool;
    fn into_bigint(self) -> BigInt;
}

impl Accumulate for i128 {
    fn mul_acc(acc: &mut Self, x: &Self, y: &Self) -> bool {
        match x.checked_mul(*y).and_then(|p| acc.checked_add(p)) {
            Some(v) => {
                *acc = v;
                true
            }
            None => false,
        }
    }
    fn into_bigint(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Accumulate for BigInt {
    fn mul_acc(acc: &mut Self, x: &Self, y: &Self) -> bool {
        *acc += x * y;
        true
    }
    fn into_bigint(self) -> BigInt {
        self
    }
}

/// Pairwise products accumulated per exponent, reduced modulo Φ_N once per
/// output exponent. `None` on `i128` overflow.
fn convolve<T: Accumulate>(
    a: &IntSeries<T>,
    b: &IntSeries<T>,
    deg: usize,
    order: u32,
    cutoff: i64,
) -> Option<BTreeMap<i64, Vec<BigInt>>> {
    let width = 2 * deg - 1;
    let mut acc: BTreeMap<i64, Vec<T>> = BTreeMap::new();
    let b_lead = b.terms.first().map(|t| t.0)?;
    for (ea, ca) in &a.terms {
        if ea + b_lead > cutoff {
            break;
        }
        for (eb, cb) in &b.terms {
            let e = ea + eb;
            if e > cutoff {
                break;
            }
            let slot = acc.entry(e).or_insert_with(|| vec![T::zero_scalar(); width]);
            for (i, x) in ca {
                for (j, y) in cb {
                    if !T::mul_acc(&mut slot[i + j], x, y) {
                        return None;
                    }
                }
            }
        }
    }
    let m = modulus(order);
    let mut out = BTreeMap::new();
    for (e, mut poly) in acc {
        if !reduce_poly(&mut poly, &m) {
            return None;
        }
        if poly.iter().all(|v| v.is_zero_scalar()) {
            continue;
        }
        out.insert(e, poly.into_iter().map(T::into_bigint).collect());
    }
    Some(out)
}

fn fmt_exponent(e: i64, d: u32) -> String {
    let r = BigRational::new(BigInt::from(e), BigInt::from(d));
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *e == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*x^({})", fmt_exponent(*e, self.grading))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            write!(f, " + O(x^({}))", fmt_exponent(self.cutoff + 1, self.grading))?;
        }
        Ok(())
    }
}
