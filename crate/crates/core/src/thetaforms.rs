//! Series builders for theta constants, their normalized derivatives, eta
//! quotients and the product forms used as independent oracles.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclotomic::CycloNumber;
use crate::qseries::{QSeries, QSeriesError, EXACT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("grading {given} cannot represent the exponents; a multiple of {required} is needed")]
    IncompatibleGrading { required: u32, given: u32 },
    #[error("invalid eta quotient: {0}")]
    InvalidEtaQuotient(String),
    #[error(transparent)]
    Series(#[from] QSeriesError),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `exp(2πi·r)` for rational `r`, in the smallest field that contains it.
pub fn root_of_unity(r: &BigRational) -> CycloNumber {
    let den = r.denom().to_u32().expect("root-of-unity order fits in u32");
    let num = (r.numer() % r.denom()).to_i64().expect("reduced numerator fits");
    CycloNumber::from_root_power(den, num)
}

/// The pair `(ε, ε′)` together with the τ-scale `k` of `θ[ε;ε′](0, kτ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Characteristic {
    pub eps: BigRational,
    pub epsp: BigRational,
    pub scale: u32,
}

impl Characteristic {
    pub fn new(eps: BigRational, epsp: BigRational) -> Self {
        Characteristic { eps, epsp, scale: 1 }
    }

    /// Shorthand with small integer numerators and denominators.
    pub fn ratio(eps: (i64, i64), epsp: (i64, i64)) -> Self {
        Self::new(rat(eps.0, eps.1), rat(epsp.0, epsp.1))
    }

    pub fn at_scale(mut self, k: u32) -> Self {
        assert!(k >= 1, "scale must be positive");
        self.scale = k;
        self
    }

    fn parts(&self) -> (i64, i64, i64, i64) {
        let small = |x: &BigInt| x.to_i64().expect("characteristic entries are small rationals");
        (
            small(self.eps.numer()),
            small(self.eps.denom()),
            small(self.epsp.numer()),
            small(self.epsp.denom()),
        )
    }

    /// `k(n+ε/2)²` as an exact rational.
    fn exponent(&self, n: i64) -> BigRational {
        let m = BigRational::from_integer(n.into()) + &self.eps / BigInt::from(2);
        &m * &m * BigInt::from(self.scale)
    }

    /// `(n+ε/2)ε′/2`, the phase of the n-th summand as a fraction of a turn.
    fn phase_turns(&self, n: i64) -> BigRational {
        let m = BigRational::from_integer(n.into()) + &self.eps / BigInt::from(2);
        m * &self.epsp / BigInt::from(2)
    }

    fn period(&self) -> i64 {
        let (_, b, _, d) = self.parts();
        4 * b * d
    }

    /// Smallest grading `D` in which every exponent `k(n+ε/2)²` is an
    /// integer multiple of `1/D`.
    pub fn natural_grading(&self) -> u32 {
        (0..self.period())
            .map(|n| self.exponent(n).denom().to_u32().expect("small"))
            .fold(1, |acc, d| acc.lcm(&d))
    }

    /// Cyclotomic order generated by the phases `ρ(n)`.
    pub fn phase_order(&self) -> u32 {
        (0..self.period())
            .map(|n| self.phase_turns(n).denom().to_u32().expect("small"))
            .fold(1, |acc, d| acc.lcm(&d))
    }

    fn check_grading(&self, grading: u32) -> Result<(), ThetaError> {
        let required = self.natural_grading();
        if !grading.is_multiple_of(required) {
            return Err(ThetaError::IncompatibleGrading {
                required,
                given: grading,
            });
        }
        Ok(())
    }

    /// Summation indices whose exponent lies in the window `e ≤ T`, with a
    /// margin of one on each side.
    fn index_range(&self, grading: u32, cutoff: i64) -> std::ops::RangeInclusive<i64> {
        let window = (cutoff.max(0) as f64) / (grading as f64 * self.scale as f64);
        let radius = window.sqrt().ceil() as i64 + 1;
        let centre = -(self.eps.to_f64_lossy() / 2.0).round() as i64;
        (centre - radius - 1)..=(centre + radius + 1)
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        self.numer().to_f64().unwrap_or(0.0) / self.denom().to_f64().unwrap_or(1.0)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", fmt_rational(&self.eps), fmt_rational(&self.epsp))?;
        if self.scale != 1 {
            write!(f, "({})", self.scale)?;
        }
        Ok(())
    }
}

fn exponent_numerator(r: &BigRational, grading: u32) -> i64 {
    let scaled = r * BigInt::from(grading);
    debug_assert!(scaled.is_integer(), "grading was checked");
    scaled.to_integer().to_i64().expect("exponent numerator fits in i64")
}

fn theta_sum(
    c: &Characteristic,
    grading: u32,
    cutoff: i64,
    weighted: bool,
) -> Result<QSeries, ThetaError> {
    c.check_grading(grading)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut terms = Vec::new();
    for n in c.index_range(grading, cutoff) {
        let e = exponent_numerator(&c.exponent(n), grading);
        if e > cutoff {
            continue;
        }
        let phase = root_of_unity(&c.phase_turns(n));
        let coeff = if weighted {
            let m = BigRational::from_integer(n.into()) + &c.eps * &half;
            phase.scalar_mul(&m)
        } else {
            phase
        };
        terms.push((e, coeff));
    }
    let order = c.phase_order();
    let terms = terms
        .into_iter()
        .map(|(e, coeff)| (e, coeff.embed(order).expect("phase order covers every summand")));
    Ok(QSeries::from_terms(grading, cutoff, terms))
}

/// `θ[ε;ε′](0, kτ) = Σ_n ρ(n) x^{k(n+ε/2)²}` with `ρ(n) = exp(πi(n+ε/2)ε′)`.
pub fn theta_constant(c: &Characteristic, grading: u32, cutoff: i64) -> Result<QSeries, ThetaError> {
    theta_sum(c, grading, cutoff, false)
}

/// `θ′[ε;ε′](0, kτ)/(2πi) = Σ_n (n+ε/2) ρ(n) x^{k(n+ε/2)²}`.
///
/// The ζ-derivative of the summand is `2πi(n+ε/2)` times the summand, so
/// the normalized derivative has coefficients in the same cyclotomic field.
pub fn theta_deriv_normalized(
    c: &Characteristic,
    grading: u32,
    cutoff: i64,
) -> Result<QSeries, ThetaError> {
    theta_sum(c, grading, cutoff, true)
}

/// The triple-product form of `θ[ε;ε′](0, kτ)`, built factor by factor.
pub fn triple_product_theta(
    c: &Characteristic,
    grading: u32,
    cutoff: i64,
) -> Result<QSeries, ThetaError> {
    c.check_grading(grading)?;
    let k = BigRational::from_integer(c.scale.into());
    let quarter = rat(1, 4);
    let half = rat(1, 2);
    let lead = &k * &c.eps * &c.eps * &quarter;
    let prefactor = root_of_unity(&(&c.eps * &c.epsp * &quarter));
    let plus = root_of_unity(&(&c.epsp * &half));
    let minus = root_of_unity(&(-&c.epsp * &half));
    let lead_e = exponent_numerator(&lead, grading);
    // When |ε| > 1 some factors carry negative exponents, and each such
    // multiplication lowers the known range; widen it up front to compensate.
    let mut loss = 0i64;
    let abs_eps = c.eps.abs();
    let mut n = 1i64;
    while BigRational::from_integer((2 * n - 1).into()) < abs_eps {
        let r = &k * (BigRational::from_integer((2 * n - 1).into()) - &abs_eps);
        loss -= exponent_numerator(&r, grading);
        n += 1;
    }
    let requested = cutoff;
    let cutoff = if cutoff >= EXACT { cutoff } else { cutoff.saturating_add(loss) };
    let mut acc = QSeries::monomial(prefactor, lead_e, grading, cutoff);
    // A factor 1 + c·u^e with e beyond this bound only touches unknown terms.
    let bound = cutoff - lead_e;
    let binomial = |coeff: CycloNumber, r: &BigRational| -> Option<QSeries> {
        let e = exponent_numerator(r, grading);
        if e > bound {
            return None;
        }
        Some(QSeries::from_terms(
            grading,
            EXACT,
            [(0, CycloNumber::one(1)), (e, coeff)],
        ))
    };
    let one = BigRational::one();
    let mut n = 1i64;
    loop {
        let nn = BigRational::from_integer(n.into());
        let two_n_minus_1 = &nn * BigInt::from(2) - &one;
        let factors = [
            binomial(-CycloNumber::one(1), &(&k * &nn * BigInt::from(2))),
            binomial(plus.clone(), &(&k * (&two_n_minus_1 + &c.eps))),
            binomial(minus.clone(), &(&k * (&two_n_minus_1 - &c.eps))),
        ];
        if factors.iter().all(Option::is_none) {
            break;
        }
        for f in factors.into_iter().flatten() {
            acc = acc.mul(&f)?;
        }
        n += 1;
    }
    Ok(acc.truncate(requested))
}

/// `q^p · Π_j Π_{n≥1} (1 − q^{m_j n})^{e_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(u32, i32)>,
    pub prefactor: BigRational,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(u32, i32)>, prefactor: BigRational) -> Self {
        EtaQuotientSpec { factors, prefactor }
    }

    /// `Π η(m_j τ)^{e_j}` with the prefactor `Σ e_j m_j / 24`.
    pub fn eta_product(factors: Vec<(u32, i32)>) -> Self {
        let p: i64 = factors.iter().map(|(m, e)| *m as i64 * *e as i64).sum();
        EtaQuotientSpec {
            factors,
            prefactor: rat(p, 24),
        }
    }

    /// Grading needed for the `x`-shift `2p`.
    pub fn natural_grading(&self) -> u32 {
        (&self.prefactor * BigInt::from(2))
            .denom()
            .to_u32()
            .expect("small prefactor denominator")
    }

    fn validate(&self) -> Result<(), ThetaError> {
        if self.factors.is_empty() {
            return Err(ThetaError::InvalidEtaQuotient("no factors".into()));
        }
        if self.factors.iter().any(|(m, _)| *m == 0) {
            return Err(ThetaError::InvalidEtaQuotient("factor scale must be positive".into()));
        }
        Ok(())
    }
}

/// Dense expansion of `Π_j Π_n (1 − q^{m_j n})^{e_j}` through `q^top`.
fn eta_product_dense(factors: &[(u32, i32)], top: usize) -> Vec<BigInt> {
    let mut a = vec![BigInt::zero(); top + 1];
    a[0] = BigInt::one();
    for &(m, e) in factors {
        let m = m as usize;
        for _ in 0..e.unsigned_abs() {
            let mut step = m;
            while step <= top {
                if e > 0 {
                    for j in (step..=top).rev() {
                        let t = a[j - step].clone();
                        a[j] -= t;
                    }
                } else {
                    for j in step..=top {
                        let t = a[j - step].clone();
                        a[j] += t;
                    }
                }
                step += m;
            }
        }
    }
    a
}

fn q_window(grading: u32, cutoff: i64, shift: i64) -> Option<usize> {
    // q^j sits at x-exponent numerator shift + 2jD.
    let room = cutoff - shift;
    if room < 0 {
        None
    } else {
        Some((room / (2 * grading as i64)) as usize)
    }
}

fn dense_to_series(dense: Vec<BigInt>, grading: u32, cutoff: i64, shift: i64) -> QSeries {
    let step = 2 * grading as i64;
    let terms = dense
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| {
            (
                shift + step * j as i64,
                CycloNumber::from_rational(1, BigRational::from_integer(v)),
            )
        });
    QSeries::from_terms(grading, cutoff, terms)
}

/// Expands an eta quotient as a series in `x`, with `q = x²`.
pub fn eta_quotient(spec: &EtaQuotientSpec, grading: u32, cutoff: i64) -> Result<QSeries, ThetaError> {
    spec.validate()?;
    let required = spec.natural_grading();
    if !grading.is_multiple_of(required) {
        return Err(ThetaError::IncompatibleGrading {
            required,
            given: grading,
        });
    }
    let shift = exponent_numerator(&(&spec.prefactor * BigInt::from(2)), grading);
    let Some(top) = q_window(grading, cutoff, shift) else {
        return Ok(QSeries::zero(grading, 1, cutoff));
    };
    Ok(dense_to_series(eta_product_dense(&spec.factors, top), grading, cutoff, shift))
}

/// `Π_{n≥0} (1 − q^{3n+1})(1 − q^{3n+2})` computed as `Π(1−qⁿ) · (Π(1−q³ⁿ))⁻¹`.
pub fn farkas_product(grading: u32, cutoff: i64) -> Result<QSeries, ThetaError> {
    let Some(top) = q_window(grading, cutoff, 0) else {
        return Ok(QSeries::zero(grading, 1, cutoff));
    };
    let t = top as i64;
    // Work in q (grading 1 over q) and map q^j to x^{2j} at the end.
    let euler = |m: u32| dense_to_series(eta_product_dense(&[(m, 1)], top), 1, 2 * t, 0);
    let num = euler(1);
    let den = euler(3).invert()?;
    let q_series = num.mul(&den)?.truncate(2 * t);
    let regraded = q_series.regrade(grading)?;
    Ok(QSeries::from_terms(
        grading,
        cutoff,
        regraded.terms().map(|(e, c)| (e, c.clone())),
    ))
}

/// The two-factor product expanded directly; an oracle for [`farkas_product`].
pub fn farkas_product_direct(grading: u32, cutoff: i64) -> QSeries {
    let Some(top) = q_window(grading, cutoff, 0) else {
        return QSeries::zero(grading, 1, cutoff);
    };
    let mut a = vec![BigInt::zero(); top + 1];
    a[0] = BigInt::one();
    let mut step = 1;
    while step <= top {
        if step % 3 != 0 {
            for j in (step..=top).rev() {
                let t = a[j - step].clone();
                a[j] -= t;
            }
        }
        step += 1;
    }
    dense_to_series(a, grading, cutoff, 0)
}

/// The Euler product `Π(1 − q^{kn})` in `x`.
pub fn euler_product(k: u32, grading: u32, cutoff: i64) -> Result<QSeries, ThetaError> {
    eta_quotient(&EtaQuotientSpec::new(vec![(k, 1)], BigRational::zero()), grading, cutoff)
}
