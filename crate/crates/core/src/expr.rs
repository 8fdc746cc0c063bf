//! Expression trees over series atoms and cyclotomic constants.
//!
//! The same tree is produced by the DSL parser and by the Rust builders used
//! for the registry, and [`fmt::Display`] prints it back in DSL syntax so
//! that parsing the printed text reproduces the tree exactly.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{self, LambertVariant};
use crate::cyclotomic::CycloNumber;
use crate::numeric::{self, NumericError};
use crate::qseries::{QSeries, QSeriesError};
use crate::thetaforms::{self, rat, Characteristic, EtaQuotientSpec, ThetaError};

/// Named generating functions with closed-form coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GfKind {
    /// `Σ S₂(n) xⁿ`
    S2,
    /// `Σ S₁,₂(n) xⁿ`
    S12,
    /// `Σ (−1)ⁿ(2n+1) q^{t_n}`
    Cube,
    /// `Σ (−2/n) n q^{t_{(n−1)/2}}`
    Kron2,
    /// `Σ (−2/n) n q^{n²/8}`
    Kron2Sq,
}

impl GfKind {
    pub const ALL: [GfKind; 5] = [Self::S2, Self::S12, Self::Cube, Self::Kron2, Self::Kron2Sq];

    pub fn name(self) -> &'static str {
        match self {
            Self::S2 => "s2",
            Self::S12 => "s12",
            Self::Cube => "cube",
            Self::Kron2 => "kron2",
            Self::Kron2Sq => "kron2sq",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Theta(Characteristic),
    /// `θ′/(2πi)`
    DTheta(Characteristic),
    /// `η(kτ)`
    Eta(u32),
    EtaQ(EtaQuotientSpec),
    FarkasProd,
    Lambert(LambertVariant),
    Gf(GfKind),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Const {
    /// Nonnegative by convention; negative values are written with [`Expr::Neg`].
    Rational(BigRational),
    Zeta { order: u32, power: i64 },
    Sqrt2,
    Sqrt3,
    I,
}

impl Const {
    pub fn value(&self) -> CycloNumber {
        match self {
            Const::Rational(r) => CycloNumber::from_rational(1, r.clone()),
            Const::Zeta { order, power } => CycloNumber::from_root_power(*order, *power),
            Const::Sqrt2 => CycloNumber::sqrt2(),
            Const::Sqrt3 => CycloNumber::sqrt3(),
            Const::I => CycloNumber::i(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom(Atom),
    Const(Const),
    /// The first term always carries [`Sign::Plus`].
    Sum(Vec<(Sign, Expr)>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

/// `lhs == rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Identity {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Identity { lhs, rhs }
    }

    /// `lhs − rhs`, the expression that must vanish.
    pub fn difference(&self) -> Expr {
        if self.rhs.is_literal_zero() {
            self.lhs.clone()
        } else {
            Expr::Sum(vec![(Sign::Plus, self.lhs.clone()), (Sign::Minus, self.rhs.clone())])
        }
    }

    pub fn natural_grading(&self) -> u32 {
        self.lhs.natural_grading().lcm(&self.rhs.natural_grading())
    }

    pub fn order(&self) -> u32 {
        self.lhs.order().lcm(&self.rhs.order())
    }

    /// Flips the sign of the last top-level term that is not structurally
    /// zero; `None` when every term is.
    pub fn sign_flip_mutation(&self) -> Option<Identity> {
        let mut out = self.clone();
        if flip_last(&mut out.rhs) || flip_last(&mut out.lhs) {
            Some(out)
        } else {
            None
        }
    }
}

fn flip_last(e: &mut Expr) -> bool {
    match e {
        Expr::Sum(terms) => {
            for idx in (0..terms.len()).rev() {
                if terms[idx].1.is_structurally_zero() {
                    continue;
                }
                if idx == 0 {
                    let t = terms[0].1.clone();
                    terms[0].1 = -t;
                } else {
                    terms[idx].0 = match terms[idx].0 {
                        Sign::Plus => Sign::Minus,
                        Sign::Minus => Sign::Plus,
                    };
                }
                return true;
            }
            false
        }
        other if other.is_structurally_zero() => false,
        other => {
            let t = other.clone();
            *other = -t;
            true
        }
    }
}

fn is_odd_integer(r: &BigRational) -> bool {
    r.is_integer() && r.numer().is_odd()
}

fn is_even_integer(r: &BigRational) -> bool {
    r.is_integer() && r.numer().is_even()
}

impl Expr {
    pub fn theta(c: Characteristic) -> Expr {
        Expr::Atom(Atom::Theta(c))
    }

    pub fn dtheta(c: Characteristic) -> Expr {
        Expr::Atom(Atom::DTheta(c))
    }

    /// A rational constant; negative values become `Neg` of the magnitude.
    pub fn rational(r: BigRational) -> Expr {
        if r.is_negative() {
            -Expr::Const(Const::Rational(-r))
        } else {
            Expr::Const(Const::Rational(r))
        }
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn zeta(order: u32, power: i64) -> Expr {
        Expr::Const(Const::Zeta { order, power })
    }

    pub fn pow(self, n: u32) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn is_literal_zero(&self) -> bool {
        matches!(self, Expr::Const(Const::Rational(r)) if r.is_zero())
    }

    /// True when the expression vanishes identically for a structural
    /// reason: `θ` with both entries odd integers, `θ′` with both even.
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            Expr::Atom(Atom::Theta(c)) => is_odd_integer(&c.eps) && is_odd_integer(&c.epsp),
            Expr::Atom(Atom::DTheta(c)) => is_even_integer(&c.eps) && is_even_integer(&c.epsp),
            Expr::Atom(_) => false,
            Expr::Const(c) => c.value().is_zero(),
            Expr::Sum(terms) => terms.iter().all(|(_, t)| t.is_structurally_zero()),
            Expr::Product(fs) => fs.iter().any(Expr::is_structurally_zero),
            Expr::Pow(b, n) => *n > 0 && b.is_structurally_zero(),
            Expr::Neg(b) => b.is_structurally_zero(),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Expr::Atom(a) => {
                if !out.contains(&a) {
                    out.push(a)
                }
            }
            Expr::Const(_) => {}
            Expr::Sum(ts) => ts.iter().for_each(|(_, t)| t.collect_atoms(out)),
            Expr::Product(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            Expr::Pow(b, _) | Expr::Neg(b) => b.collect_atoms(out),
        }
    }

    fn consts(&self, out: &mut Vec<Const>) {
        match self {
            Expr::Atom(_) => {}
            Expr::Const(c) => out.push(c.clone()),
            Expr::Sum(ts) => ts.iter().for_each(|(_, t)| t.consts(out)),
            Expr::Product(fs) => fs.iter().for_each(|f| f.consts(out)),
            Expr::Pow(b, _) | Expr::Neg(b) => b.consts(out),
        }
    }

    /// Smallest grading that represents every atom's exponents.
    pub fn natural_grading(&self) -> u32 {
        self.atoms().into_iter().map(Atom::natural_grading).fold(1, |a, b| a.lcm(&b))
    }

    /// Cyclotomic order of every phase and constant in the expression.
    pub fn order(&self) -> u32 {
        let mut consts = Vec::new();
        self.consts(&mut consts);
        let from_atoms = self.atoms().into_iter().map(Atom::order).fold(1, |a, b| a.lcm(&b));
        consts
            .iter()
            .map(|c| c.value().minimal_form().order())
            .fold(from_atoms, |a, b| a.lcm(&b))
    }
}

impl Atom {
    pub fn natural_grading(&self) -> u32 {
        match self {
            Atom::Theta(c) | Atom::DTheta(c) => c.natural_grading(),
            Atom::Eta(k) => EtaQuotientSpec::eta_product(vec![(*k, 1)]).natural_grading(),
            Atom::EtaQ(spec) => spec.natural_grading(),
            Atom::FarkasProd | Atom::Lambert(_) => 1,
            Atom::Gf(GfKind::Kron2Sq) => 4,
            Atom::Gf(_) => 1,
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Atom::Theta(c) | Atom::DTheta(c) => c.phase_order(),
            Atom::Lambert(LambertVariant::Half) => 4,
            Atom::Lambert(_) => 8,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Series(#[from] QSeriesError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{atom} needs a grading divisible by {required}, but the identity uses {given}")]
    Grading { atom: String, required: u32, given: u32 },
}

/// Evaluates expressions to truncated series at a fixed grading and cutoff,
/// building every atom once.
pub struct SeriesEvaluator {
    grading: u32,
    cutoff: i64,
    cache: HashMap<Atom, QSeries>,
}

impl SeriesEvaluator {
    pub fn new(grading: u32, cutoff: i64) -> Self {
        SeriesEvaluator {
            grading,
            cutoff,
            cache: HashMap::new(),
        }
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn atom(&mut self, a: &Atom) -> Result<QSeries, EvalError> {
        if let Some(s) = self.cache.get(a) {
            return Ok(s.clone());
        }
        let (d, t) = (self.grading, self.cutoff);
        let required = a.natural_grading();
        if d % required != 0 {
            return Err(EvalError::Grading {
                atom: a.to_string(),
                required,
                given: d,
            });
        }
        let s = match a {
            Atom::Theta(c) => thetaforms::theta_constant(c, d, t)?,
            Atom::DTheta(c) => thetaforms::theta_deriv_normalized(c, d, t)?,
            Atom::Eta(k) => thetaforms::eta_quotient(&EtaQuotientSpec::eta_product(vec![(*k, 1)]), d, t)?,
            Atom::EtaQ(spec) => thetaforms::eta_quotient(spec, d, t)?,
            Atom::FarkasProd => thetaforms::farkas_product(d, t)?,
            Atom::Lambert(v) => arith::lambert_logderiv_series(*v, d, t),
            Atom::Gf(GfKind::S2) => arith::s2_series(d, t),
            Atom::Gf(GfKind::S12) => arith::s12_series(d, t),
            Atom::Gf(GfKind::Cube) => arith::cube_series(d, t),
            Atom::Gf(GfKind::Kron2) => arith::kron2_series(d, t),
            Atom::Gf(GfKind::Kron2Sq) => arith::kron2sq_series(d, t),
        };
        self.cache.insert(a.clone(), s.clone());
        Ok(s)
    }

    pub fn eval(&mut self, e: &Expr) -> Result<QSeries, EvalError> {
        Ok(match e {
            Expr::Atom(a) => self.atom(a)?,
            Expr::Const(c) => QSeries::constant(c.value(), self.grading),
            Expr::Sum(terms) => {
                let mut acc: Option<QSeries> = None;
                for (sign, t) in terms {
                    let v = self.eval(t)?;
                    acc = Some(match (acc, sign) {
                        (None, Sign::Plus) => v,
                        (None, Sign::Minus) => v.neg(),
                        (Some(a), Sign::Plus) => a.add(&v)?,
                        (Some(a), Sign::Minus) => a.sub(&v)?,
                    });
                }
                acc.unwrap_or_else(|| QSeries::zero(self.grading, 1, self.cutoff))
            }
            Expr::Product(fs) => {
                let mut acc = QSeries::one(self.grading);
                for f in fs {
                    acc = acc.mul(&self.eval(f)?)?;
                }
                acc
            }
            Expr::Pow(b, n) => self.eval(b)?.pow(*n),
            Expr::Neg(b) => self.eval(b)?.neg(),
        })
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

impl Atom {
    /// Double-precision value at `τ`, from the defining sums and products.
    pub fn point(&self, tau: Complex64) -> Result<Complex64, NumericError> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Atom::Theta(c) => numeric::theta_point(to_f64(&c.eps), to_f64(&c.epsp), zero, tau * c.scale as f64, numeric::TOL),
            Atom::DTheta(c) => numeric::theta_deriv_normalized_point(to_f64(&c.eps), to_f64(&c.epsp), tau * c.scale as f64),
            Atom::Eta(k) => numeric::eta_quotient_point(&[(*k, 1)], *k as f64 / 24.0, tau),
            Atom::EtaQ(spec) => numeric::eta_quotient_point(&spec.factors, to_f64(&spec.prefactor), tau),
            Atom::FarkasProd => numeric::farkas_point(tau),
            Atom::Lambert(v) => numeric::lambert_point(*v, tau),
            Atom::Gf(k) => Ok(numeric::gf_point(k.name(), tau)?.expect("every gf kind has a numeric form")),
        }
    }
}

impl Expr {
    pub fn point(&self, tau: Complex64) -> Result<Complex64, NumericError> {
        Ok(match self {
            Expr::Atom(a) => a.point(tau)?,
            Expr::Const(c) => c.value().to_complex(),
            Expr::Sum(ts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (s, t) in ts {
                    let v = t.point(tau)?;
                    acc += if *s == Sign::Plus { v } else { -v };
                }
                acc
            }
            Expr::Product(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.point(tau)?;
                }
                acc
            }
            Expr::Pow(b, n) => b.point(tau)?.powu(*n),
            Expr::Neg(b) => -b.point(tau)?,
        })
    }

    /// `Σ |term|` over the top-level terms, the scale for relative residuals.
    pub fn magnitude(&self, tau: Complex64) -> Result<f64, NumericError> {
        match self {
            Expr::Sum(ts) => ts.iter().map(|(_, t)| t.point(tau).map(|v| v.norm())).sum(),
            other => Ok(other.point(tau)?.norm()),
        }
    }
}

const RESIDUAL_FLOOR: f64 = 1e-6;

impl Identity {
    /// `|lhs − rhs| / max(Σ|terms|, 10⁻⁶)` at `τ`. The floor keeps sides
    /// that vanish identically from dividing rounding noise by itself.
    pub fn residual(&self, tau: Complex64) -> Result<f64, NumericError> {
        let diff = self.lhs.point(tau)? - self.rhs.point(tau)?;
        let scale = self.lhs.magnitude(tau)? + self.rhs.magnitude(tau)?;
        Ok(diff.norm() / scale.max(RESIDUAL_FLOOR))
    }
}

// ---------------------------------------------------------------------------
// Builders

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        push_term(self, Sign::Plus, rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        push_term(self, Sign::Minus, rhs)
    }
}

fn push_term(lhs: Expr, sign: Sign, rhs: Expr) -> Expr {
    match lhs {
        Expr::Sum(mut ts) => {
            ts.push((sign, rhs));
            Expr::Sum(ts)
        }
        other => Expr::Sum(vec![(Sign::Plus, other), (sign, rhs)]),
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match self {
            Expr::Product(mut fs) => {
                fs.push(rhs);
                Expr::Product(fs)
            }
            other => Expr::Product(vec![other, rhs]),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Compact constructors used by the registry.
pub mod build {
    use super::*;

    /// `θ[ε;ε′](0, τ)` with `ε = e.0/e.1`, `ε′ = ep.0/ep.1`.
    pub fn th(e: (i64, i64), ep: (i64, i64)) -> Expr {
        Expr::theta(Characteristic::ratio(e, ep))
    }

    /// `θ[ε;ε′](0, kτ)`.
    pub fn thk(e: (i64, i64), ep: (i64, i64), k: u32) -> Expr {
        Expr::theta(Characteristic::ratio(e, ep).at_scale(k))
    }

    /// `θ′[ε;ε′](0, τ)/(2πi)`.
    pub fn dth(e: (i64, i64), ep: (i64, i64)) -> Expr {
        Expr::dtheta(Characteristic::ratio(e, ep))
    }

    /// `θ[0;0](0, kτ)`.
    pub fn t00(k: u32) -> Expr {
        thk((0, 1), (0, 1), k)
    }

    /// `θ[1;0](0, kτ)`.
    pub fn t10(k: u32) -> Expr {
        thk((1, 1), (0, 1), k)
    }

    /// `θ[0;1](0, kτ)`.
    pub fn t01(k: u32) -> Expr {
        thk((0, 1), (1, 1), k)
    }

    pub fn q(n: i64, d: i64) -> Expr {
        Expr::rational(rat(n, d))
    }

    pub fn n(v: i64) -> Expr {
        Expr::int(v)
    }

    pub fn i() -> Expr {
        Expr::Const(Const::I)
    }

    pub fn sqrt2() -> Expr {
        Expr::Const(Const::Sqrt2)
    }

    pub fn sqrt3() -> Expr {
        Expr::Const(Const::Sqrt3)
    }

    pub fn z(order: u32, power: i64) -> Expr {
        Expr::zeta(order, power)
    }

    pub fn etaq(factors: &[(u32, i32)], pre: (i64, i64)) -> Expr {
        Expr::Atom(Atom::EtaQ(EtaQuotientSpec::new(factors.to_vec(), rat(pre.0, pre.1))))
    }

    pub fn gf(kind: GfKind) -> Expr {
        Expr::Atom(Atom::Gf(kind))
    }

    pub fn lambert(v: LambertVariant) -> Expr {
        Expr::Atom(Atom::Lambert(v))
    }

    pub fn farkas() -> Expr {
        Expr::Atom(Atom::FarkasProd)
    }

    pub fn prod<I: IntoIterator<Item = Expr>>(fs: I) -> Expr {
        Expr::Product(fs.into_iter().collect())
    }
}

// ---------------------------------------------------------------------------
// Printing

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let char_text = |name: &str, c: &Characteristic| {
            let mut s = format!("{name}[{},{}]", fmt_rational(&c.eps), fmt_rational(&c.epsp));
            if c.scale != 1 {
                s.push_str(&format!("({})", c.scale));
            }
            s
        };
        match self {
            Atom::Theta(c) => f.write_str(&char_text("theta", c)),
            Atom::DTheta(c) => f.write_str(&char_text("dtheta", c)),
            Atom::Eta(k) => write!(f, "eta({k})"),
            Atom::EtaQ(spec) => {
                let parts: Vec<String> = spec.factors.iter().map(|(m, e)| format!("({m},{e})")).collect();
                write!(f, "etaq{{{}; {}}}", parts.join(","), fmt_rational(&spec.prefactor))
            }
            Atom::FarkasProd => f.write_str("farkasprod"),
            Atom::Lambert(v) => write!(f, "lambert({})", v.name()),
            Atom::Gf(k) => write!(f, "gf({})", k.name()),
        }
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Rational(r) => f.write_str(&fmt_rational(r)),
            Const::Zeta { order, power: 1 } => write!(f, "zeta({order})"),
            Const::Zeta { order, power } => write!(f, "zeta({order})^{power}"),
            Const::Sqrt2 => f.write_str("sqrt2"),
            Const::Sqrt3 => f.write_str("sqrt3"),
            Const::I => f.write_str("I"),
        }
    }
}

/// Text for a position that only admits a primary (operand of unary minus or
/// base of a power).
fn primary_text(e: &Expr) -> String {
    match e {
        Expr::Atom(_) | Expr::Neg(_) => e.to_string(),
        Expr::Const(Const::Rational(r)) if r.is_integer() => e.to_string(),
        Expr::Const(Const::Sqrt2 | Const::Sqrt3 | Const::I) => e.to_string(),
        _ => format!("({e})"),
    }
}

fn factor_text(e: &Expr) -> String {
    match e {
        Expr::Sum(_) | Expr::Product(_) => format!("({e})"),
        _ => e.to_string(),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Sum(terms) => {
                for (idx, (sign, t)) in terms.iter().enumerate() {
                    let text = match t {
                        Expr::Sum(_) => format!("({t})"),
                        _ => t.to_string(),
                    };
                    match (idx, sign) {
                        (0, Sign::Plus) => f.write_str(&text)?,
                        (0, Sign::Minus) => write!(f, "-{}", primary_text(t))?,
                        (_, Sign::Plus) => write!(f, " + {text}")?,
                        (_, Sign::Minus) => write!(f, " - {text}")?,
                    }
                }
                Ok(())
            }
            Expr::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(factor_text).collect();
                f.write_str(&parts.join(" * "))
            }
            Expr::Pow(b, n) => {
                let base = match b.as_ref() {
                    Expr::Neg(_) => format!("({b})"),
                    other => primary_text(other),
                };
                write!(f, "{base}^{n}")
            }
            Expr::Neg(b) => write!(f, "-{}", primary_text(b)),
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} == {}", self.lhs, self.rhs)
    }
}
