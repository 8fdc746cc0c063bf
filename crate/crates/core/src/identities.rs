//! The identity registry and the exact and numeric verifiers.
//!
//! Every identity is stored division-free: quotients are cross-multiplied,
//! and derivatives appear only as `θ′/(2πi)`, which turns factors such as `−π`
//! into `i/2`. When cross-multiplying by a denominator, the record carries
//! that denominator as a guard, and the verifier checks that the guard series
//! does not vanish on the window.
//!
//! A record with [`Expectation::Erratum`] holds a reading that the exact
//! check refutes. Such a record passes when the refutation is found.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::LambertVariant;
use crate::cyclotomic::CycloNumber;
use crate::expr::build::*;
use crate::expr::{fmt_rational, EvalError, Expr, GfKind, Identity, SeriesEvaluator};
use crate::numeric::{self, EllipticQuotient, EllipticVariant, NumericError, SamplePlan};
use crate::thetaforms::{rat, Characteristic};

/// Window length, in powers of `x`, used when a record does not override it.
pub const DEFAULT_WINDOW: u32 = 100;
/// Relative tolerance for numeric checks of exact-form records.
pub const FORM_TOL: f64 = 1e-9;
/// Tolerance for the elliptic-constancy checks.
pub const ELLIPTIC_TOL: f64 = 1e-8;
/// Tolerance for the scaled determinant check.
pub const DET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    /// The stored reading is expected to be false.
    Erratum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericCheck {
    /// A two-variable quotient that must be independent of `ζ`.
    Elliptic(EllipticVariant),
    /// `det A(τ) = 0` for the 4×4 skew matrix of theta constants.
    DetA,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Form(Identity),
    Numeric(NumericCheck),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRecord {
    pub name: String,
    /// Short description of where the statement comes from.
    pub anchor: String,
    pub body: Body,
    pub grading: u32,
    pub window: u32,
    /// Series that must be nonzero on the window.
    pub guards: Vec<Expr>,
    pub expectation: Expectation,
    /// Explicit negative control; when absent the last top-level term of
    /// the identity has its sign flipped.
    pub mutation: Option<Identity>,
    pub comment: String,
}

impl IdentityRecord {
    /// A form record with its natural grading and the default window.
    pub fn form(name: impl Into<String>, anchor: impl Into<String>, lhs: Expr, rhs: Expr) -> Self {
        let identity = Identity::new(lhs, rhs);
        IdentityRecord {
            name: name.into(),
            anchor: anchor.into(),
            grading: identity.natural_grading(),
            body: Body::Form(identity),
            window: DEFAULT_WINDOW,
            guards: Vec::new(),
            expectation: Expectation::Holds,
            mutation: None,
            comment: String::new(),
        }
    }

    pub fn numeric(name: impl Into<String>, anchor: impl Into<String>, check: NumericCheck) -> Self {
        IdentityRecord {
            name: name.into(),
            anchor: anchor.into(),
            body: Body::Numeric(check),
            grading: 1,
            window: DEFAULT_WINDOW,
            guards: Vec::new(),
            expectation: Expectation::Holds,
            mutation: None,
            comment: String::new(),
        }
    }

    pub fn with_guard(mut self, g: Expr) -> Self {
        self.guards.push(g);
        self
    }

    pub fn with_grading(mut self, d: u32) -> Self {
        self.grading = d;
        self
    }

    pub fn with_window(mut self, w: u32) -> Self {
        self.window = w;
        self
    }

    pub fn with_mutation(mut self, m: Identity) -> Self {
        self.mutation = Some(m);
        self
    }

    pub fn with_comment(mut self, c: impl Into<String>) -> Self {
        self.comment = c.into();
        self
    }

    pub fn erratum(mut self) -> Self {
        self.expectation = Expectation::Erratum;
        self
    }

    /// The mode `verify_all` runs the record in. Form records also accept
    /// [`verify_numeric`].
    pub fn mode(&self) -> Mode {
        match self.body {
            Body::Form(_) => Mode::Exact,
            Body::Numeric(_) => Mode::Numeric,
        }
    }

    pub fn identity(&self) -> Option<&Identity> {
        match &self.body {
            Body::Form(id) => Some(id),
            Body::Numeric(_) => None,
        }
    }

    /// The negative-control identity, for form records that are claimed to hold.
    pub fn mutated_identity(&self) -> Option<Identity> {
        match (&self.body, self.expectation) {
            (Body::Form(id), Expectation::Holds) => self.mutation.clone().or_else(|| id.sign_flip_mutation()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(#[from] EvalError),
    #[error("guard {guard} vanishes on the window up to x^{cutoff}")]
    GuardVanishes { guard: String, cutoff: String },
    #[error("record {0} has no exact form")]
    NotExact(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("unknown identity {0}")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub mode: Mode,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_bad_exponent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_residual: Option<f64>,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<String>,
    /// Coefficient at `first_bad_exponent`.
    #[serde(skip)]
    pub first_bad_coefficient: Option<CycloNumber>,
    /// Set when the record is an erratum reading.
    #[serde(skip)]
    pub erratum: bool,
    /// Set when the record could not be evaluated.
    #[serde(skip)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub records: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn new(records: Vec<VerificationReport>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        SuiteReport {
            total: records.len(),
            passed,
            failed: records.len() - passed,
            records,
        }
    }
}

fn exponent_text(e: i64, grading: u32) -> String {
    fmt_rational(&BigRational::new(e.into(), i64::from(grading).into()))
}

/// Evaluates `identity` exactly at `grading` up to `x^window`.
fn check_identity(
    name: &str,
    identity: &Identity,
    guards: &[Expr],
    grading: u32,
    window: u32,
    expectation: Expectation,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let t = i64::from(window) * i64::from(grading);
    let mut ev = SeriesEvaluator::new(grading, t);
    for g in guards {
        let s = ev.eval(g)?;
        if s.is_empty() {
            return Err(VerifyError::GuardVanishes {
                guard: g.to_string(),
                cutoff: exponent_text(s.cutoff().min(t), grading),
            });
        }
    }
    let diff = ev.eval(&identity.difference())?;
    let known = diff.cutoff().min(t);
    let bad = diff.first_nonzero().map(|(e, c)| (e, c.clone()));
    let holds = bad.is_none();
    let pass = match expectation {
        Expectation::Holds => holds,
        Expectation::Erratum => !holds,
    };
    Ok(VerificationReport {
        name: name.to_string(),
        mode: Mode::Exact,
        pass,
        first_bad_exponent: bad.as_ref().map(|(e, _)| exponent_text(*e, grading)),
        // A false erratum still needs a failure witness: the reading holds exactly.
        worst_residual: (!pass && holds).then_some(0.0),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        cutoff: Some(exponent_text(known, grading)),
        first_bad_coefficient: bad.map(|(_, c)| c),
        erratum: expectation == Expectation::Erratum,
        error: None,
    })
}

/// Exact verification on the window `x^window` (the record's own window when
/// `None`).
pub fn verify_exact(r: &IdentityRecord, window: Option<u32>) -> Result<VerificationReport, VerifyError> {
    let id = r.identity().ok_or_else(|| VerifyError::NotExact(r.name.clone()))?;
    check_identity(&r.name, id, &r.guards, r.grading, window.unwrap_or(r.window), r.expectation)
}

/// Exact check of the record's negative control, stated as a claim that
/// holds; a discriminating harness reports `pass = false`.
pub fn verify_mutation_exact(r: &IdentityRecord, window: Option<u32>) -> Result<VerificationReport, VerifyError> {
    let m = r.mutated_identity().ok_or_else(|| VerifyError::NotExact(r.name.clone()))?;
    let mut g = r.grading;
    let natural = m.natural_grading();
    if !g.is_multiple_of(natural) {
        g = num_integer::lcm(g, natural);
    }
    check_identity(
        &format!("{}~mutated", r.name),
        &m,
        &[],
        g,
        window.unwrap_or(r.window),
        Expectation::Holds,
    )
}

fn numeric_report(name: &str, worst: f64, tol: f64, expectation: Expectation, start: Instant) -> VerificationReport {
    let holds = worst < tol;
    VerificationReport {
        name: name.to_string(),
        mode: Mode::Numeric,
        pass: match expectation {
            Expectation::Holds => holds,
            Expectation::Erratum => !holds,
        },
        first_bad_exponent: None,
        worst_residual: Some(worst),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        cutoff: None,
        first_bad_coefficient: None,
        erratum: expectation == Expectation::Erratum,
        error: None,
    }
}

fn det_taus(plan: &SamplePlan) -> Vec<Complex64> {
    let mut taus = vec![Complex64::new(0.0, 1.0)];
    taus.extend(plan.samples().into_iter().map(|(t, _)| t));
    taus
}

fn form_residual(id: &Identity, plan: &SamplePlan) -> Result<f64, VerifyError> {
    let mut worst = 0.0f64;
    for (tau, _) in plan.samples() {
        worst = worst.max(id.residual(tau)?);
    }
    Ok(worst)
}

fn default_tol(r: &IdentityRecord) -> f64 {
    match r.body {
        Body::Form(_) => FORM_TOL,
        Body::Numeric(NumericCheck::Elliptic(_)) => ELLIPTIC_TOL,
        Body::Numeric(NumericCheck::DetA) => DET_TOL,
    }
}

/// Numeric verification at the plan's sample points: the worst relative
/// residual must stay below `tol` (the record's default when `None`).
pub fn verify_numeric(r: &IdentityRecord, plan: &SamplePlan, tol: Option<f64>) -> Result<VerificationReport, VerifyError> {
    plan.validate()?;
    let start = Instant::now();
    let tol = tol.unwrap_or_else(|| default_tol(r));
    let worst = match &r.body {
        Body::Form(id) => form_residual(id, plan)?,
        Body::Numeric(NumericCheck::Elliptic(v)) => numeric::check_elliptic_constancy(*v, plan)?.worst(),
        Body::Numeric(NumericCheck::DetA) => {
            let mut worst = 0.0f64;
            for tau in det_taus(plan) {
                worst = worst.max(numeric::det_a(tau)?.relative);
            }
            worst
        }
    };
    Ok(numeric_report(&r.name, worst, tol, r.expectation, start))
}

/// Numeric check of the record's negative control.
pub fn verify_mutation_numeric(r: &IdentityRecord, plan: &SamplePlan, tol: Option<f64>) -> Result<VerificationReport, VerifyError> {
    plan.validate()?;
    let start = Instant::now();
    let tol = tol.unwrap_or_else(|| default_tol(r));
    let worst = match &r.body {
        Body::Form(_) => {
            let m = r.mutated_identity().ok_or_else(|| VerifyError::NotExact(r.name.clone()))?;
            form_residual(&m, plan)?
        }
        Body::Numeric(NumericCheck::Elliptic(v)) => {
            numeric::check_elliptic_constancy_with(&EllipticQuotient::mutated(*v), plan)?.worst()
        }
        Body::Numeric(NumericCheck::DetA) => {
            let mut worst = 0.0f64;
            for tau in det_taus(plan) {
                worst = worst.max(numeric::det_a_mutated(tau)?.relative);
            }
            worst
        }
    };
    Ok(numeric_report(&format!("{}~mutated", r.name), worst, tol, Expectation::Holds, start))
}

/// Runs the record in its declared mode with default settings; errors
/// become failing reports.
pub fn verify_record(r: &IdentityRecord) -> VerificationReport {
    let start = Instant::now();
    let result = match r.mode() {
        Mode::Exact => verify_exact(r, None),
        Mode::Numeric => verify_numeric(r, &SamplePlan::default(), None),
    };
    result.unwrap_or_else(|e| VerificationReport {
        name: r.name.clone(),
        mode: r.mode(),
        pass: false,
        first_bad_exponent: None,
        worst_residual: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        cutoff: None,
        first_bad_coefficient: None,
        erratum: r.expectation == Expectation::Erratum,
        error: Some(e.to_string()),
    })
}

/// Records whose names match the glob `pattern` (all records for `None`).
pub fn select(pattern: Option<&str>) -> Vec<&'static IdentityRecord> {
    let pat = match pattern.map(glob::Pattern::new) {
        None => None,
        Some(Ok(p)) => Some(p),
        Some(Err(_)) => return Vec::new(),
    };
    let mut out: Vec<_> = registry().iter().filter(|r| pat.as_ref().is_none_or(|p| p.matches(&r.name))).collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Worker count for parallel verification, from `THETA_CLI_THREADS`.
pub fn thread_count() -> Option<usize> {
    std::env::var("THETA_CLI_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n| n > 0)
}

/// Runs every matching record in parallel; reports are sorted by name.
pub fn verify_all(pattern: Option<&str>) -> Vec<VerificationReport> {
    let records = select(pattern);
    let run = || records.par_iter().map(|r| verify_record(r)).collect::<Vec<_>>();
    let mut out = match rayon::ThreadPoolBuilder::new().num_threads(thread_count().unwrap_or(0)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

pub fn find(name: &str) -> Result<&'static IdentityRecord, VerifyError> {
    registry().iter().find(|r| r.name == name).ok_or_else(|| VerifyError::Unknown(name.to_string()))
}

// ---------------------------------------------------------------------------
// The registry

/// All registered records, in registration order.
pub fn registry() -> &'static [IdentityRecord] {
    static REGISTRY: OnceLock<Vec<IdentityRecord>> = OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

fn a() -> Expr {
    th((1, 1), (1, 4))
}

fn b() -> Expr {
    th((1, 1), (3, 4))
}

fn h() -> Expr {
    th((1, 1), (1, 2))
}

fn da() -> Expr {
    dth((1, 1), (1, 4))
}

fn db() -> Expr {
    dth((1, 1), (3, 4))
}

/// `θ²[0;0](4τ) + 3θ²[1;0](4τ)`
fn quad_plus() -> Expr {
    t00(4).pow(2) + n(3) * t10(4).pow(2)
}

/// `θ[1;0](4τ)θ[0;1](4τ)(θ²[0;0](4τ) + 3θ²[1;0](4τ))`
fn k_term() -> Expr {
    prod([t10(4), t01(4), quad_plus()])
}

/// `Σ c_j θ⁴[ε; (2j+1)/4]` over `j = 0..4`.
fn quartic_combination(eps: (i64, i64), coeffs: [Option<i64>; 4], signs: [bool; 4]) -> Expr {
    let mut out: Option<Expr> = None;
    for (j, (c, minus)) in coeffs.into_iter().zip(signs).enumerate() {
        let t = th(eps, (2 * j as i64 + 1, 4)).pow(4);
        let term = match c {
            None => t,
            Some(p) => z(8, p) * t,
        };
        out = Some(match out {
            None => term,
            Some(acc) if minus => acc - term,
            Some(acc) => acc + term,
        });
    }
    out.unwrap()
}

fn n1() -> Expr {
    quartic_combination((1, 4), [None, Some(3), Some(6), Some(1)], [false, true, false, true])
}

fn n2() -> Expr {
    quartic_combination((3, 4), [None, Some(1), Some(2), Some(3)], [false, true, false, true])
}

fn denominator_product(eps: (i64, i64)) -> Expr {
    prod([th(eps, (0, 1)), th(eps, (1, 2)), th(eps, (1, 1)), th(eps, (3, 2))])
}

/// `θ[0;0]θ[0;1]θ²[1;0]θ²[1;1/2]`
fn j_term() -> Expr {
    prod([t00(1), t01(1), t10(1).pow(2), h().pow(2)])
}

/// `θ³[1;1/4]·θ′[1;1/4] − θ³[1;3/4]·θ′[1;3/4]`, normalized.
fn l_term() -> Expr {
    a().pow(3) * da() - b().pow(3) * db()
}

fn th2(e: (i64, i64), ep: (i64, i64)) -> Expr {
    thk(e, ep, 2)
}

const NORMALIZED: &str = "θ′ normalized by 2πi; −π becomes i/2";

fn build_registry() -> Vec<IdentityRecord> {
    let mut r = Vec::new();

    r.push(
        IdentityRecord::form(
            "jacobi",
            "Jacobi's derivative formula",
            dth((1, 1), (1, 1)),
            prod([prod([i(), q(1, 2)]), t00(1), t10(1), t01(1)]),
        )
        .with_comment(NORMALIZED),
    );
    r.push(IdentityRecord::form(
        "jacobi-eta-cube",
        "Jacobi's cube of the Euler product",
        etaq(&[(1, 3)], (0, 1)),
        gf(GfKind::Cube),
    ));

    // Third characteristics; the x^{1/12} prefactor is an empty eta quotient.
    let pre = || etaq(&[(1, 0)], (1, 12));
    let s_sum = z(6, 1) * th((1, 3), (1, 3)).pow(3) + th((1, 3), (1, 1)).pow(3) + z(6, 5) * th((1, 3), (5, 3)).pow(3);
    let chain = [
        (prod([n(6), dth((1, 1), (1, 3)), farkas()]), prod([pre(), s_sum])),
        (
            prod([sqrt3(), pre(), thk((1, 3), (1, 1), 3)]),
            prod([z(12, 1), th((1, 1), (1, 3)), farkas()]),
        ),
        (z(12, 1) * th((1, 1), (1, 3)), sqrt3() * thk((1, 3), (1, 1), 9)),
    ];
    for (k, (lhs, rhs)) in chain.into_iter().enumerate() {
        r.push(
            IdentityRecord::form(
                format!("farkas-third-chain-{}", k + 1),
                "derivative formula at third characteristics",
                lhs,
                rhs,
            )
            .with_grading(576)
            .with_comment("consecutive members of the chain, cross-multiplied; x^{1/12} written as etaq{(1,0); 1/12}"),
        );
    }

    r.push(IdentityRecord::form(
        "s2-gf",
        "sums of two squares",
        t00(1).pow(2),
        gf(GfKind::S2),
    ));
    r.push(IdentityRecord::form(
        "s12-gf",
        "representations by x² + 2y²",
        t00(1) * t00(2),
        gf(GfKind::S12),
    ));
    r.push(
        IdentityRecord::form(
            "thm-1-1",
            "derivative formula at [1;1/2]",
            dth((1, 1), (1, 2)),
            prod([i(), q(1, 2), t00(2).pow(2), h()]),
        )
        .with_comment(NORMALIZED),
    );
    r.push(IdentityRecord::form(
        "pro-series",
        "eta quotient of level 4 as a Kronecker-weighted series",
        etaq(&[(2, 9), (1, -3), (4, -3)], (0, 1)),
        gf(GfKind::Kron2),
    ));
    r.push(
        IdentityRecord::form(
            "pro-series-q8",
            "the level-4 eta quotient after q ↦ q⁸",
            etaq(&[(2, 9), (1, -3), (4, -3)], (1, 8)),
            gf(GfKind::Kron2Sq),
        )
        .with_comment("η⁹(2τ)/(η³(τ)η³(4τ)) with its q^{1/8} prefactor"),
    );
    for (name, plus) in [("thm-1-2-quarter", false), ("thm-1-2-threequarter", true)] {
        let (th_, dth_) = if plus { (b(), db()) } else { (a(), da()) };
        let inner = if plus {
            sqrt2() * t00(2) + t00(4)
        } else {
            sqrt2() * t00(2) - t00(4)
        };
        r.push(
            IdentityRecord::form(
                name,
                "derivative formula at quarter characteristics",
                dth_,
                prod([i(), q(1, 2), th_, t00(4), inner]),
            )
            .with_comment(NORMALIZED),
        );
    }
    for v in LambertVariant::ALL {
        let c = Characteristic::new(rat(1, 1), v.epsp());
        r.push(
            IdentityRecord::form(
                format!("lambert-{}", v.name()),
                "logarithmic derivative as a Lambert series",
                lambert(v) * Expr::theta(c.clone()),
                Expr::dtheta(c),
            )
            .with_comment("the logarithmic derivative, cross-multiplied by θ"),
        );
    }
    r.push(
        IdentityRecord::form(
            "prop-4-1-diff",
            "difference of logarithmic derivatives at [1;1/4] and [1;3/4]",
            da() * b() - db() * a(),
            -prod([i(), t00(4).pow(2), a(), b()]),
        )
        .with_guard(a() * b())
        .with_comment("cross-multiplied by θ[1;1/4]θ[1;3/4]; 2π becomes −i"),
    );
    r.push(
        IdentityRecord::form(
            "prop-4-1-sum",
            "sum of logarithmic derivatives at [1;1/4] and [1;3/4]",
            da() * b() + db() * a(),
            prod([sqrt2(), i(), t00(2), t00(4), a(), b()]),
        )
        .with_guard(a() * b())
        .with_comment("cross-multiplied by θ[1;1/4]θ[1;3/4]; −2√2π becomes √2·i"),
    );
    r.push(
        IdentityRecord::form(
            "cor-4-2-a",
            "quartic combination at ε = 1/4",
            l_term() * denominator_product((1, 4)),
            -prod([z(8, 7), q(1, 16), j_term(), n1()]),
        )
        .with_guard(denominator_product((1, 4)))
        .with_comment("cross-multiplied by Π θ[1/4; k/2], k = 0..3"),
    );
    r.push(
        IdentityRecord::form(
            "cor-4-2-b",
            "quartic combination at ε = 3/4",
            l_term() * denominator_product((3, 4)),
            -prod([z(8, 1), q(1, 16), j_term(), n2()]),
        )
        .with_guard(denominator_product((3, 4)))
        .with_comment("cross-multiplied by Π θ[3/4; k/2], k = 0..3"),
    );
    let p43 = |c: i64| {
        Identity::new(
            l_term(),
            prod([i(), t00(4).pow(2), t10(4), t01(4), t00(4).pow(2) + n(c) * t10(4).pow(2)]),
        )
    };
    r.push(
        IdentityRecord::form("prop-4-3", "cubic combination of derivatives", p43(3).lhs, p43(3).rhs)
            .with_mutation(p43(2))
            .with_comment("−2π becomes i; the negative control replaces the coefficient 3 by 2"),
    );

    let squares = [
        ((1, 4), (None, (1, 2), (3, 2)), 5),
        ((3, 4), (None, (3, 2), (1, 2)), 5),
        ((5, 4), (Some(1), (1, 2), (3, 2)), 2),
        ((7, 4), (Some(1), (3, 2), (1, 2)), 2),
    ];
    for (k, (ep, (c0, p, q_), c1)) in squares.into_iter().enumerate() {
        let first = prod([th2((1, 4), p), t00(2)]);
        let first = match c0 {
            None => first,
            Some(e) => prod([z(8, e), th2((1, 4), p), t00(2)]),
        };
        let second = prod([z(8, c1), th2((3, 4), q_), t10(2)]);
        r.push(IdentityRecord::form(
            format!("prop-4-3-lemma-squares-{}", k + 1),
            "squares of quarter-characteristic constants via the product lemma",
            th((1, 4), ep).pow(2),
            first + second,
        ));
    }
    r.push(IdentityRecord::form(
        "prop-4-3-aux-n1",
        "the quartic combination at ε = 1/4 in closed form",
        n1(),
        prod([n(4), thk((1, 4), (1, 1), 4), t00(4), quad_plus()]),
    ));
    let n1_middle = |fix: bool| {
        let inner = if fix { th2((3, 4), (1, 2)) } else { th2((1, 4), (1, 2)) };
        prod([n(2), t00(2).pow(2), th2((1, 4), (1, 2)).pow(2) - z(8, 3) * th2((1, 4), (3, 2)).pow(2)])
            - prod([n(2), z(8, 2), t10(2).pow(2), z(8, 3) * inner.pow(2) - th2((3, 4), (3, 2)).pow(2)])
    };
    r.push(
        IdentityRecord::form(
            "prop-4-3-aux-n1-middle",
            "the quartic combination at ε = 1/4 after the product lemma",
            n1(),
            n1_middle(true),
        )
        .with_comment("corrected reading: the second brace contains θ²[3/4;1/2](2τ)"),
    );
    r.push(
        IdentityRecord::form(
            "prop-4-3-aux-n1-middle-printed",
            "the quartic combination at ε = 1/4 after the product lemma, as printed",
            n1(),
            n1_middle(false),
        )
        .erratum()
        .with_comment("printed reading with θ²[1/4;1/2](2τ) in the second brace; refuted"),
    );
    let d1 = |squared: bool| {
        let t = if squared { t10(4).pow(2) } else { t10(4) };
        prod([z(8, 1), thk((1, 4), (1, 1), 4), t01(4), t00(4).pow(2) - t])
    };
    r.push(IdentityRecord::form(
        "prop-4-3-aux-d1",
        "the product Π θ[1/4; k/2] in closed form",
        denominator_product((1, 4)),
        d1(true),
    ));
    r.push(
        IdentityRecord::form(
            "prop-4-3-aux-d1-printed",
            "the product Π θ[1/4; k/2] in closed form, with θ[1;0](4τ) unsquared",
            denominator_product((1, 4)),
            d1(false),
        )
        .erratum()
        .with_comment("reading with θ[1;0](4τ) unsquared inside the brace; refuted"),
    );
    r.push(IdentityRecord::form(
        "prop-4-3-aux-j",
        "the product θ[0;0]θ[0;1]θ²[1;0]θ²[1;1/2] in closed form",
        j_term(),
        prod([n(4), t00(4), t10(4), t01(4).pow(2), t00(4).pow(2) - t10(4).pow(2)]),
    ));
    r.push(IdentityRecord::form(
        "thm-4-5-lemma",
        "θ²[1;0] through constants at 2τ",
        t10(1).pow(2),
        prod([n(2), t00(2), t10(2)]),
    ));

    let minus = || a().pow(4) - b().pow(4);
    let plus = || a().pow(4) + b().pow(4);
    r.push(
        IdentityRecord::form(
            "thm-4-4-quarter",
            "derivative at [1;1/4] through a quartic denominator",
            da() * minus(),
            prod([i(), a(), t00(4).pow(2), k_term() + b().pow(4)]),
        )
        .with_guard(minus())
        .with_comment("cross-multiplied by θ⁴[1;1/4] − θ⁴[1;3/4]"),
    );
    r.push(
        IdentityRecord::form(
            "thm-4-4-threequarter",
            "derivative at [1;3/4] through a quartic denominator",
            db() * minus(),
            prod([i(), b(), t00(4).pow(2), k_term() + a().pow(4)]),
        )
        .with_guard(minus())
        .with_comment("cross-multiplied by θ⁴[1;1/4] − θ⁴[1;3/4]"),
    );
    let limit_note = "cross-multiplied by θ⁴[1;1/4] + θ⁴[1;3/4], whose nonvanishing is checked as a guard; \
                      the τ → i∞ limit of the normalized quotient is 18 − 12√2, not 12√2 + 18, and neither constant is asserted";
    let k45 = |fourth: Expr| prod([t10(2).pow(2), fourth, quad_plus()]);
    for (printed, suffix) in [(false, ""), (true, "-printed")] {
        let fourth = || if printed { t10(4) } else { t01(4) };
        let mut q_rec = IdentityRecord::form(
            format!("thm-4-5-quarter{suffix}"),
            "derivative at [1;1/4] through a quartic sum",
            da() * plus(),
            prod([i(), q(1, 2), a(), t00(4), k45(fourth()) + prod([n(2), sqrt2(), b().pow(4), t00(2)])]),
        )
        .with_guard(plus())
        .with_comment(limit_note);
        let mut t_rec = IdentityRecord::form(
            format!("thm-4-5-threequarter{suffix}"),
            "derivative at [1;3/4] through a quartic sum",
            db() * plus(),
            -prod([i(), q(1, 2), b(), t00(4), k45(fourth()) - prod([n(2), sqrt2(), a().pow(4), t00(2)])]),
        )
        .with_guard(plus())
        .with_comment(limit_note);
        if printed {
            let note = "reading with θ[1;0](4τ) where θ[0;1](4τ) belongs; refuted";
            q_rec = q_rec.erratum().with_comment(note);
            t_rec = t_rec.erratum().with_comment(note);
        }
        r.push(q_rec);
        r.push(t_rec);
    }

    r.push(IdentityRecord::form(
        "sec5-1",
        "cubic relation among constants at ε = 1",
        prod([t10(1), h().pow(3)]) - a() * b().pow(3) - b() * a().pow(3),
        Expr::zero(),
    ));
    r.push(IdentityRecord::form(
        "sec5-2",
        "quadratic relation among constants at ε = 1",
        t10(1).pow(2) * a() * b() - a().pow(2) * h().pow(2) + h().pow(2) * b().pow(2),
        Expr::zero(),
    ));
    r.push(IdentityRecord::form(
        "sec5-3",
        "quartic relation among constants at ε = 1",
        a().pow(4) - b().pow(4) - h() * t10(1).pow(3),
        Expr::zero(),
    ));

    r.extend(lemma_grid());

    r.push(
        IdentityRecord::numeric(
            "prop-4-2-quarter",
            "two-variable quotient at ε = 1/4",
            NumericCheck::Elliptic(EllipticVariant::Quarter),
        )
        .with_comment("independence of ζ checked at seeded samples"),
    );
    r.push(
        IdentityRecord::numeric(
            "prop-4-2-threequarter",
            "two-variable quotient at ε = 3/4",
            NumericCheck::Elliptic(EllipticVariant::ThreeQuarter),
        )
        .with_comment("independence of ζ checked at seeded samples"),
    );
    r.push(
        IdentityRecord::numeric("det-A-zero", "vanishing determinant of the skew matrix", NumericCheck::DetA)
            .with_comment("|det A| / max|A_ij|⁴ at τ = i and the plan samples"),
    );
    r
}

/// The entries of the product-lemma grid.
pub const GRID: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];

/// The name of the grid record for `θ[ε;ε′]·θ[δ;δ′]`.
pub fn grid_name(eps: &BigRational, epsp: &BigRational, del: &BigRational, delp: &BigRational) -> String {
    format!(
        "lemma-2-1-grid[{},{};{},{}]",
        fmt_rational(eps),
        fmt_rational(epsp),
        fmt_rational(del),
        fmt_rational(delp)
    )
}

fn lemma_grid() -> Vec<IdentityRecord> {
    let vals: Vec<BigRational> = GRID.iter().map(|&(p, q)| rat(p, q)).collect();
    let half = rat(1, 2);
    let one = rat(1, 1);
    let mut out = Vec::new();
    for e in &vals {
        for ep in &vals {
            for d in &vals {
                for dp in &vals {
                    let lhs = Expr::theta(Characteristic::new(e.clone(), ep.clone()))
                        * Expr::theta(Characteristic::new(d.clone(), dp.clone()));
                    let s = (e + d) * &half;
                    let t = (e - d) * &half;
                    let sp = ep + dp;
                    let tp = ep - dp;
                    let two = |x: &BigRational, y: &BigRational| Expr::theta(Characteristic::new(x.clone(), y.clone()).at_scale(2));
                    let rhs = two(&s, &sp) * two(&t, &tp) + two(&(&s + &one), &sp) * two(&(&t + &one), &tp);
                    out.push(
                        IdentityRecord::form(grid_name(e, ep, d, dp), "product lemma for theta constants", lhs, rhs)
                            .with_comment("phases of order 128 at scale 2"),
                    );
                }
            }
        }
    }
    out
}
