//! Double-precision evaluation of `θ[ε;ε′](ζ, τ)` and `θ′`, plus the
//! two-variable checks that the formal-series path cannot express.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors_of, kronecker_m2, triangular, LambertVariant};

/// Largest summation index tried before giving up on a tolerance.
pub const N_MAX: i64 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("τ must lie in the upper half-plane (im τ = {0})")]
    NotInUpperHalfPlane(f64),
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("tolerance {tol:e} not reached within |n| ≤ {n_max}")]
    ToleranceUnreachable { tol: f64, n_max: i64 },
    #[error("too many theta-zero collisions: {resampled} resamples for {count} samples")]
    TooManyCollisions { resampled: usize, count: usize },
    #[error("sample plan is invalid: {0}")]
    InvalidPlan(String),
}

fn i_times(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// Partial sum of `Σ w(m)·exp(2πi[m²τ/2 + m(ζ + ε′/2)])`, `m = n + ε/2`,
/// summed outward from the peak until the bounded tail drops below `tol/2`
/// on each side. `log_w` bounds `ln|w(m)|`.
fn lattice_sum(
    eps: f64,
    epsp: f64,
    zeta: Complex64,
    tau: Complex64,
    tol: f64,
    weight: impl Fn(f64) -> Complex64,
    log_w: impl Fn(f64) -> f64,
) -> Result<Complex64, NumericError> {
    if !(tau.im > 0.0) {
        return Err(NumericError::NotInUpperHalfPlane(tau.im));
    }
    if !(tol > 0.0) {
        return Err(NumericError::BadTolerance);
    }
    let t = tau.im;
    let y = zeta.im;
    let log_mag = |m: f64| -PI * t * m * m - 2.0 * PI * m * y + log_w(m);
    let peak = -y / t;
    let n0 = (peak - eps / 2.0).round() as i64;
    let term = |n: i64| {
        let m = n as f64 + eps / 2.0;
        let phase = two_pi_i() * (m * m * tau / 2.0 + m * (zeta + epsp / 2.0));
        weight(m) * phase.exp()
    };
    let mut total = Complex64::new(0.0, 0.0);
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { n0 } else { n0 - 1 };
        loop {
            if (n - n0).abs() > N_MAX {
                return Err(NumericError::ToleranceUnreachable { tol, n_max: N_MAX });
            }
            total += term(n);
            let m_next = (n + dir) as f64 + eps / 2.0;
            let next = log_mag(m_next);
            let ratio = (log_mag(m_next + dir as f64) - next).exp();
            // Past the peak the ratios keep shrinking, so the rest of this
            // side is bounded by a geometric series.
            if ratio < 1.0 && (m_next - peak) * dir as f64 > 0.0 && next.exp() / (1.0 - ratio) < tol / 2.0 {
                break;
            }
            n += dir;
        }
    }
    Ok(total)
}

/// `θ[ε;ε′](ζ, τ)` to absolute accuracy `tol`.
pub fn theta_point(eps: f64, epsp: f64, zeta: Complex64, tau: Complex64, tol: f64) -> Result<Complex64, NumericError> {
    lattice_sum(eps, epsp, zeta, tau, tol, |_| Complex64::new(1.0, 0.0), |_| 0.0)
}

/// `∂θ[ε;ε′]/∂ζ (ζ, τ)` to absolute accuracy `tol`.
pub fn theta_deriv_point(eps: f64, epsp: f64, zeta: Complex64, tau: Complex64, tol: f64) -> Result<Complex64, NumericError> {
    lattice_sum(
        eps,
        epsp,
        zeta,
        tau,
        tol,
        |m| two_pi_i() * m,
        |m| (2.0 * PI * m.abs()).max(1e-300).ln(),
    )
}

/// Default accuracy for point evaluations.
pub const TOL: f64 = 1e-15;

fn th(eps: f64, epsp: f64, zeta: Complex64, tau: Complex64) -> Result<Complex64, NumericError> {
    theta_point(eps, epsp, zeta, tau, TOL)
}

fn scaled_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / 1f64.max(lhs.norm()).max(rhs.norm())
}

/// Residual of `θ(ζ+n+mτ) = exp(2πi[(nε−mε′)/2 − mζ − m²τ/2])·θ(ζ)`,
/// scaled by the larger side when that exceeds 1.
pub fn check_quasi_periodicity(
    eps: f64,
    epsp: f64,
    zeta: Complex64,
    tau: Complex64,
    m: i64,
    n: i64,
) -> Result<f64, NumericError> {
    if m == 0 && n == 0 {
        return Ok(0.0);
    }
    let (mf, nf) = (m as f64, n as f64);
    let lhs = th(eps, epsp, zeta + nf + mf * tau, tau)?;
    let factor = (two_pi_i() * ((nf * eps - mf * epsp) / 2.0 - mf * zeta - mf * mf * tau / 2.0)).exp();
    Ok(scaled_residual(lhs, factor * th(eps, epsp, zeta, tau)?))
}

/// Residual of the half-period shift
/// `θ[ε;ε′](ζ+(n+mτ)/2) = exp(2πi[−mζ/2 − m²τ/8 − m(ε′+n)/4])·θ[ε+m;ε′+n](ζ)`.
pub fn check_half_period(
    eps: f64,
    epsp: f64,
    zeta: Complex64,
    tau: Complex64,
    m: i64,
    n: i64,
) -> Result<f64, NumericError> {
    if m == 0 && n == 0 {
        return Ok(0.0);
    }
    let (mf, nf) = (m as f64, n as f64);
    let lhs = th(eps, epsp, zeta + (nf + mf * tau) / 2.0, tau)?;
    let factor =
        (two_pi_i() * (-mf * zeta / 2.0 - mf * mf * tau / 8.0 - mf * (epsp + nf) / 4.0)).exp();
    Ok(scaled_residual(lhs, factor * th(eps + mf, epsp + nf, zeta, tau)?))
}

/// `|θ[ε;ε′](ζ₀, τ)|` at the zero `ζ₀ = (1−ε)τ/2 + (1−ε′)/2`.
pub fn zero_residual(eps: f64, epsp: f64, tau: Complex64) -> Result<f64, NumericError> {
    let z0 = (1.0 - eps) / 2.0 * tau + (1.0 - epsp) / 2.0;
    Ok(th(eps, epsp, z0, tau)?.norm())
}

/// The Jacobi triple product at `(ζ, τ)`, for comparison with the sum.
pub fn triple_product_point(eps: f64, epsp: f64, zeta: Complex64, tau: Complex64) -> Result<Complex64, NumericError> {
    if !(tau.im > 0.0) {
        return Err(NumericError::NotInUpperHalfPlane(tau.im));
    }
    let x = |s: f64| (Complex64::new(0.0, PI) * tau * s).exp();
    let z = |s: f64| (two_pi_i() * zeta * s).exp();
    let e_plus = (Complex64::new(0.0, PI) * epsp).exp();
    let e_minus = e_plus.inv();
    let mut acc = (Complex64::new(0.0, PI) * eps * epsp / 2.0).exp() * x(eps * eps / 4.0) * z(eps / 2.0);
    let mut n = 1.0;
    loop {
        let a = x(2.0 * n);
        let f = (1.0 - a) * (1.0 + e_plus * x(2.0 * n - 1.0 + eps) * z(1.0)) * (1.0 + e_minus * x(2.0 * n - 1.0 - eps) / z(1.0));
        acc *= f;
        if a.norm() < 1e-18 && n > 3.0 {
            break;
        }
        n += 1.0;
        if n > N_MAX as f64 {
            return Err(NumericError::ToleranceUnreachable { tol: 1e-18, n_max: N_MAX });
        }
    }
    Ok(acc)
}

/// `exp(2πi k/N)` as a double.
pub fn root(n: u32, k: i64) -> Complex64 {
    (two_pi_i() * (k as f64 / n as f64)).exp()
}

/// A rectangle `[re.0, re.1] × [im.0, im.1]` in ℂ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn point(z: Complex64) -> Self {
        Rect {
            re: (z.re, z.re),
            im: (z.im, z.im),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        let pick = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| {
            if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            }
        };
        let re = pick(rng, self.re);
        let im = pick(rng, self.im);
        Complex64::new(re, im)
    }
}

/// Seeded sampling plan for the numeric checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub count: usize,
    pub tau_box: Rect,
    pub zeta_box: Rect,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: 0,
            count: 20,
            tau_box: Rect {
                re: (-1.0, 1.0),
                im: (0.3, 2.0),
            },
            zeta_box: Rect {
                re: (-0.4, 0.4),
                im: (-0.4, 0.4),
            },
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64, count: usize) -> Self {
        SamplePlan {
            seed,
            count,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), NumericError> {
        if self.count == 0 {
            return Err(NumericError::InvalidPlan("count must be positive".into()));
        }
        if !(self.tau_box.im.0 > 0.0) || self.tau_box.im.1 < self.tau_box.im.0 {
            return Err(NumericError::InvalidPlan("τ-box must lie in the upper half-plane".into()));
        }
        if self.tau_box.re.1 < self.tau_box.re.0 || self.zeta_box.re.1 < self.zeta_box.re.0 || self.zeta_box.im.1 < self.zeta_box.im.0 {
            return Err(NumericError::InvalidPlan("box corners are reversed".into()));
        }
        Ok(())
    }

    /// A generator positioned at the start of the plan's stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Draws one `(τ, ζ)` pair.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
        let tau = self.tau_box.sample(rng);
        let zeta = self.zeta_box.sample(rng);
        (tau, zeta)
    }

    /// The first `count` pairs, generated sequentially from the seed.
    pub fn samples(&self) -> Vec<(Complex64, Complex64)> {
        let mut rng = self.rng();
        (0..self.count).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Which quotient of quarter-characteristic thetas is tested for constancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EllipticVariant {
    Quarter,
    ThreeQuarter,
}

/// `f(ζ) = Σ c_j θ⁴[ε; ε′_j](ζ) / Π θ[ε; δ_j](ζ)` and its predicted constant
/// value `κ·(θ³[1;1/4]θ′[1;1/4] − θ³[1;3/4]θ′[1;3/4]) / (θ′[1;1]θ[1;0]θ²[1;1/2])`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticQuotient {
    pub eps: f64,
    pub numerator: Vec<(Complex64, f64)>,
    pub denominator: Vec<f64>,
    pub kappa: Complex64,
}

impl EllipticQuotient {
    pub fn standard(variant: EllipticVariant) -> Self {
        let z8 = |k: i64| root(8, k);
        match variant {
            EllipticVariant::Quarter => EllipticQuotient {
                eps: 0.25,
                numerator: vec![(z8(0), 0.25), (-z8(3), 0.75), (z8(6), 1.25), (-z8(1), 1.75)],
                denominator: vec![0.0, 0.5, 1.0, 1.5],
                kappa: -8.0 * z8(3),
            },
            EllipticVariant::ThreeQuarter => EllipticQuotient {
                eps: 0.75,
                numerator: vec![(z8(0), 0.25), (-z8(1), 0.75), (z8(2), 1.25), (-z8(3), 1.75)],
                denominator: vec![0.0, 0.5, 1.0, 1.5],
                kappa: -8.0 * z8(1),
            },
        }
    }

    /// The negative control: the constant loses its ζ₈-power factor.
    pub fn mutated(variant: EllipticVariant) -> Self {
        let mut q = Self::standard(variant);
        q.kappa = Complex64::new(-8.0, 0.0);
        q
    }

    fn parts(&self, zeta: Complex64, tau: Complex64) -> Result<(Complex64, Complex64, f64), NumericError> {
        let mut num = Complex64::new(0.0, 0.0);
        for (c, ep) in &self.numerator {
            num += c * th(self.eps, *ep, zeta, tau)?.powi(4);
        }
        let mut den = Complex64::new(1.0, 0.0);
        let mut scale = 1.0;
        for ep in &self.denominator {
            let v = th(self.eps, *ep, zeta, tau)?;
            scale *= v.norm().max(1e-300);
            den *= v;
        }
        Ok((num, den, scale))
    }

    /// The closed form predicted for `f`, from theta constants at `τ`.
    pub fn closed_form(&self, tau: Complex64) -> Result<Complex64, NumericError> {
        let zero = Complex64::new(0.0, 0.0);
        let a = th(1.0, 0.25, zero, tau)?;
        let b = th(1.0, 0.75, zero, tau)?;
        let da = theta_deriv_point(1.0, 0.25, zero, tau, TOL)?;
        let db = theta_deriv_point(1.0, 0.75, zero, tau, TOL)?;
        let d11 = theta_deriv_point(1.0, 1.0, zero, tau, TOL)?;
        let t10 = th(1.0, 0.0, zero, tau)?;
        let h = th(1.0, 0.5, zero, tau)?;
        Ok(self.kappa * (a.powi(3) * da - b.powi(3) * db) / (d11 * t10 * h * h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    /// `max |f(ζ) − f(0)| / |f(0)|` over the accepted samples.
    pub constancy: f64,
    /// `max |f(0) − closed form| / |f(0)|` over the sampled τ.
    pub closed_form: f64,
    pub samples: usize,
    pub resampled: usize,
}

impl ConstancyReport {
    pub fn worst(&self) -> f64 {
        self.constancy.max(self.closed_form)
    }
}

/// Relative size of the denominator below which a sample counts as a hit on
/// a theta zero and is redrawn.
const COLLISION: f64 = 1e-6;

pub fn check_elliptic_constancy_with(q: &EllipticQuotient, plan: &SamplePlan) -> Result<ConstancyReport, NumericError> {
    plan.validate()?;
    let mut rng = plan.rng();
    let mut report = ConstancyReport {
        constancy: 0.0,
        closed_form: 0.0,
        samples: 0,
        resampled: 0,
    };
    while report.samples < plan.count {
        let (tau, zeta) = plan.draw(&mut rng);
        let (num, den, scale) = q.parts(zeta, tau)?;
        let (num0, den0, scale0) = q.parts(Complex64::new(0.0, 0.0), tau)?;
        if den.norm() < COLLISION * scale || den0.norm() < COLLISION * scale0 {
            report.resampled += 1;
            if report.resampled > plan.count / 2 + 1 {
                return Err(NumericError::TooManyCollisions {
                    resampled: report.resampled,
                    count: plan.count,
                });
            }
            continue;
        }
        let f0 = num0 / den0;
        let f = num / den;
        report.constancy = report.constancy.max((f - f0).norm() / f0.norm());
        report.closed_form = report.closed_form.max((f0 - q.closed_form(tau)?).norm() / f0.norm());
        report.samples += 1;
    }
    Ok(report)
}

pub fn check_elliptic_constancy(variant: EllipticVariant, plan: &SamplePlan) -> Result<ConstancyReport, NumericError> {
    check_elliptic_constancy_with(&EllipticQuotient::standard(variant), plan)
}

/// The skew-symmetric matrix of theta constants whose kernel is nontrivial.
pub fn det_a_matrix(tau: Complex64) -> Result<Matrix4<Complex64>, NumericError> {
    let zero = Complex64::new(0.0, 0.0);
    let a = th(1.0, 0.25, zero, tau)?;
    let b = th(1.0, 0.75, zero, tau)?;
    let h = th(1.0, 0.5, zero, tau)?;
    let t10 = th(1.0, 0.0, zero, tau)?;
    let ab = a * b;
    let th_ = t10 * h;
    Ok(Matrix4::new(
        zero, ab, th_, a * a, //
        -ab, zero, ab, h * h, //
        -th_, -ab, zero, b * b, //
        -a * a, -h * h, -b * b, zero,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetReport {
    pub det: (f64, f64),
    pub scale: f64,
    /// `|det A| / scale⁴`.
    pub relative: f64,
}

pub fn det_a(tau: Complex64) -> Result<DetReport, NumericError> {
    Ok(det_report(&det_a_matrix(tau)?))
}

/// [`det_a`] with the sign of the `a²` pair flipped, which keeps the matrix
/// skew-symmetric but makes its Pfaffian `−2a³b`.
pub fn det_a_mutated(tau: Complex64) -> Result<DetReport, NumericError> {
    let mut m = det_a_matrix(tau)?;
    m[(0, 3)] = -m[(0, 3)];
    m[(3, 0)] = -m[(3, 0)];
    Ok(det_report(&m))
}

fn det_report(m: &Matrix4<Complex64>) -> DetReport {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let det = m.determinant();
    DetReport {
        det: (det.re, det.im),
        scale,
        relative: det.norm() / scale.powi(4),
    }
}

/// `q^p Π_j Π_n (1 − q^{m_j n})^{e_j}` at `τ`, with `q = exp(2πiτ)`.
pub fn eta_quotient_point(factors: &[(u32, i32)], prefactor: f64, tau: Complex64) -> Result<Complex64, NumericError> {
    if !(tau.im > 0.0) {
        return Err(NumericError::NotInUpperHalfPlane(tau.im));
    }
    let q = (two_pi_i() * tau).exp();
    let mut acc = (two_pi_i() * tau * prefactor).exp();
    for &(m, e) in factors {
        let qm = q.powu(m);
        let mut qmn = qm;
        let mut p = Complex64::new(1.0, 0.0);
        while qmn.norm() > 1e-20 {
            p *= 1.0 - qmn;
            qmn *= qm;
        }
        acc *= p.powi(e);
    }
    Ok(acc)
}

/// `Π_{n≥0}(1 − q^{3n+1})(1 − q^{3n+2})` at `τ`.
pub fn farkas_point(tau: Complex64) -> Result<Complex64, NumericError> {
    if !(tau.im > 0.0) {
        return Err(NumericError::NotInUpperHalfPlane(tau.im));
    }
    let q = (two_pi_i() * tau).exp();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut n = 1u32;
    loop {
        let qn = q.powu(n);
        if qn.norm() < 1e-20 {
            break;
        }
        if !n.is_multiple_of(3) {
            acc *= 1.0 - qn;
        }
        n += 1;
    }
    Ok(acc)
}

fn sin_eighth(k: i64) -> f64 {
    (PI * k as f64 / 4.0).sin()
}

/// The Lambert expansion of `θ′[1;ε′]/(2πi θ[1;ε′])` summed numerically.
pub fn lambert_point(variant: LambertVariant, tau: Complex64) -> Result<Complex64, NumericError> {
    if !(tau.im > 0.0) {
        return Err(NumericError::NotInUpperHalfPlane(tau.im));
    }
    let x = (Complex64::new(0.0, PI) * tau).exp();
    let i = Complex64::new(0.0, 1.0);
    let (mut acc, step) = match variant {
        LambertVariant::Half => (i / 2.0, 0),
        LambertVariant::Quarter => (i / 2f64.sqrt() - i / 2.0, 1),
        LambertVariant::ThreeQuarter => (i / 2f64.sqrt() + i / 2.0, 3),
    };
    let mut n = 1u64;
    loop {
        let x2n = x.powu(2 * n as u32);
        if x2n.norm() < 1e-20 {
            break;
        }
        let inner: f64 = divisors_of(n)
            .into_iter()
            .map(|d| {
                if step == 0 {
                    if d % 2 == 1 {
                        if d % 4 == 1 { 2.0 } else { -2.0 }
                    } else {
                        0.0
                    }
                } else {
                    let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
                    2.0 * sign * sin_eighth(step * d as i64)
                }
            })
            .sum();
        acc += i * inner * x2n;
        n += 1;
    }
    Ok(acc)
}

/// Named generating functions evaluated at `τ` from their defining sums.
pub fn gf_point(name: &str, tau: Complex64) -> Result<Option<Complex64>, NumericError> {
    if !(tau.im > 0.0) {
        return Err(NumericError::NotInUpperHalfPlane(tau.im));
    }
    let x = |e: f64| (Complex64::new(0.0, PI) * tau * e).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let value = match name {
        "s2" | "s12" => {
            let f = if name == "s2" { crate::arith::s2_formula } else { crate::arith::s12_formula };
            let mut n = 0u64;
            while x(n as f64).norm() > 1e-20 {
                acc += f(n) as f64 * x(n as f64);
                n += 1;
            }
            acc
        }
        "cube" => {
            let mut n = 0i64;
            while x(2.0 * triangular(n) as f64).norm() > 1e-20 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * (2 * n + 1) as f64 * x(2.0 * triangular(n) as f64);
                n += 1;
            }
            acc
        }
        "kron2" => {
            let mut m = 0i64;
            while x(2.0 * triangular(m) as f64).norm() > 1e-20 {
                let n = 2 * m + 1;
                acc += (kronecker_m2(n) * n) as f64 * x(2.0 * triangular(m) as f64);
                m += 1;
            }
            acc
        }
        "kron2sq" => {
            let mut n = 1i64;
            while x((n * n) as f64 / 4.0).norm() > 1e-20 {
                acc += (kronecker_m2(n) * n) as f64 * x((n * n) as f64 / 4.0);
                n += 1;
            }
            acc
        }
        _ => return Ok(None),
    };
    Ok(Some(value))
}

/// Numeric value of `θ′/(2πi)`.
pub fn theta_deriv_normalized_point(eps: f64, epsp: f64, tau: Complex64) -> Result<Complex64, NumericError> {
    let d = theta_deriv_point(eps, epsp, Complex64::new(0.0, 0.0), tau, TOL)?;
    Ok(-i_times(d) / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_00_at_i() {
        let v = theta_point(0.0, 0.0, c(0.0, 0.0), c(0.0, 1.0), 1e-15).unwrap();
        assert!((v.re - 1.086_434_811_213_308).abs() < 1e-12, "{v}");
        assert!(v.im.abs() < 1e-12);
        let z = theta_point(1.0, 1.0, c(0.0, 0.0), c(0.2, 0.9), 1e-14).unwrap();
        assert!(z.norm() < 1e-13);
        let zero = theta_point(0.0, 0.0, c(0.5, 0.5), c(0.0, 1.0), 1e-15).unwrap();
        assert!(zero.norm() < 1e-10);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(matches!(
            theta_point(0.0, 0.0, c(0.0, 0.0), c(0.0, -1.0), 1e-10),
            Err(NumericError::NotInUpperHalfPlane(_))
        ));
        assert!(theta_point(0.0, 0.0, c(0.0, 0.0), c(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn jacobi_derivative_numerically() {
        let tau = c(0.0, 1.0);
        let zero = c(0.0, 0.0);
        let d = theta_deriv_point(1.0, 1.0, zero, tau, 1e-15).unwrap();
        let p = -PI * th(0.0, 0.0, zero, tau).unwrap() * th(1.0, 0.0, zero, tau).unwrap() * th(0.0, 1.0, zero, tau).unwrap();
        assert!((d - p).norm() / p.norm() < 1e-9);
        assert!(theta_deriv_point(0.0, 0.0, zero, c(0.1, 0.8), 1e-15).unwrap().norm() < 1e-13);
    }

    #[test]
    fn functional_equations() {
        let tau = c(0.0, 1.5);
        let z = c(0.13, -0.07);
        assert!(check_quasi_periodicity(0.0, 0.0, z, tau, 0, 1).unwrap() < 1e-12);
        assert!(check_quasi_periodicity(1.0, 1.0, z, tau, 1, 0).unwrap() < 1e-10);
        assert_eq!(check_quasi_periodicity(0.3, 0.2, z, tau, 0, 0).unwrap(), 0.0);
        assert!(check_half_period(1.0, 0.25, z, c(0.0, 1.0), 0, 1).unwrap() < 1e-10);
        assert!(check_half_period(0.0, 0.0, z, c(0.0, 1.0), 1, 0).unwrap() < 1e-10);
        assert_eq!(check_half_period(0.0, 0.0, z, tau, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn det_a_vanishes() {
        for tau in [c(0.0, 1.0), c(0.3, 1.2)] {
            let r = det_a(tau).unwrap();
            assert!(r.relative < 1e-10, "{r:?}");
            let m = det_a_matrix(tau).unwrap();
            assert_eq!(m + m.transpose(), Matrix4::zeros());
        }
    }

    #[test]
    fn constancy_degenerate_plan() {
        let plan = SamplePlan {
            seed: 1,
            count: 1,
            tau_box: Rect::point(c(0.0, 1.1)),
            zeta_box: Rect::point(c(0.0, 0.0)),
        };
        let r = check_elliptic_constancy(EllipticVariant::Quarter, &plan).unwrap();
        assert_eq!(r.constancy, 0.0);
        assert!(r.closed_form < 1e-8);
    }

    #[test]
    fn plans_are_deterministic() {
        let p = SamplePlan::with_seed(7, 5);
        assert_eq!(p.samples(), p.samples());
        assert_ne!(p.samples(), SamplePlan::with_seed(8, 5).samples());
        assert!(SamplePlan { count: 0, ..p.clone() }.validate().is_err());
    }
}
