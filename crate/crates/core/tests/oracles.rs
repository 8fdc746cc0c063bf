mod common;

use common::*;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

use thetaconst::arith::{self, LambertVariant};
use thetaconst::cyclotomic::{cyclotomic_polynomial, CycloNumber};
use thetaconst::numeric;
use thetaconst::qseries::QSeries;
use thetaconst::thetaforms::{self, rat, Characteristic, EtaQuotientSpec};

fn int_coeff(s: &QSeries, e: i64) -> i128 {
    let r: BigRational = s.coefficient(e).unwrap().as_rational().expect("rational coefficient");
    assert!(r.is_integer());
    r.to_integer().to_i128().unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

#[test]
fn cyclotomic_polynomials_match_division() {
    let mut orders: Vec<usize> = (1..=72).collect();
    orders.extend([96, 128, 144, 192, 288, 576]);
    for n in orders {
        let lib: Vec<i64> = cyclotomic_polynomial(n as u32).to_vec();
        assert_eq!(lib, cyclotomic_by_division(n), "Φ_{n}");
    }
    assert_eq!(cyclotomic_polynomial(1).to_vec(), vec![-1, 1]);
    assert_eq!(cyclotomic_polynomial(8).to_vec(), vec![1, 0, 0, 0, 1]);
    // Φ_{2^a 3^b}(x) = Φ_6(x^{2^{a−1} 3^{b−1}}) with 576 = 2⁶·3².
    let phi576 = cyclotomic_polynomial(576);
    let mut expect = vec![0i64; 193];
    expect[0] = 1;
    expect[96] = -1;
    expect[192] = 1;
    assert_eq!(phi576.to_vec(), expect);
}

#[test]
fn roots_of_unity_and_surds() {
    let z6 = CycloNumber::from_root_power(576, 96);
    assert_eq!(z6.order(), 576);
    assert_eq!(z6.pow(6), CycloNumber::one(576));
    assert_eq!(z6.pow(3), CycloNumber::from_int(576, -1));
    assert_eq!(CycloNumber::from_root_power(4, 1), CycloNumber::i());
    assert_eq!(CycloNumber::from_root_power(6, 3), CycloNumber::from_int(1, -1));

    let s2 = &CycloNumber::from_root_power(8, 1) + &CycloNumber::from_root_power(8, 7);
    assert_eq!(&s2 * &s2, CycloNumber::from_int(1, 2));
    let s3 = &CycloNumber::from_root_power(12, 1) + &CycloNumber::from_root_power(12, 11);
    assert_eq!(&s3 * &s3, CycloNumber::from_int(1, 3));
    assert_eq!(s3, CycloNumber::sqrt3());

    let z = |k| CycloNumber::from_root_power(576, k);
    let vanishing = &(&z(192) - &z(96)) + &CycloNumber::one(576);
    assert!(vanishing.is_zero());

    assert_eq!(CycloNumber::i().embed(8).unwrap(), CycloNumber::from_root_power(8, 2));
    let r2 = CycloNumber::sqrt2().embed(64).unwrap();
    assert_eq!(r2.order(), 64);
    assert_eq!(&r2 * &r2, CycloNumber::from_int(64, 2));
    assert_eq!(CycloNumber::from_int(1, 3).embed(576).unwrap().coords()[0], rat(3, 1));

    let c = CycloNumber::from_root_power(8, 1).to_complex();
    assert!((c.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && (c.im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    let c = CycloNumber::sqrt2().to_complex();
    assert!((c.re - std::f64::consts::SQRT_2).abs() < 1e-15 && c.im.abs() < 1e-15);
    assert_eq!(CycloNumber::zero(576).to_complex(), Complex64::new(0.0, 0.0));
}

/// Every coefficient of the exact expansion agrees with direct summation.
fn check_theta_against_summation(eps: (i64, i64), epsp: (i64, i64), k: u32, deriv: bool) {
    let c = Characteristic::ratio(eps, epsp).at_scale(k);
    let d = c.natural_grading();
    let window = 12i64;
    let s = if deriv {
        thetaforms::theta_deriv_normalized(&c, d, window * i64::from(d)).unwrap()
    } else {
        thetaforms::theta_constant(&c, d, window * i64::from(d)).unwrap()
    };
    let oracle = theta_terms(
        eps.0 as f64 / eps.1 as f64,
        epsp.0 as f64 / epsp.1 as f64,
        k as f64,
        deriv,
        window as f64,
    );
    let lib: Vec<(f64, Complex64)> = s.terms().map(|(e, v)| (e as f64 / d as f64, v.to_complex())).collect();
    assert_eq!(lib.len(), oracle.len(), "{c} deriv={deriv}: {lib:?} vs {oracle:?}");
    for ((e1, v1), (e2, v2)) in lib.iter().zip(&oracle) {
        assert!((e1 - e2).abs() < 1e-9, "{c}: exponent {e1} vs {e2}");
        assert!(close(*v1, *v2, 1e-9), "{c}: coefficient at {e1}: {v1} vs {v2}");
    }
}

#[test]
fn theta_series_match_direct_summation() {
    let chars = [
        ((0, 1), (0, 1)),
        ((1, 1), (0, 1)),
        ((0, 1), (1, 1)),
        ((1, 1), (1, 2)),
        ((1, 1), (1, 4)),
        ((1, 1), (3, 4)),
        ((1, 4), (1, 4)),
        ((3, 4), (7, 4)),
        ((1, 3), (1, 3)),
        ((1, 3), (5, 3)),
        ((1, 1), (1, 3)),
        ((-1, 4), (3, 2)),
        ((5, 4), (1, 2)),
    ];
    for (e, ep) in chars {
        for k in [1, 2, 3] {
            check_theta_against_summation(e, ep, k, false);
            check_theta_against_summation(e, ep, k, true);
        }
    }
}

#[test]
fn theta_constant_examples() {
    let t00 = thetaforms::theta_constant(&Characteristic::ratio((0, 1), (0, 1)), 1, 9).unwrap();
    assert_eq!(
        t00.terms().map(|(e, c)| (e, c.clone())).collect::<Vec<_>>(),
        vec![
            (0, CycloNumber::from_int(1, 1)),
            (1, CycloNumber::from_int(1, 2)),
            (4, CycloNumber::from_int(1, 2)),
            (9, CycloNumber::from_int(1, 2))
        ]
    );
    assert_eq!(int_coeff(&t00, 3), 0);
    assert_eq!(int_coeff(&t00.mul(&t00).unwrap(), 1), 4);
    let t11 = thetaforms::theta_constant(&Characteristic::ratio((1, 1), (1, 1)), 4, 400).unwrap();
    assert!(t11.is_empty());
    // θ′[1;1]/(2πi) = i(x^{1/4} − 3x^{9/4} + 5x^{25/4} − …)
    let d11 = thetaforms::theta_deriv_normalized(&Characteristic::ratio((1, 1), (1, 1)), 4, 100).unwrap();
    let got: Vec<_> = d11.terms().map(|(e, c)| (e, c.clone())).collect();
    let i = CycloNumber::i();
    let expect: Vec<_> = [(1, 1), (9, -3), (25, 5), (49, -7), (81, 9)]
        .into_iter()
        .map(|(e, k)| (e, i.scalar_mul(&rat(k, 1))))
        .collect();
    assert_eq!(got, expect);
    let d00 = thetaforms::theta_deriv_normalized(&Characteristic::ratio((0, 1), (0, 1)), 1, 50).unwrap();
    assert!(d00.is_empty());
}

#[test]
fn triple_product_agrees_with_sum() {
    for (e, ep) in [((1, 1), (1, 2)), ((0, 1), (0, 1)), ((1, 4), (1, 4)), ((1, 3), (5, 3))] {
        let c = Characteristic::ratio(e, ep);
        let d = c.natural_grading();
        let t = 30 * i64::from(d);
        let a = thetaforms::theta_constant(&c, d, t).unwrap();
        let b = thetaforms::triple_product_theta(&c, d, t).unwrap();
        assert!(a.truncate(t).same_terms(&b.truncate(t)), "{c}");
    }
}

#[test]
fn euler_and_eta_quotients_match_dense_products() {
    let e1 = thetaforms::euler_product(1, 1, 2 * 7).unwrap();
    let got: Vec<i128> = (0..8).map(|k| int_coeff(&e1, 2 * k)).collect();
    assert_eq!(got, vec![1, -1, -1, 0, 0, 1, 0, 1]);

    let eta = EtaQuotientSpec::eta_product(vec![(1, 1)]);
    assert_eq!(eta.prefactor, rat(1, 24));
    assert_eq!(eta.factors, vec![(1, 1)]);

    // Level-4 quotient against a dense oracle through q³⁰⁰.
    let n = 301;
    let oracle = dense_mul(
        &dense_mul(&dense_pow(&euler(2, n), 9), &dense_pow(&euler(1, n), -3)),
        &dense_pow(&euler(4, n), -3),
    );
    let spec = EtaQuotientSpec::new(vec![(2, 9), (1, -3), (4, -3)], rat(0, 1));
    let lib = thetaforms::eta_quotient(&spec, 1, 600).unwrap();
    for k in 0..n {
        assert_eq!(int_coeff(&lib, 2 * k as i64), oracle[k], "q^{k}");
    }
    let spot: Vec<i128> = [0, 1, 3, 6, 10, 2, 4, 5].iter().map(|&k| oracle[k]).collect();
    assert_eq!(spot, vec![1, 3, -5, -7, 9, 0, 0, 0]);
}

#[test]
fn farkas_product_matches_dense_oracle() {
    let n = 61;
    let oracle = dense_mul(&euler(1, n), &dense_inv(&euler(3, n)));
    assert_eq!(&oracle[..8], &[1, -1, -1, 1, -1, 0, 2, -1]);
    let lib = thetaforms::farkas_product(1, 2 * (n as i64 - 1)).unwrap();
    let direct = thetaforms::farkas_product_direct(1, 2 * (n as i64 - 1));
    for k in 0..n {
        assert_eq!(int_coeff(&lib, 2 * k as i64), oracle[k], "q^{k}");
        assert_eq!(int_coeff(&direct, 2 * k as i64), oracle[k], "q^{k}");
    }
    assert_eq!(lib.lead(), Some(0));
    assert_eq!(lib.coefficient(0).unwrap(), CycloNumber::one(1));
}

#[test]
fn divisor_counts_and_characters() {
    assert_eq!(arith::divisor_class_count(9, 1, 8).unwrap(), 2);
    assert_eq!(arith::divisor_class_count(1, 1, 8).unwrap(), 1);
    assert_eq!(arith::divisor_class_count(8, 3, 8).unwrap(), 0);
    for n in 0..=400u64 {
        assert_eq!(arith::s2_formula(n), lattice_count(n, 1) as i64, "S2({n})");
        assert_eq!(arith::s12_formula(n), lattice_count(n, 2) as i64, "S12({n})");
        assert_eq!(arith::s2_lattice(n), lattice_count(n, 1));
        assert_eq!(arith::s12_lattice(n), lattice_count(n, 2));
    }
    assert_eq!((arith::s2_formula(5), arith::s2_formula(3), arith::s2_formula(0)), (8, 0, 1));
    assert_eq!((arith::s12_formula(3), arith::s12_formula(9), arith::s12_formula(5)), (4, 6, 0));
    assert_eq!((arith::s2_lattice(1), arith::s2_lattice(2), arith::s12_lattice(1)), (4, 4, 2));
    assert_eq!([1, 3, 6].map(arith::kronecker_m1), [1, -1, 0]);
    assert_eq!([3, 5, 8].map(arith::kronecker_m2), [1, -1, 0]);
    assert_eq!([0, 3, -1].map(arith::triangular), [0, 6, 0]);
}

#[test]
fn lambert_constant_terms() {
    let i = CycloNumber::i();
    let half = rat(1, 2);
    let inv_sqrt2 = CycloNumber::sqrt2().scalar_mul(&half);
    let quarter = arith::lambert_logderiv_series(LambertVariant::Quarter, 1, 20);
    let three = arith::lambert_logderiv_series(LambertVariant::ThreeQuarter, 1, 20);
    let halfv = arith::lambert_logderiv_series(LambertVariant::Half, 1, 20);
    assert_eq!(quarter.coefficient(0).unwrap(), &(&i * &inv_sqrt2) - &i.scalar_mul(&half));
    assert_eq!(three.coefficient(0).unwrap(), &(&i * &inv_sqrt2) + &i.scalar_mul(&half));
    assert_eq!(halfv.coefficient(0).unwrap(), i.scalar_mul(&half));
}

#[test]
fn numeric_values() {
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let t00 = numeric::theta_point(0.0, 0.0, zero, i, numeric::TOL).unwrap();
    assert!((t00.re - 1.086_434_811_213_308).abs() < 1e-12 && t00.im.abs() < 1e-12);
    assert!((t00 - theta_value(0.0, 0.0, i)).norm() < 1e-13);
    assert!(numeric::theta_point(1.0, 1.0, zero, Complex64::new(0.2, 0.7), numeric::TOL).unwrap().norm() < 1e-14);
    let z0 = (i + 1.0) / 2.0;
    assert!(numeric::theta_point(0.0, 0.0, z0, i, numeric::TOL).unwrap().norm() < 1e-10);

    // θ′[1;1](0,i) = −π θ[0;0]θ[1;0]θ[0;1]
    let lhs = numeric::theta_deriv_point(1.0, 1.0, zero, i, numeric::TOL).unwrap();
    let rhs = -PI * theta_value(0.0, 0.0, i) * theta_value(1.0, 0.0, i) * theta_value(0.0, 1.0, i);
    assert!(close(lhs, rhs, 1e-9));
    assert!(numeric::theta_deriv_point(0.0, 0.0, zero, Complex64::new(0.1, 0.9), numeric::TOL).unwrap().norm() < 1e-12);

    // The normalized derivative at τ = 2i agrees with the exact series at x = e^{−2π}.
    let c = Characteristic::ratio((1, 1), (1, 1));
    let series = thetaforms::theta_deriv_normalized(&c, 4, 4 * 40).unwrap();
    let tau = Complex64::new(0.0, 2.0);
    let exact = series.eval_at_tau(tau);
    let point = numeric::theta_deriv_normalized_point(1.0, 1.0, tau).unwrap();
    assert!(close(exact, point, 1e-12));
}

#[test]
fn determinant_and_functional_equations() {
    for tau in [Complex64::new(0.0, 1.0), Complex64::new(0.3, 1.2)] {
        assert!(numeric::det_a(tau).unwrap().relative < 1e-10);
        let m = numeric::det_a_matrix(tau).unwrap();
        assert_eq!(m + m.transpose(), nalgebra::Matrix4::zeros());
    }
    let z = Complex64::new(0.13, -0.07);
    assert!(numeric::check_quasi_periodicity(0.0, 0.0, z, Complex64::new(0.0, 1.0), 0, 1).unwrap() < 1e-12);
    assert!(numeric::check_quasi_periodicity(1.0, 1.0, z, Complex64::new(0.0, 1.5), 1, 0).unwrap() < 1e-10);
    assert_eq!(numeric::check_quasi_periodicity(0.3, 0.1, z, Complex64::new(0.0, 1.5), 0, 0).unwrap(), 0.0);
    assert!(numeric::check_half_period(1.0, 0.25, z, Complex64::new(0.0, 1.0), 0, 1).unwrap() < 1e-10);
    assert!(numeric::check_half_period(0.0, 0.0, z, Complex64::new(0.0, 1.0), 1, 0).unwrap() < 1e-10);
}
