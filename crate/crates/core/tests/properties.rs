use num_rational::BigRational;
use proptest::prelude::*;

use thetaconst::arith::{self, LambertVariant};
use thetaconst::cyclotomic::{totient, CycloNumber};
use thetaconst::dsl;
use thetaconst::expr::{Atom, Const, Expr, GfKind, Identity, Sign};
use thetaconst::qseries::{QSeries, EXACT};
use thetaconst::thetaforms::{self, rat, root_of_unity, Characteristic, EtaQuotientSpec};

fn cyclo(order: u32) -> impl Strategy<Value = CycloNumber> {
    prop::collection::vec((-20i64..=20, 1i64..=6), totient(order)).prop_map(move |v| {
        CycloNumber::from_coords(order, v.into_iter().map(|(n, d)| rat(n, d)).collect())
    })
}

/// A small element of Q(ζ₈) built from root powers.
fn small_cyclo() -> impl Strategy<Value = CycloNumber> {
    prop::collection::vec((-3i64..=3, 0i64..8), 1..3).prop_map(|v| {
        v.into_iter().fold(CycloNumber::zero(8), |acc, (c, k)| {
            &acc + &CycloNumber::from_root_power(8, k).scalar_mul(&rat(c, 1))
        })
    })
}

/// A grading-4 series with finite cutoff.
fn series() -> impl Strategy<Value = QSeries> {
    (prop::collection::vec((0i64..40, small_cyclo()), 0..8), 10i64..60)
        .prop_map(|(terms, cutoff)| QSeries::from_terms(4, cutoff, terms))
}

/// A grading-4 series with a root of unity as leading coefficient.
fn unit_series() -> impl Strategy<Value = QSeries> {
    (0i64..6, 0i64..8, prop::collection::vec((1i64..30, small_cyclo()), 0..6), 20i64..50).prop_map(|(lead, k, rest, cutoff)| {
        let mut terms = vec![(lead, CycloNumber::from_root_power(8, k))];
        terms.extend(rest.into_iter().map(|(e, c)| (lead + e, c)));
        QSeries::from_terms(4, cutoff, terms)
    })
}

fn agree(a: &QSeries, b: &QSeries) -> bool {
    let t = a.cutoff().min(b.cutoff());
    a.truncate(t).same_terms(&b.truncate(t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms_order_24(a in cyclo(24), b in cyclo(24), c in cyclo(24)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &CycloNumber::one(24), a.clone());
    }

    #[test]
    fn field_axioms_order_64(a in cyclo(64), b in cyclo(64), c in cyclo(64)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &(-&a), CycloNumber::zero(64));
    }

    #[test]
    fn canonical_coordinates(coeffs in prop::collection::vec(-5i64..=5, 24), shift in 0i64..3) {
        // The same element written with exponents shifted by whole periods
        // reduces to identical coordinates, also after a round trip through 576.
        let build = |s: i64| coeffs.iter().enumerate().fold(CycloNumber::zero(24), |acc, (k, &c)| {
            &acc + &CycloNumber::from_root_power(24, k as i64 + 24 * s).scalar_mul(&rat(c, 1))
        });
        let a = build(0);
        let b = build(shift);
        prop_assert_eq!(a.coords(), b.coords());
        let up = a.embed(576).unwrap();
        let back = up.restrict(24).unwrap();
        prop_assert_eq!(back.coords(), a.coords());
        prop_assert_eq!(a.minimal_form(), a.clone());
        prop_assert!(a.minimal_form().order() <= 24);
    }

    #[test]
    fn root_power_composition(k in -600i64..600, j in -600i64..600) {
        let z = |e| CycloNumber::from_root_power(576, e);
        prop_assert_eq!(&z(k) * &z(j), z(k + j));
        prop_assert_eq!(root_of_unity(&BigRational::new(k.into(), 576.into())), z(k));
    }

    #[test]
    fn series_ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert!(agree(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        prop_assert!(agree(&a.mul(&b).unwrap().mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap()));
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(agree(&left, &right));
        prop_assert!(a.sub(&a).unwrap().is_empty());
        prop_assert_eq!(a.sub(&a).unwrap().cutoff(), a.cutoff());
    }

    #[test]
    fn inverse_is_a_two_sided_unit(a in unit_series()) {
        let inv = a.invert().unwrap();
        let prod = a.mul(&inv).unwrap();
        prop_assert!(agree(&prod, &QSeries::one(4)), "{} * {} = {}", a, inv, prod);
        prop_assert!(prod.cutoff() >= 0);
    }

    #[test]
    fn rescale_is_multiplicative(a in series(), b in series(), k in 1u32..5) {
        let lhs = a.mul(&b).unwrap().rescale_tau(k);
        let rhs = a.rescale_tau(k).mul(&b.rescale_tau(k)).unwrap();
        prop_assert!(agree(&lhs, &rhs));
        let floor = i64::from(k) * a.cutoff().min(b.cutoff());
        prop_assert!(lhs.cutoff() >= floor && rhs.cutoff() >= floor);
    }

    #[test]
    fn regrade_preserves_products(a in series(), b in series(), m in 1u32..5) {
        let lhs = a.mul(&b).unwrap().regrade(4 * m).unwrap();
        let rhs = a.regrade(4 * m).unwrap().mul(&b.regrade(4 * m).unwrap()).unwrap();
        prop_assert!(agree(&lhs, &rhs));
        let ab = a.mul(&b).unwrap();
        for e in 0..=ab.cutoff().min(200) {
            prop_assert_eq!(lhs.coefficient(e * i64::from(m)).unwrap(), ab.coefficient(e).unwrap());
        }
    }

    #[test]
    fn truncated_products_are_sound(
        pa in prop::collection::vec((0i64..50, small_cyclo()), 1..10),
        pb in prop::collection::vec((0i64..50, small_cyclo()), 1..10),
        ta in 0i64..50,
        tb in 0i64..50,
    ) {
        // Every coefficient claimed by the truncated product agrees with the
        // product of the untruncated polynomials.
        let full = QSeries::from_terms(4, EXACT, pa.clone()).mul(&QSeries::from_terms(4, EXACT, pb.clone())).unwrap();
        let cut = QSeries::from_terms(4, ta, pa).mul(&QSeries::from_terms(4, tb, pb)).unwrap();
        for e in 0..=cut.cutoff().min(120) {
            prop_assert_eq!(cut.coefficient(e).unwrap(), full.coefficient(e).unwrap(), "exponent {}", e);
        }
    }

    #[test]
    fn theta_reduction_and_parity(ei in -8i64..=8, epi in -8i64..=8, den in prop::sample::select(vec![1i64, 2, 3, 4]), k in 1u32..4) {
        let eps = rat(ei, den);
        let epsp = rat(epi, den);
        let th = |e: &BigRational, ep: &BigRational| {
            let c = Characteristic::new(e.clone(), ep.clone()).at_scale(k);
            (thetaforms::theta_constant(&c, 576, 576 * 8).unwrap(), thetaforms::theta_deriv_normalized(&c, 576, 576 * 8).unwrap())
        };
        let two = rat(2, 1);
        let (t, d) = th(&eps, &epsp);
        let (t_shift, d_shift) = th(&(&eps + &two), &epsp);
        prop_assert!(t.same_terms(&t_shift));
        prop_assert!(d.same_terms(&d_shift));
        // Shifting ε′ by 2 multiplies by exp(πiε).
        let phase = root_of_unity(&(&eps / &two));
        let (t_p, d_p) = th(&eps, &(&epsp + &two));
        prop_assert!(t_p.same_terms(&t.scale(&phase)));
        prop_assert!(d_p.same_terms(&d.scale(&phase)));
        let (t_neg, d_neg) = th(&-eps.clone(), &-epsp.clone());
        prop_assert!(t_neg.same_terms(&t));
        prop_assert!(d_neg.same_terms(&d.neg()));
    }

    #[test]
    fn lambert_times_theta_is_the_derivative(v in prop::sample::select(LambertVariant::ALL.to_vec()), window in 5i64..80) {
        let c = Characteristic::new(rat(1, 1), v.epsp());
        let d = c.natural_grading();
        let t = window * i64::from(d);
        let lhs = arith::lambert_logderiv_series(v, d, t).mul(&thetaforms::theta_constant(&c, d, t).unwrap()).unwrap();
        let rhs = thetaforms::theta_deriv_normalized(&c, d, t).unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        prop_assert!(diff.is_empty());
        prop_assert!(diff.cutoff() >= t);
    }
}

// ---------------------------------------------------------------------------
// DSL

fn signed_rat() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, prop::sample::select(vec![1i64, 2, 3, 4, 8])).prop_map(|(n, d)| rat(n, d))
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (signed_rat(), signed_rat(), 1u32..5).prop_map(|(e, ep, k)| Expr::theta(Characteristic::new(e, ep).at_scale(k))),
        (signed_rat(), signed_rat(), 1u32..5).prop_map(|(e, ep, k)| Expr::dtheta(Characteristic::new(e, ep).at_scale(k))),
        (1u32..6).prop_map(|k| Expr::Atom(Atom::Eta(k))),
        (prop::collection::vec((1u32..5, -9i32..10), 1..4), signed_rat())
            .prop_map(|(f, p)| Expr::Atom(Atom::EtaQ(EtaQuotientSpec::new(f, p)))),
        Just(Expr::Atom(Atom::FarkasProd)),
        prop::sample::select(LambertVariant::ALL.to_vec()).prop_map(|v| Expr::Atom(Atom::Lambert(v))),
        prop::sample::select(GfKind::ALL.to_vec()).prop_map(|g| Expr::Atom(Atom::Gf(g))),
        (0i64..30, 1i64..9).prop_map(|(n, d)| Expr::Const(Const::Rational(rat(n, d)))),
        (1u32..50, -20i64..20).prop_map(|(order, power)| Expr::zeta(order, power)),
        Just(Expr::Const(Const::Sqrt2)),
        Just(Expr::Const(Const::Sqrt3)),
        Just(Expr::Const(Const::I)),
    ]
}

fn ast() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 48, 4, |inner| {
        prop_oneof![
            (inner.clone(), prop::collection::vec((any::<bool>(), inner.clone()), 1..4)).prop_map(|(first, rest)| {
                let mut terms = vec![(Sign::Plus, first)];
                terms.extend(rest.into_iter().map(|(m, e)| (if m { Sign::Minus } else { Sign::Plus }, e)));
                Expr::Sum(terms)
            }),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Product),
            (inner.clone(), 0u32..6).prop_map(|(b, n)| b.pow(n)),
            inner.prop_map(|e| -e),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_print(lhs in ast(), rhs in ast()) {
        let id = Identity::new(lhs, rhs);
        let text = id.to_string();
        let parsed = dsl::parse_identity(&text);
        prop_assert!(parsed.is_ok(), "{:?} for {}", parsed, text);
        prop_assert_eq!(parsed.unwrap(), id, "{}", text);
    }
}

const ALPHABET: &[&str] = &[
    "theta", "dtheta", "eta", "etaq", "farkasprod", "lambert", "gf", "zeta", "sqrt2", "sqrt3", "I", "half", "s2", "kron2",
    "[", "]", "(", ")", "{", "}", ",", ";", "+", "-", "*", "^", "/", "==", "=", "0", "1", "3", "4", "17",
    "99999999999999999999", " ", "\n", "#", "é", "\t",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5_000))]

    #[test]
    fn fuzz_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..80)) {
        let text = String::from_utf8_lossy(&bytes);
        match dsl::parse_identity(&text) {
            Ok(id) => { let _ = dsl::elaborate(id, None); }
            Err(e) => prop_assert!(e.line >= 1 && e.col >= 1 && !e.token.is_empty()),
        }
    }

    #[test]
    fn fuzz_tokens_never_panic(toks in prop::collection::vec(prop::sample::select(ALPHABET.to_vec()), 0..40)) {
        let text = toks.concat();
        match dsl::parse_file(&text) {
            Ok(ids) => for (_, id) in ids { let _ = dsl::elaborate(id, None); },
            Err(e) => prop_assert!(e.line >= 1 && e.col >= 1 && !e.token.is_empty()),
        }
    }
}
