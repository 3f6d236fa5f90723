mod common;

use common::*;
use diffaz_core::ring::LayerKind;
use diffaz_core::{Amalgam, DiffRing, Error, Rational, RingHom};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn polynomial_base_ring() {
    let r = qx();
    assert_el(&r, &r.d(&el(&r, "x^2")), "2*x");
    assert_el(&r, &r.d(&el(&r, "x^3")), "3*x^2");
    assert!(r.is_zero(&r.d(&r.one())));

    let q = DiffRing::base(&[], &[]).unwrap();
    let c = q.parse("3/7").unwrap();
    assert!(q.is_zero(&q.d(&c)));
    assert_eq!(q.as_rational(&c), Some(Rational::new(3.into(), 7.into())));

    assert_eq!(DiffRing::base(&["x"], &[("x", "y")]).unwrap_err(), Error::UnknownVariable("y".into()));
    assert_eq!(DiffRing::base(&["x", "x"], &[]).unwrap_err(), Error::DuplicateName("x".into()));
}

#[test]
fn localization() {
    let a = laurent();
    assert_eq!(a.kind(), LayerKind::Localization);
    let inv = a.inverse(&el(&a, "x")).unwrap();
    assert_el(&a, &inv, "1/x");
    assert_el(&a, &a.d(&inv), "-1/x^2");

    let r = qx();
    let trivial = r.localize(&r.one()).unwrap();
    let p = el(&trivial, "x^2 + 1");
    assert_eq!(trivial.format(&p), "x^2 + 1");
    assert!(r.inverse(&el(&r, "x")).is_none());

    assert_eq!(r.localize(&r.zero()).unwrap_err(), Error::ZeroDenominator);

    // t − 1 is a zero divisor in Q[t]/(t² − 1)
    let split = DiffRing::rationals().monic_quotient_expr("t", "t^2 - 1").unwrap();
    let e = el(&split, "t - 1");
    assert_eq!(split.localize(&e).unwrap_err().kind(), "ZeroDivisorDenominator");
}

#[test]
fn localized_equality_cross_multiplies() {
    let r = qx();
    let f = el(&r, "x + 1");
    let a = r.localize(&f).unwrap();
    let lhs = el(&a, "(x^2 + 2*x + 1)/(x+1)^2");
    assert!(a.is_one(&lhs));
    let w = el(&a, "x/(x + 1)");
    assert_el(&a, &a.d(&w), "1/(x+1)^2");
    assert!(a.inverse(&el(&a, "x")).is_none());
    assert_el(&a, &a.inverse(&el(&a, "(x+1)^3")).unwrap(), "1/(x+1)^3");
}

#[test]
fn adjunction() {
    let r = qx();
    let ru = r.adjoin(&["U"], &[("U", "x*U")]).unwrap();
    assert_el(&ru, &ru.d(&el(&ru, "U")), "x*U");
    assert_el(&ru, &ru.d(&el(&ru, "U^2")), "2*x*U^2");

    let qt = DiffRing::rationals().adjoin(&["T"], &[("T", "0")]).unwrap();
    assert!(qt.is_zero(&qt.d(&el(&qt, "T^3"))));

    assert_eq!(r.adjoin(&["T"], &[("T", "W")]).unwrap_err(), Error::UnknownVariable("W".into()));
    assert_eq!(r.adjoin(&["x"], &[]).unwrap_err(), Error::DuplicateName("x".into()));
}

/// Solve `f′(t)·δt = −f^δ(t)` for `f = t² − x` by Cramer's rule over `A`, writing
/// `δt = a + b·t`: `2t(a + bt) = 2bx + 2at`, so `[[0, 2x], [2, 0]]·[a, b] = [1, 0]`.
fn cramer_sqrt_derivative(a: &DiffRing) -> (diffaz_core::El, diffaz_core::El) {
    let m = [[a.zero(), el(a, "2*x")], [el(a, "2"), a.zero()]];
    let rhs = [a.one(), a.zero()];
    let det = a.sub(&a.mul(&m[0][0], &m[1][1]), &a.mul(&m[0][1], &m[1][0]));
    let det_a = a.sub(&a.mul(&rhs[0], &m[1][1]), &a.mul(&m[0][1], &rhs[1]));
    let det_b = a.sub(&a.mul(&m[0][0], &rhs[1]), &a.mul(&rhs[0], &m[1][0]));
    (a.div(&det_a, &det).unwrap(), a.div(&det_b, &det).unwrap())
}

#[test]
fn square_root_quotient() {
    let (a, b) = sqrt_cover();
    let dt = b.d(&el(&b, "t"));
    let coords = b.coords_over(&a, &dt).unwrap();
    let (oa, ob) = cramer_sqrt_derivative(&a);
    assert!(a.eq(&coords[0], &oa));
    assert!(a.eq(&coords[1], &ob));
    assert_el(&b, &dt, "t/(2*x)");
    let check = b.sub(&b.mul(&el(&b, "2*t"), &dt), &b.one());
    assert!(b.is_zero(&check));

    let (f, df) = b.relation_check().unwrap();
    assert!(b.is_zero(&f) && b.is_zero(&df));

    assert_el(&b, &b.inverse(&el(&b, "t")).unwrap(), "t/x");
    assert_eq!(b.free_rank_over(&a).unwrap(), 2);
}

#[test]
fn degenerate_and_non_etale_quotients() {
    let q = DiffRing::rationals();
    let lin = q.monic_quotient_expr("t", "t - 5").unwrap();
    let t = el(&lin, "t");
    assert_eq!(lin.as_rational(&t), Some(Rational::from_integer(5.into())));
    assert!(lin.is_zero(&lin.d(&t)));

    let r = qx();
    assert_eq!(r.monic_quotient_expr("t", "t^2").unwrap_err(), Error::NotEtale);
    assert_eq!(r.monic_quotient_expr("t", "2*t^2 - x").unwrap_err().kind(), "NotMonic");
}

#[test]
fn cubic_quotient_over_localized_discriminant() {
    let r = qx();
    let a = r.localize(&el(&r, "4*x^3 - 27")).unwrap();
    let b = a.monic_quotient_expr("t", "t^3 - x*t - 1").unwrap();
    let t = el(&b, "t");
    let dt = b.d(&t);
    // differentiate the relation: (3t² − x)·δt − t = 0
    let lhs = b.sub(&b.mul(&el(&b, "3*t^2 - x"), &dt), &t);
    assert!(b.is_zero(&lhs));
}

#[test]
fn format_round_trips() {
    let (_, b) = sqrt_cover();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let e = random_element(&b, &mut rng, 3);
        let back = b.parse(&b.format(&e)).unwrap();
        assert!(b.eq(&e, &back), "{}", b.format(&e));
    }
}

#[test]
fn ring_homomorphisms() {
    let (a, b) = sqrt_cover();
    let inc = RingHom::inclusion(&a, &b).unwrap();
    assert_el(&b, &inc.apply(&el(&a, "x^2 + 1/x")), "x^2 + 1/x");

    // t ↦ −t is a differential automorphism of B
    let neg = RingHom::new(&b, &b, &[("t", el(&b, "-t"))]).unwrap();
    assert_el(&b, &neg.apply(&el(&b, "1 + t")), "1 - t");

    // t ↦ 1 breaks the relation
    assert_eq!(RingHom::new(&b, &b, &[("t", b.one())]).unwrap_err().kind(), "InvalidHom");

    // x ↦ 2x is not differential for δx = 1
    let r = qx();
    assert_eq!(RingHom::new(&r, &r, &[("x", el(&r, "2*x"))]).unwrap_err().kind(), "InvalidHom");

    // x ↦ 0 sends the localized denominator to a non-unit
    let l = laurent();
    let err = RingHom::new(&l, &DiffRing::base(&["x"], &[("x", "1")]).unwrap(), &[]).unwrap_err();
    assert_eq!(err.kind(), "InvalidHom");
}

#[test]
fn amalgam_levels_and_cofaces() {
    let (a, b) = sqrt_cover();
    let am = Amalgam::over(&a, &b, 3).unwrap();
    assert_eq!(am.level(1).unwrap(), &b);
    let b2 = am.level(2).unwrap();
    let t1 = am.embedding(2, 1).unwrap().apply(&el(&b, "t"));
    let t2 = am.embedding(2, 2).unwrap().apply(&el(&b, "t"));
    assert!(!b2.eq(&t1, &t2));
    assert_el(b2, &t2, "t_2");
    assert_el(b2, &b2.mul(&t2, &t2), "x");
    assert_el(b2, &b2.d(&t2), "t_2/(2*x)");
    assert_eq!(b2.free_rank_over(&a).unwrap(), 4);

    // level 1 → 2 cofaces: e_0(t) = 1⊗t, e_1(t) = t⊗1
    assert_el(b2, &am.coface(1, 0).unwrap().apply(&el(&b, "t")), "t_2");
    assert_el(b2, &am.coface(1, 1).unwrap().apply(&el(&b, "t")), "t");

    assert!(am.simplicial_identities_hold());
    for k in 1..3 {
        for i in 0..=k {
            assert!(am.coface(k, i).unwrap().is_differential());
        }
    }
    assert_eq!(am.level(4).unwrap_err().kind(), "UnsupportedTower");
    assert!(Amalgam::over(&a, &b, 6).is_err());
    assert!(Amalgam::over(&b, &a, 2).is_err());
}

#[test]
fn trivial_cover_amalgam() {
    let a = laurent();
    let am = Amalgam::over(&a, &a, 3).unwrap();
    assert_eq!(am.level(3).unwrap(), &a);
    assert!(am.coface(2, 1).unwrap().is_differential());
}

#[test]
fn slot_maps_match_cofaces() {
    let (a, b) = sqrt_cover();
    let am = Amalgam::over(&a, &b, 3).unwrap();
    let b2 = am.level(2).unwrap();
    let b3 = am.level(3).unwrap();
    let e = el(b2, "t*t_2 + x*t_2");
    let via_faces = am.coface(2, 1).unwrap().apply(&e);
    let via_slots = am.slot_map(2, 3, &[1, 3]).unwrap().apply(&e);
    assert!(b3.eq(&via_faces, &via_slots));
    assert_el(b3, &via_slots, "t*t_3 + x*t_3");
}

/// Rings covering every layer kind, each paired with a name for failure messages.
fn tower_zoo() -> Vec<(&'static str, DiffRing)> {
    let r = qx();
    let xy = DiffRing::base(&["x", "y"], &[("x", "y"), ("y", "x^2")]).unwrap();
    let loc = r.localize(&el(&r, "x^2 + 1")).unwrap();
    let (a, b) = sqrt_cover();
    let u = a.adjoin(&["U"], &[("U", "x*U")]).unwrap();
    let u_inv = u.localize(&el(&u, "U")).unwrap();
    let disc = r.localize(&el(&r, "4*x^3 - 27")).unwrap();
    let cubic = disc.monic_quotient_expr("s", "s^3 - x*s - 1").unwrap();
    let b2 = Amalgam::over(&a, &b, 2).unwrap().level(2).unwrap().clone();
    vec![
        ("Q[x]", r),
        ("Q[x,y]", xy),
        ("Q[x][1/(x^2+1)]", loc),
        ("Q[x,1/x]", a),
        ("sqrt cover", b),
        ("exp adjunction", u),
        ("exp adjunction localized", u_inv),
        ("cubic", cubic),
        ("B⊗B", b2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leibniz_and_additivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, r) in tower_zoo() {
            let a = random_element(&r, &mut rng, 3);
            let b = random_element(&r, &mut rng, 3);
            let lhs = r.d(&r.mul(&a, &b));
            let rhs = r.add(&r.mul(&r.d(&a), &b), &r.mul(&a, &r.d(&b)));
            prop_assert!(r.eq(&lhs, &rhs), "Leibniz fails in {}", name);
            let sum = r.d(&r.add(&a, &b));
            prop_assert!(r.eq(&sum, &r.add(&r.d(&a), &r.d(&b))), "additivity fails in {}", name);
        }
    }

    #[test]
    fn constants_have_zero_derivative(n in -1000i64..1000, d in 1i64..1000) {
        for (_, r) in tower_zoo() {
            let q = r.from_rational(&Rational::new(n.into(), d.into()));
            prop_assert!(r.is_zero(&r.d(&q)));
        }
    }

    #[test]
    fn inverses_are_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, r) in tower_zoo() {
            let a = random_element(&r, &mut rng, 2);
            if let Some(b) = r.inverse(&a) {
                prop_assert!(r.is_one(&r.mul(&a, &b)), "inverse wrong in {}", name);
                let db = r.neg(&r.mul(&b, &r.mul(&r.d(&a), &b)));
                prop_assert!(r.eq(&r.d(&b), &db), "derivative of inverse wrong in {}", name);
            }
        }
    }

    #[test]
    fn cofaces_commute_with_derivation(seed in any::<u64>()) {
        let (a, b) = sqrt_cover();
        let am = Amalgam::over(&a, &b, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 1..3 {
            let src = am.level(k).unwrap();
            let dst = am.level(k + 1).unwrap();
            let e = random_element(src, &mut rng, 2);
            for i in 0..=k {
                let h = am.coface(k, i).unwrap();
                prop_assert!(dst.eq(&h.apply(&src.d(&e)), &dst.d(&h.apply(&e))));
            }
        }
    }
}
