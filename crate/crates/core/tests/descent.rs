mod common;

use common::*;
use diffaz_core::azumaya::DiffMatrixAlgebra;
use diffaz_core::descent::{
    descend_algebra, descend_module, descended_morphism, quaternion_example, quaternion_presentation,
    twisted_form_equiv, vectorize, DescentDatum,
};
use diffaz_core::dmod::DiffModule;
use diffaz_core::{Amalgam, DiffRing, Error, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sqrt_amalgam() -> (DiffRing, DiffRing, Amalgam) {
    let (a, b) = sqrt_cover();
    let am = Amalgam::over(&a, &b, 3).unwrap();
    (a, b, am)
}

/// `t₁/t₂` over `B⊗B`.
fn sqrt_ratio(am: &Amalgam) -> diffaz_core::El {
    el(am.level(2).unwrap(), "t/t_2")
}

#[test]
fn canonical_module_descends_to_itself() {
    let (a, _, am) = sqrt_amalgam();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=2 {
        let m = DiffModule::free(&a, random_matrix(&a, &mut rng, n, 2)).unwrap();
        let d = DescentDatum::canonical(&am, &m).unwrap();
        assert!(d.cocycle_check().unwrap());
        let g = descend_module(&d).unwrap();
        assert!(g.report.passed(), "{}", g.report);
        assert!(a.mat_eq(g.module.connection(), m.connection()));
        assert!(am.cover().mat_eq(&g.basis, &am.cover().mat_identity(n)));
    }
}

#[test]
fn rank_one_sqrt_datum() {
    let (a, b, am) = sqrt_amalgam();
    let r2 = am.level(2).unwrap();
    let phi = r2.mat_scalar(1, &sqrt_ratio(&am));
    let d = DescentDatum::new_module(&am, DiffModule::trivial(&b, 1), phi).unwrap();
    assert!(d.cocycle_check().unwrap());
    let g = descend_module(&d).unwrap();
    assert!(g.report.passed(), "{}", g.report);
    // the fixed line is A·t: t₁²/t₂ = x/t₂ = t₂
    let t = el(&b, "t");
    let ratio = b.div(g.basis.get(0, 0), &t).unwrap();
    let lam = b.restrict_to(&a, &ratio).expect("basis is an A-multiple of t");
    assert!(a.inverse(&lam).is_some());
    // δ(t·e) = δ(t)·e = t/(2x)·e
    assert_el(&a, g.module.connection().get(0, 0), "1/(2*x)");
}

#[test]
fn non_cocycle_is_rejected() {
    let (_, b, am) = sqrt_amalgam();
    let r2 = am.level(2).unwrap();
    let phi = r2.mat_scalar(1, &r2.mul(&r2.from_int(2), &sqrt_ratio(&am)));
    let d = DescentDatum::new_module(&am, DiffModule::trivial(&b, 1), phi).unwrap();
    assert!(!d.cocycle_check().unwrap());
    assert_eq!(descend_module(&d).unwrap_err(), Error::CocycleFailed);

    // diag(1, t₁/t₂) is a cocycle; diag(1, −1) is not, since (−1)·(−1) ≠ −1
    let good = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => r2.one(),
        (1, 1) => sqrt_ratio(&am),
        _ => r2.zero(),
    });
    let d = DescentDatum::new_module(&am, DiffModule::trivial(&b, 2), good).unwrap();
    assert!(d.cocycle_check().unwrap());
    let bad = r2.mat_diag(&[r2.one(), r2.from_int(-1)]);
    let d = DescentDatum::new_module(&am, DiffModule::trivial(&b, 2), bad).unwrap();
    assert!(!d.cocycle_check().unwrap());
}

#[test]
fn datum_validation() {
    let (_, b, am) = sqrt_amalgam();
    let r2 = am.level(2).unwrap();
    let singular = r2.mat_scalar(1, &el(r2, "1 + t*t_2/x"));
    assert_eq!(DescentDatum::new_module(&am, DiffModule::trivial(&b, 1), singular).unwrap_err(), Error::NotInvertible);
    let not_diff = r2.mat_scalar(1, &el(r2, "t"));
    assert_eq!(
        DescentDatum::new_module(&am, DiffModule::trivial(&b, 1), not_diff).unwrap_err().kind(),
        "NotDifferential"
    );
    let wrong = r2.mat_identity(2);
    assert_eq!(DescentDatum::new_module(&am, DiffModule::trivial(&b, 1), wrong).unwrap_err().kind(), "ShapeMismatch");
    // scalar multiplication by 2 is linear but not multiplicative
    let alg = DiffMatrixAlgebra::coordinatewise(&b, 2);
    let twice = r2.mat_scalar(4, &r2.from_int(2));
    assert_eq!(DescentDatum::new_algebra(&am, alg, twice).unwrap_err().kind(), "NotAlgebraMap");
}

#[test]
fn canonical_algebra_descends_to_matrices() {
    let (a, _, am) = sqrt_amalgam();
    let alg = DiffMatrixAlgebra::coordinatewise(&a, 2);
    let d = DescentDatum::canonical_algebra(&am, &alg).unwrap();
    let g = descend_algebra(&d).unwrap();
    assert!(g.report.passed(), "{}", g.report);
    assert_eq!(g.rank(), 4);
    assert!(a.mat_is_zero(&g.derivation));
    // basis is the matrix units, so E_ab·E_cd = δ_bc·E_ad
    for p in 0..4 {
        for q in 0..4 {
            let expected: Vec<i64> =
                (0..4).map(|l| i64::from(p % 2 == q / 2 && l == (p / 2) * 2 + q % 2)).collect();
            for l in 0..4 {
                assert!(a.eq(&g.structure[p][q][l], &a.from_int(expected[l])));
            }
        }
    }
}

#[test]
fn quaternion_descent() {
    let ex = quaternion_example(3).unwrap();
    let d = &ex.datum;
    assert!(d.cocycle_check().unwrap());
    let g = descend_algebra(d).unwrap();
    assert!(g.report.passed(), "{}", g.report);
    assert_eq!(g.rank(), 4);
    let (a, b) = (g.ring().clone(), g.cover().clone());

    // independent oracle: i = diag(t, −t) and j = [[0,1],[x,0]] are fixed by φ
    let am = &ex.amalgam;
    let r2 = am.level(2).unwrap();
    let i0 = mat(&b, &[&["t", "0"], &["0", "-t"]]);
    let j0 = mat(&b, &[&["0", "1"], &["x", "0"]]);
    for x in [&i0, &j0] {
        let v = vectorize(x);
        let v1: Vec<_> = v.iter().map(|e| am.embedding(2, 1).unwrap().apply(e)).collect();
        let v2: Vec<_> = v.iter().map(|e| am.embedding(2, 2).unwrap().apply(e)).collect();
        let lhs = r2.mat_vec(d.phi(), &v1).unwrap();
        assert!(lhs.iter().zip(&v2).all(|(p, q)| r2.eq(p, q)));
        assert!(g.coords_of(x).is_ok());
    }
    // Δ(i) = i/(2x), Δ(j) = j/(2x)
    for x in [&i0, &j0] {
        let dx = ex.algebra.delta(x).unwrap();
        assert!(b.mat_eq(&dx, &b.mat_scale(x, &el(&b, "1/(2*x)"))));
    }

    let q = quaternion_presentation(&g).unwrap();
    assert!(q.report.passed(), "{}", q.report);
    let (im, jm, km) = (g.to_matrix(&q.i).unwrap(), g.to_matrix(&q.j).unwrap(), g.to_matrix(&q.k).unwrap());
    let sq = |m: &Mat| b.mat_mul(m, m).unwrap();
    let ea = b.embed(&a, &q.a).unwrap();
    let eb = b.embed(&a, &q.b).unwrap();
    assert!(b.mat_eq(&sq(&im), &b.mat_scalar(2, &ea)));
    assert!(b.mat_eq(&sq(&jm), &b.mat_scalar(2, &eb)));
    assert!(b.is_zero(&b.trace(&im)) && b.is_zero(&b.trace(&jm)));
    let ij = b.mat_mul(&im, &jm).unwrap();
    let ji = b.mat_mul(&jm, &im).unwrap();
    assert!(b.mat_eq(&ij, &b.mat_neg(&ji)));
    assert!(b.mat_eq(&ij, &km));
    assert!(!a.is_zero(&q.a) && !a.is_zero(&q.b));
}

#[test]
fn quaternion_example_needs_level_three() {
    assert_eq!(quaternion_example(2).unwrap_err().kind(), "UnsupportedTower");
}

#[test]
fn equivalent_data_descend_isomorphically() {
    let (a, b, am) = sqrt_amalgam();
    let r2 = am.level(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let phi = r2.mat_diag(&[r2.one(), sqrt_ratio(&am)]);
    let d = DescentDatum::new_module(&am, DiffModule::trivial(&b, 2), phi.clone()).unwrap();
    assert!(twisted_form_equiv(&d, &d, &b.mat_identity(2)).unwrap());

    for _ in 0..3 {
        let r = random_element(&b, &mut rng, 2);
        let alpha = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => r.clone(),
            (i, j) if i == j => b.from_int(rng.gen_range(1..=3)),
            _ => b.zero(),
        });
        let inv = b.mat_inverse(&alpha).unwrap();
        // gauge transform so that alpha is differential: D′ = −α′·α⁻¹ (D = 0)
        let d2conn = b.mat_neg(&b.mat_mul(&b.mat_d(&alpha), &inv).unwrap());
        let i1 = am.embedding(2, 1).unwrap();
        let i2 = am.embedding(2, 2).unwrap();
        let phi2 = r2.mat_product(&[&i2.apply_mat(&alpha), &phi, &i1.apply_mat(&inv)]).unwrap();
        let d2 = DescentDatum::new_module(&am, DiffModule::free(&b, d2conn).unwrap(), phi2).unwrap();
        assert!(d2.cocycle_check().unwrap());
        assert!(twisted_form_equiv(&d, &d2, &alpha).unwrap());

        let g1 = descend_module(&d).unwrap();
        let g2 = descend_module(&d2).unwrap();
        let f = descended_morphism(&g1, &g2, &alpha).unwrap();
        assert!(a.is_invertible(&f));
    }

    let other = DescentDatum::canonical(&am, &DiffModule::trivial(&a, 2)).unwrap();
    assert!(!twisted_form_equiv(&d, &other, &b.mat_identity(2)).unwrap());
    assert_eq!(twisted_form_equiv(&d, &other, &b.mat_identity(1)).unwrap_err().kind(), "ShapeMismatch");
}
