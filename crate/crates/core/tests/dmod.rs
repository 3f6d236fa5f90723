mod common;

use common::*;
use diffaz_core::dmod::{
    alpha_transport_check, dual_pairing_check, hom_tensor_iso_check, morita_check, tensor_leibniz_check,
    DiffModule, ModuleMap,
};
use diffaz_core::{DiffRing, Mat};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nilpotent(r: &DiffRing) -> Mat {
    mat(r, &[&["0", "1"], &["0", "0"]])
}

fn random_module(r: &DiffRing, rng: &mut ChaCha8Rng, n: usize) -> DiffModule {
    DiffModule::free(r, random_matrix(r, rng, n, 2)).unwrap()
}

#[test]
fn free_module_basics() {
    let r = qx();
    let m = DiffModule::trivial(&r, 2);
    let v = m.apply_delta(&[el(&r, "x^2"), r.one()]).unwrap();
    assert_el(&r, &v[0], "2*x");
    assert_el(&r, &v[1], "0");

    let n = DiffModule::free(&r, nilpotent(&r)).unwrap();
    let e2 = n.apply_delta(&[r.zero(), r.one()]).unwrap();
    assert!(r.is_one(&e2[0]) && r.is_zero(&e2[1]));
    // δ(x·e₂) = e₂ + x·e₁
    let v = n.apply_delta(&[r.zero(), el(&r, "x")]).unwrap();
    assert_el(&r, &v[0], "x");
    assert_el(&r, &v[1], "1");
    assert!(n.apply_delta(&[r.zero(), r.zero()]).unwrap().iter().all(|x| r.is_zero(x)));

    let bad = Mat::from_fn(2, 3, |_, _| r.zero());
    assert_eq!(DiffModule::free(&r, bad).unwrap_err().kind(), "ShapeMismatch");
    assert_eq!(n.apply_delta(&[r.one()]).unwrap_err().kind(), "ShapeMismatch");
}

/// Dual connection from the pairing: `(δe_j^∨)(e_k) = −e_j^∨(δe_k) = −D_jk`.
fn dual_by_pairing(r: &DiffRing, d: &Mat) -> Mat {
    Mat::from_fn(d.rows(), d.cols(), |k, j| r.neg(d.get(j, k)))
}

#[test]
fn dual_connection() {
    let r = qx();
    let m = DiffModule::free(&r, nilpotent(&r)).unwrap();
    let dual = m.dual();
    assert!(r.mat_eq(dual.connection(), &mat(&r, &[&["0", "0"], &["-1", "0"]])));
    assert!(r.mat_eq(dual.connection(), &dual_by_pairing(&r, m.connection())));
    assert!(r.mat_eq(dual.dual().connection(), m.connection()));
    assert!(r.mat_is_zero(DiffModule::trivial(&r, 3).dual().connection()));
    assert!(dual_pairing_check(&m, &[]).unwrap().passed());
}

#[test]
fn tensor_connection() {
    let r = qx();
    let a = DiffModule::free(&r, mat(&r, &[&["x"]])).unwrap();
    let b = DiffModule::free(&r, mat(&r, &[&["x^2 + 1"]])).unwrap();
    assert_el(&r, a.tensor(&b).unwrap().connection().get(0, 0), "x^2 + x + 1");
    assert!(r.mat_is_zero(DiffModule::trivial(&r, 2).tensor(&DiffModule::trivial(&r, 2)).unwrap().connection()));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = random_module(&r, &mut rng, 2);
    let n = random_module(&r, &mut rng, 2);
    assert!(tensor_leibniz_check(&m, &n, &[]).unwrap().passed());

    let other = DiffModule::trivial(&laurent(), 1);
    assert_eq!(m.tensor(&other).unwrap_err().kind(), "RingMismatch");
}

#[test]
fn hom_module() {
    let r = qx();
    let m = DiffModule::free(&r, nilpotent(&r)).unwrap();
    // δ(id) = D − D = 0
    let did = DiffModule::hom_delta(&m, &m, &r.mat_identity(2)).unwrap();
    assert!(r.mat_is_zero(&did));
    let f = ModuleMap::new(&m, &m, r.mat_identity(2)).unwrap();
    assert!(f.is_differential());
    let g = ModuleMap::new(&m, &m, mat(&r, &[&["x", "0"], &["0", "0"]])).unwrap();
    assert!(!g.is_differential());

    let t = DiffModule::trivial(&r, 2);
    let g = mat(&r, &[&["x^2", "x"], &["1", "0"]]);
    let dg = DiffModule::hom_delta(&t, &t, &g).unwrap();
    assert!(r.mat_eq(&dg, &r.mat_d(&g)));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (a, b) in [(1, 2), (2, 1), (2, 2)] {
        let m = random_module(&r, &mut rng, a);
        let n = random_module(&r, &mut rng, b);
        let sample = Mat::from_fn(b, a, |_, _| random_element(&r, &mut rng, 2));
        let report = alpha_transport_check(&m, &n, &[sample]).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn hom_tensor_iso_cases() {
    let r = qx();
    let one = DiffModule::trivial(&r, 1);
    assert!(hom_tensor_iso_check(&one, &one, &one, &one).unwrap().passed());
    let two = DiffModule::trivial(&r, 2);
    assert!(hom_tensor_iso_check(&two, &two, &two, &two).unwrap().passed());
}

#[test]
fn morita_small_cases() {
    let r = qx();
    assert!(morita_check(&DiffModule::trivial(&r, 1)).unwrap().passed());
    assert!(morita_check(&DiffModule::trivial(&r, 2)).unwrap().passed());
    let report = morita_check(&DiffModule::free(&r, nilpotent(&r)).unwrap()).unwrap();
    assert!(report.passed(), "{report}");
    assert_eq!(report.items.len(), 8);
}

#[test]
fn morita_ranks_one_to_three() {
    let r = qx();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=3 {
        let upper = Mat::from_fn(n, n, |i, j| if j > i { random_element(&r, &mut rng, 1) } else { r.zero() });
        let random = random_matrix(&r, &mut rng, n, 1);
        for d in [r.mat_zero(n, n), upper, random] {
            let report = morita_check(&DiffModule::free(&r, d).unwrap()).unwrap();
            assert!(report.passed(), "rank {n}: {report}");
        }
    }
}

#[test]
fn base_change_along_cover() {
    let (a, b) = sqrt_cover();
    let m = DiffModule::free(&a, mat(&a, &[&["1/x"]])).unwrap();
    let inc = diffaz_core::RingHom::inclusion(&a, &b).unwrap();
    let mb = m.base_change(&inc).unwrap();
    assert_el(&b, mb.connection().get(0, 0), "1/x");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scalar_leibniz_on_modules(seed in any::<u64>()) {
        let r = qx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=2);
        let m = random_module(&r, &mut rng, n);
        for module in [m.clone(), m.dual(), m.tensor(&m).unwrap(), DiffModule::hom(&m, &m).unwrap()] {
            let k = module.rank();
            let a = random_element(&r, &mut rng, 2);
            let v: Vec<_> = (0..k).map(|_| random_element(&r, &mut rng, 2)).collect();
            let av: Vec<_> = v.iter().map(|x| r.mul(&a, x)).collect();
            let lhs = module.apply_delta(&av).unwrap();
            let dv = module.apply_delta(&v).unwrap();
            for i in 0..k {
                let rhs = r.add(&r.mul(&r.d(&a), &v[i]), &r.mul(&a, &dv[i]));
                prop_assert!(r.eq(&lhs[i], &rhs));
            }
        }
    }

    #[test]
    fn dual_is_involutive_and_pairs(seed in any::<u64>()) {
        let r = qx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=2);
        let m = random_module(&r, &mut rng, n);
        prop_assert!(r.mat_eq(m.dual().dual().connection(), m.connection()));
        prop_assert!(r.mat_eq(m.dual().connection(), &dual_by_pairing(&r, m.connection())));
        let f: Vec<_> = (0..n).map(|_| random_element(&r, &mut rng, 2)).collect();
        let p: Vec<_> = (0..n).map(|_| random_element(&r, &mut rng, 2)).collect();
        prop_assert!(dual_pairing_check(&m, &[(f, p)]).unwrap().passed());
    }

    #[test]
    fn hom_derivation_is_leibniz(seed in any::<u64>()) {
        let r = qx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let m = random_module(&r, &mut rng, a);
        let n = random_module(&r, &mut rng, b);
        let g = Mat::from_fn(b, a, |_, _| random_element(&r, &mut rng, 2));
        let v: Vec<_> = (0..a).map(|_| random_element(&r, &mut rng, 2)).collect();
        let lhs = n.apply_delta(&r.mat_vec(&g, &v).unwrap()).unwrap();
        let dg = DiffModule::hom_delta(&m, &n, &g).unwrap();
        let t1 = r.mat_vec(&dg, &v).unwrap();
        let t2 = r.mat_vec(&g, &m.apply_delta(&v).unwrap()).unwrap();
        for i in 0..b {
            prop_assert!(r.eq(&lhs[i], &r.add(&t1[i], &t2[i])));
        }
    }

    #[test]
    fn tensor_is_associative(seed in any::<u64>()) {
        let r = qx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&r, &mut rng, 2);
        let n = random_module(&r, &mut rng, 1);
        let p = random_module(&r, &mut rng, 2);
        let left = m.tensor(&n).unwrap().tensor(&p).unwrap();
        let right = m.tensor(&n.tensor(&p).unwrap()).unwrap();
        prop_assert!(r.mat_eq(left.connection(), right.connection()));
    }

    #[test]
    fn hom_tensor_iso_random(seed in any::<u64>()) {
        let r = qx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || { let n = rng.gen_range(1..=2); random_module(&r, &mut rng, n) };
        let (p, q, p2, q2) = (pick(), pick(), pick(), pick());
        prop_assert!(hom_tensor_iso_check(&p, &q, &p2, &q2).unwrap().passed());
    }
}
