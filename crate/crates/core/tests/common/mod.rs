#![allow(dead_code)]

use diffaz_core::{DiffRing, El, Mat};
use rand::Rng;

/// `Q[x,1/x]` with `δx = 1`.
pub fn laurent() -> DiffRing {
    let qx = DiffRing::base(&["x"], &[("x", "1")]).unwrap();
    let x = qx.generator("x").unwrap();
    qx.localize(&x).unwrap()
}

/// `Q[x,1/x][t]/(t² − x)`.
pub fn sqrt_cover() -> (DiffRing, DiffRing) {
    let a = laurent();
    let b = a.monic_quotient_expr("t", "t^2 - x").unwrap();
    (a, b)
}

pub fn qx() -> DiffRing {
    DiffRing::base(&["x"], &[("x", "1")]).unwrap()
}

/// Building blocks for random elements: generators plus inverses of localized denominators.
pub fn atoms(r: &DiffRing) -> Vec<El> {
    let mut out: Vec<El> = r.generators().into_iter().map(|(_, g)| g).collect();
    for layer in r.chain() {
        if let Some(inv) = layer.denominator_inverse() {
            out.push(r.embed(&layer, &inv).unwrap());
        }
    }
    out
}

/// Sum of up to four terms `c·a^i·b^j` with `i + j ≤ degree` in at most two atoms.
pub fn random_element<R: Rng>(r: &DiffRing, rng: &mut R, degree: u32) -> El {
    let atoms = atoms(r);
    if atoms.is_empty() {
        return r.from_rational(&diffaz_core::Rational::new(
            rng.gen_range(-9i64..=9).into(),
            rng.gen_range(1i64..=5).into(),
        ));
    }
    let a = &atoms[rng.gen_range(0..atoms.len())];
    let b = &atoms[rng.gen_range(0..atoms.len())];
    let mut acc = r.zero();
    for _ in 0..rng.gen_range(1..=4) {
        let i = rng.gen_range(0..=degree);
        let j = rng.gen_range(0..=degree - i);
        let c = r.from_int(rng.gen_range(-5..=5));
        let t = r.mul(&c, &r.mul(&r.pow(a, i), &r.pow(b, j)));
        acc = r.add(&acc, &t);
    }
    acc
}

pub fn random_matrix<R: Rng>(r: &DiffRing, rng: &mut R, n: usize, degree: u32) -> Mat {
    Mat::from_fn(n, n, |_, _| random_element(r, rng, degree))
}

pub fn mat(r: &DiffRing, rows: &[&[&str]]) -> Mat {
    let rows: Vec<Vec<&str>> = rows.iter().map(|x| x.to_vec()).collect();
    r.mat_parse(&rows).unwrap()
}

pub fn el(r: &DiffRing, s: &str) -> El {
    r.parse(s).unwrap()
}

pub fn assert_el(r: &DiffRing, got: &El, expected: &str) {
    let e = r.parse(expected).unwrap();
    assert!(r.eq(got, &e), "got {}, expected {}", r.format(got), expected);
}
