//! Seeded random elements, units and matrices for property checks.

use diffaz_core::{DiffRing, El, Mat, Rational};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for one check, determined by the run seed and the check position.
pub fn check_rng(seed: u64, check_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (check_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Generators plus inverses of localized denominators.
pub fn atoms(r: &DiffRing) -> Vec<El> {
    let mut out: Vec<El> = r.generators().into_iter().map(|(_, g)| g).collect();
    for layer in r.chain() {
        if let Some(inv) = layer.denominator_inverse() {
            out.push(r.embed(&layer, &inv).expect("ancestor"));
        }
    }
    out
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into())
}

/// Sum of up to four terms `c·a^i·b^j` with `i + j ≤ degree` in two random atoms.
pub fn element<R: Rng>(r: &DiffRing, rng: &mut R, degree: u32) -> El {
    let atoms = atoms(r);
    if atoms.is_empty() {
        return r.from_rational(&small_rational(rng));
    }
    let a = &atoms[rng.gen_range(0..atoms.len())];
    let b = &atoms[rng.gen_range(0..atoms.len())];
    let mut acc = r.zero();
    for _ in 0..rng.gen_range(1..=4) {
        let i = rng.gen_range(0..=degree);
        let j = rng.gen_range(0..=degree - i);
        let t = r.mul(&r.pow(a, i), &r.pow(b, j));
        acc = r.add(&acc, &r.scale(&t, &small_rational(rng)));
    }
    acc
}

/// A nonzero rational times a product of up to three unit atoms.
pub fn unit<R: Rng>(r: &DiffRing, rng: &mut R) -> El {
    let units: Vec<El> = atoms(r).into_iter().filter(|a| r.inverse(a).is_some()).collect();
    let mut q = small_rational(rng);
    if q.is_zero() {
        q = Rational::from_integer(1.into());
    }
    let mut u = r.from_rational(&q);
    if !units.is_empty() {
        for _ in 0..rng.gen_range(0..=3) {
            u = r.mul(&u, &units[rng.gen_range(0..units.len())]);
        }
    }
    u
}

/// A unit with `δu = 0`: products of unit atoms are tried first, then a rational.
pub fn constant_unit<R: Rng>(r: &DiffRing, rng: &mut R) -> El {
    let units: Vec<El> = atoms(r).into_iter().filter(|a| r.inverse(a).is_some()).collect();
    if !units.is_empty() {
        for _ in 0..8 {
            let a = &units[rng.gen_range(0..units.len())];
            let b = r.inverse(&units[rng.gen_range(0..units.len())]).expect("unit");
            let u = r.mul(a, &b);
            if r.is_zero(&r.d(&u)) {
                return r.mul(&u, &r.from_int(rng.gen_range(1..=5)));
            }
        }
    }
    r.from_int(rng.gen_range(1..=5))
}

pub fn matrix<R: Rng>(r: &DiffRing, rng: &mut R, rows: usize, cols: usize, degree: u32) -> Mat {
    Mat::from_fn(rows, cols, |_, _| element(r, rng, degree))
}

/// Trace-free square matrix.
pub fn traceless<R: Rng>(r: &DiffRing, rng: &mut R, n: usize, degree: u32) -> Mat {
    let mut z = matrix(r, rng, n, n, degree);
    let shift = r.scale(&r.trace(&z), &Rational::new(1.into(), (n as i64).into()));
    for i in 0..n {
        let v = r.sub(z.get(i, i), &shift);
        z.set(i, i, v);
    }
    z
}

/// Upper unitriangular times lower unitriangular, scaled row-wise by units.
pub fn invertible<R: Rng>(r: &DiffRing, rng: &mut R, n: usize, degree: u32) -> Mat {
    let upper = Mat::from_fn(n, n, |i, j| {
        if i == j {
            unit(r, rng)
        } else if i < j {
            element(r, rng, degree)
        } else {
            r.zero()
        }
    });
    let lower = Mat::from_fn(n, n, |i, j| {
        if i == j {
            r.one()
        } else if i > j {
            element(r, rng, degree)
        } else {
            r.zero()
        }
    });
    r.mat_mul(&upper, &lower).expect("square")
}
