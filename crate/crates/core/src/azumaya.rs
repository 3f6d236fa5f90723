//! Matrix algebras `M_n(R)` with derivation `Δ = ′ + [z, −]`, inner-derivation witnesses,
//! the differential automorphism criterion and trivializing covers.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dmod::DiffModule;
use crate::error::{Error, Result};
use crate::linalg::solve_rational;
use crate::matrix::Mat;
use crate::report::CheckReport;
use crate::ring::{DiffRing, El, Rational, RingHom};

/// `M_n(R)` with `Δ(x) = x′ + z·x − x·z` and `tr z = 0`.
#[derive(Clone, Debug)]
pub struct DiffMatrixAlgebra {
    ring: DiffRing,
    z: Mat,
}

impl DiffMatrixAlgebra {
    pub fn new(ring: &DiffRing, z: Mat) -> Result<DiffMatrixAlgebra> {
        if !z.is_square() || z.rows() == 0 {
            return Err(Error::ShapeMismatch(format!("witness must be square, got {}x{}", z.rows(), z.cols())));
        }
        if !ring.is_zero(&ring.trace(&z)) {
            return Err(Error::NonzeroTrace);
        }
        Ok(DiffMatrixAlgebra { ring: ring.clone(), z })
    }

    /// `(M_n(R), ′)`.
    pub fn coordinatewise(ring: &DiffRing, n: usize) -> DiffMatrixAlgebra {
        DiffMatrixAlgebra { ring: ring.clone(), z: ring.mat_zero(n, n) }
    }

    pub fn ring(&self) -> &DiffRing {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.z.rows()
    }

    pub fn witness(&self) -> &Mat {
        &self.z
    }

    pub fn delta(&self, x: &Mat) -> Result<Mat> {
        let r = &self.ring;
        r.mat_add(&r.mat_d(x), &r.commutator(&self.z, x)?)
    }

    /// The algebra as a rank-`n²` differential module on matrix units `E_kl` (index `k·n + l`).
    pub fn as_module(&self) -> DiffModule {
        let p = DiffModule::free(&self.ring, self.z.clone()).expect("square witness");
        DiffModule::hom(&p, &p).expect("same ring")
    }

    /// Opposite algebra on the transpose model, witness `−zᵀ`.
    pub fn opposite(&self) -> DiffMatrixAlgebra {
        DiffMatrixAlgebra { ring: self.ring.clone(), z: self.ring.mat_neg(&self.z.transpose()) }
    }

    /// Kronecker model of `Λ ⊗ Γ`, witness `z⊗I + I⊗z′`.
    pub fn tensor(&self, other: &DiffMatrixAlgebra) -> Result<DiffMatrixAlgebra> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let r = &self.ring;
        let z = r.mat_add(
            &r.kron(&self.z, &r.mat_identity(other.size())),
            &r.kron(&r.mat_identity(self.size()), &other.z),
        )?;
        DiffMatrixAlgebra::new(r, z)
    }

    pub fn base_change(&self, h: &RingHom) -> Result<DiffMatrixAlgebra> {
        if h.src() != &self.ring {
            return Err(Error::RingMismatch);
        }
        DiffMatrixAlgebra::new(h.dst(), h.apply_mat(&self.z))
    }

    /// `Δ(xy) = Δ(x)y + xΔ(y)` on all pairs of matrix units and the given pairs.
    pub fn leibniz_check(&self, samples: &[(Mat, Mat)]) -> Result<CheckReport> {
        let r = &self.ring;
        let n = self.size();
        let mut pairs = Vec::new();
        for a in 0..n * n {
            for b in 0..n * n {
                pairs.push((r.mat_unit(n, a / n, a % n), r.mat_unit(n, b / n, b % n)));
            }
        }
        pairs.extend(samples.iter().cloned());
        let mut bad = None;
        for (x, y) in &pairs {
            let lhs = self.delta(&r.mat_mul(x, y)?)?;
            let rhs = r.mat_add(&r.mat_mul(&self.delta(x)?, y)?, &r.mat_mul(x, &self.delta(y)?)?)?;
            if !r.mat_eq(&lhs, &rhs) {
                bad = Some(format!("x = {:?}, y = {:?}", r.mat_format(x), r.mat_format(y)));
                break;
            }
        }
        let mut report = CheckReport::new("matrix algebra derivation");
        report.record("Δ(xy) = Δ(x)y + xΔ(y)", bad);
        let scalar = r.mat_scalar(n, &r.from_int(1));
        report.record(
            "Δ vanishes on 1",
            if r.mat_is_zero(&self.delta(&scalar)?) { None } else { Some("Δ(1) ≠ 0".into()) },
        );
        Ok(report)
    }
}

/// The values `[z, E_kl]` indexed by `k·n + l`.
pub fn commutator_table(ring: &DiffRing, z: &Mat) -> Result<Vec<Mat>> {
    let n = z.rows();
    (0..n * n).map(|idx| ring.commutator(z, &ring.mat_unit(n, idx / n, idx % n))).collect()
}

/// Recover the trace-zero `z` with `values[k·n + l] = [z, E_kl]`.
///
/// The table is first checked to be a derivation of `M_n(R)` over `R`: it must vanish on `1`
/// and satisfy Leibniz on every product of matrix units.
pub fn inner_witness(ring: &DiffRing, n: usize, values: &[Mat]) -> Result<Mat> {
    if n == 0 || values.len() != n * n || values.iter().any(|v| v.rows() != n || v.cols() != n) {
        return Err(Error::ShapeMismatch(format!("expected {} values of size {n}x{n}", n * n)));
    }
    let r = ring;
    let unit = |k: usize, l: usize| r.mat_unit(n, k, l);
    let value = |k: usize, l: usize| &values[k * n + l];

    let mut one = r.mat_zero(n, n);
    for k in 0..n {
        one = r.mat_add(&one, value(k, k))?;
    }
    if !r.mat_is_zero(&one) {
        return Err(Error::NotADerivation("does not vanish on the identity".into()));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    // E_ab·E_cd = [b = c]·E_ad
                    let lhs = if b == c { value(a, d).clone() } else { r.mat_zero(n, n) };
                    let rhs = r.mat_add(&r.mat_mul(value(a, b), &unit(c, d))?, &r.mat_mul(&unit(a, b), value(c, d))?)?;
                    if !r.mat_eq(&lhs, &rhs) {
                        return Err(Error::NotADerivation(format!(
                            "Leibniz fails on E_{}{}·E_{}{}",
                            a + 1,
                            b + 1,
                            c + 1,
                            d + 1
                        )));
                    }
                }
            }
        }
    }

    // [z, E_kl]_ij = z_ik·[l = j] − [i = k]·z_lj, unknown z_ab at index a·n + b
    let n2 = n * n;
    let mut coeffs: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<El> = Vec::new();
    let one_q = Rational::from_integer(1.into());
    for k in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut row = alloc::vec![Rational::from_integer(0.into()); n2];
                    if l == j {
                        row[i * n + k] += &one_q;
                    }
                    if i == k {
                        row[l * n + j] -= &one_q;
                    }
                    coeffs.push(row);
                    rhs.push(value(k, l).get(i, j).clone());
                }
            }
        }
    }
    let mut trace_row = alloc::vec![Rational::from_integer(0.into()); n2];
    for i in 0..n {
        trace_row[i * n + i] = one_q.clone();
    }
    coeffs.push(trace_row);
    rhs.push(r.zero());
    let sol = solve_rational(r, &coeffs, &rhs).ok_or(Error::NoSolution)?;
    let z = Mat::new(n, n, sol)?;
    for (idx, v) in commutator_table(r, &z)?.iter().enumerate() {
        if !r.mat_eq(v, &values[idx]) {
            return Err(Error::NoSolution);
        }
    }
    Ok(z)
}

fn check_pair(src: &DiffMatrixAlgebra, dst: &DiffMatrixAlgebra, u: &Mat) -> Result<()> {
    if src.ring != dst.ring {
        return Err(Error::RingMismatch);
    }
    if src.size() != dst.size() || u.rows() != src.size() || u.cols() != src.size() {
        return Err(Error::ShapeMismatch("algebras and conjugating matrix differ in size".into()));
    }
    Ok(())
}

/// `u⁻¹(u′ + z_dst·u − u·z_src)`, whose being scalar decides whether `x ↦ u x u⁻¹` is
/// differential from `src` to `dst`.
pub fn mapd_defect(src: &DiffMatrixAlgebra, dst: &DiffMatrixAlgebra, u: &Mat) -> Result<Mat> {
    check_pair(src, dst, u)?;
    let r = &src.ring;
    let inv = r.mat_inverse(u)?;
    let inner = r.mat_sub(&r.mat_add(&r.mat_d(u), &r.mat_mul(&dst.z, u)?)?, &r.mat_mul(u, &src.z)?)?;
    r.mat_mul(&inv, &inner)
}

/// The scalar `s` with `u⁻¹(u′ + z_dst·u − u·z_src) = s·I`, if the defect is scalar.
pub fn mapd_scalar(src: &DiffMatrixAlgebra, dst: &DiffMatrixAlgebra, u: &Mat) -> Result<Option<El>> {
    let defect = mapd_defect(src, dst, u)?;
    Ok(src.ring.scalar_of(&defect))
}

/// Whether conjugation by `u` is a differential isomorphism `src → dst`.
pub fn is_diff_automorphism(src: &DiffMatrixAlgebra, dst: &DiffMatrixAlgebra, u: &Mat) -> Result<bool> {
    Ok(mapd_scalar(src, dst, u)?.is_some())
}

/// Direct test of `Δ_dst(u x u⁻¹) = u Δ_src(x) u⁻¹` on all matrix units.
pub fn intertwines_directly(src: &DiffMatrixAlgebra, dst: &DiffMatrixAlgebra, u: &Mat) -> Result<bool> {
    check_pair(src, dst, u)?;
    let r = &src.ring;
    let n = src.size();
    let inv = r.mat_inverse(u)?;
    for idx in 0..n * n {
        let x = r.mat_unit(n, idx / n, idx % n);
        let conj = r.mat_product(&[u, &x, &inv])?;
        let lhs = dst.delta(&conj)?;
        let rhs = r.mat_product(&[u, &src.delta(&x)?, &inv])?;
        if !r.mat_eq(&lhs, &rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ρ: Λ ⊗ Λᵒᵖ → End(Λ)`, `ρ(λ₁⊗λ₂)(λ) = λ₁λλ₂`, intertwines the derivations and is bijective.
///
/// `Λ ⊗ Λᵒᵖ` is the Kronecker model of `Λ ⊗ opposite(Λ)`, where the opposite factor holds
/// `λ₂ᵀ`. `End(Λ)` is `Hom` of [`DiffMatrixAlgebra::as_module`] with itself.
pub fn rho_check(alg: &DiffMatrixAlgebra) -> Result<CheckReport> {
    let r = &alg.ring;
    let n = alg.size();
    let n2 = n * n;
    let lam = alg.as_module();
    let env = alg.tensor(&alg.opposite())?;
    let unit = |idx: usize| r.mat_unit(n, idx / n, idx % n);
    let vec_of = |m: &Mat| -> Vec<El> { m.entries().to_vec() };
    // ρ of a Kronecker-model element X = Σ X[(i,k),(j,l)] E_ij ⊗ E_lkᵀ
    let rho = |x: &Mat| -> Result<Mat> {
        let mut cols = Vec::with_capacity(n2);
        for b in 0..n2 {
            let basis = unit(b);
            let mut acc = r.mat_zero(n, n);
            for row in 0..n2 {
                for col in 0..n2 {
                    let c = x.get(row, col);
                    if r.is_zero(c) {
                        continue;
                    }
                    let (i, k) = (row / n, row % n);
                    let (j, l) = (col / n, col % n);
                    let left = unit(i * n + j);
                    let right = unit(k * n + l).transpose();
                    let term = r.mat_product(&[&left, &basis, &right])?;
                    acc = r.mat_add(&acc, &r.mat_scale(&term, c))?;
                }
            }
            cols.push(vec_of(&acc));
        }
        Mat::from_columns(&cols)
    };
    let mut report = CheckReport::new("ρ: Λ⊗Λᵒᵖ → End(Λ)");
    let mut bad = None;
    let mut images = Vec::new();
    'outer: for a in 0..n2 {
        for b in 0..n2 {
            let x = r.kron(&unit(a), &unit(b));
            let image = rho(&x)?;
            let lhs = DiffModule::hom_delta(&lam, &lam, &image)?;
            let rhs = rho(&env.delta(&x)?)?;
            if !r.mat_eq(&lhs, &rhs) {
                bad = Some(format!("E_{}{} ⊗ E_{}{}", a / n + 1, a % n + 1, b / n + 1, b % n + 1));
                break 'outer;
            }
            images.push(image);
        }
    }
    report.record("ρ is differential", bad);
    if images.len() == n2 * n2 {
        let cols: Vec<Vec<El>> = images.iter().map(vec_of).collect();
        let m = Mat::from_columns(&cols)?;
        report.record("ρ is bijective", if is_permutation(r, &m) { None } else { Some("not a permutation of matrix units".into()) });
    } else {
        report.fail("ρ is bijective", "not evaluated");
    }
    Ok(report)
}

fn is_permutation(r: &DiffRing, m: &Mat) -> bool {
    let n = m.rows();
    let mut seen = alloc::vec![false; n];
    for j in 0..m.cols() {
        let ones: Vec<usize> = (0..n).filter(|&i| !r.is_zero(m.get(i, j))).collect();
        if ones.len() != 1 || !r.is_one(m.get(ones[0], j)) || seen[ones[0]] {
            return false;
        }
        seen[ones[0]] = true;
    }
    m.is_square()
}

/// How a cover was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverKind {
    /// `R[T_ij][1/det T]` with `δT = −D·T`.
    Frame,
    /// `R[U_ij][1/det U]` with `δU = U·z`.
    Gauge,
    /// `R[U, 1/U]` with `δU = b·U`.
    Exponential,
}

/// A differential ring extension `R → B` adjoining a matrix of indeterminates.
#[derive(Clone, Debug)]
pub struct Cover {
    pub hom: RingHom,
    pub kind: CoverKind,
    /// The adjoined matrix, over the cover ring.
    pub witness: Mat,
    /// Its prescribed derivative.
    pub rule: Mat,
}

impl Cover {
    pub fn ring(&self) -> &DiffRing {
        self.hom.dst()
    }

    /// Whether the adjoined derivatives still match the stored rule.
    pub fn rule_holds(&self) -> bool {
        let b = self.ring();
        b.mat_eq(&b.mat_d(&self.witness), &self.rule)
    }
}

fn fresh_prefix(ring: &DiffRing, base: &str, n: usize) -> String {
    let mut prefix = String::from(base);
    loop {
        let clash = (0..n).any(|i| (0..n).any(|j| ring.generator(&matrix_name(&prefix, n, i, j)).is_some()));
        if !clash {
            return prefix;
        }
        prefix.push('_');
    }
}

fn matrix_name(prefix: &str, n: usize, i: usize, j: usize) -> String {
    if n == 1 {
        prefix.into()
    } else if n <= 9 {
        format!("{prefix}{}{}", i + 1, j + 1)
    } else {
        format!("{prefix}_{}_{}", i + 1, j + 1)
    }
}

/// Adjoin an `n×n` matrix `X` with `δX = rule(X)` and invert `det X`.
fn matrix_cover<F>(ring: &DiffRing, base: &str, n: usize, kind: CoverKind, rule: F) -> Result<Cover>
where
    F: Fn(&DiffRing, &Mat) -> Result<Mat>,
{
    let prefix = fresh_prefix(ring, base, n);
    let names: Vec<String> = (0..n * n).map(|idx| matrix_name(&prefix, n, idx / n, idx % n)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let gens = |r: &DiffRing| Mat::from_fn(n, n, |i, j| r.generator(&names[i * n + j]).expect("adjoined"));
    let poly = ring.adjoin_with(&refs, |pre| {
        let x = gens(pre);
        Ok(rule(pre, &x)?.entries().to_vec())
    })?;
    let det = poly.det(&gens(&poly))?;
    let b = poly.localize(&det)?;
    let witness = gens(&b);
    let rule_m = rule(&b, &witness)?;
    let cover = Cover { hom: RingHom::inclusion(ring, &b)?, kind, witness, rule: rule_m };
    debug_assert!(cover.rule_holds());
    Ok(cover)
}

/// Cover `R[T][1/det T]` with `δT = −D·T`, over which the columns of `T` form a δ-constant
/// basis of `M`. Returns the cover and that basis as the columns of a matrix.
pub fn trivialize_module(m: &DiffModule) -> Result<(Cover, Mat)> {
    let r = m.ring();
    let n = m.rank();
    let d = m.connection().clone();
    let cover = matrix_cover(r, "T", n, CoverKind::Frame, |ring, t| {
        let dd = ring.mat_embed(r, &d)?;
        Ok(ring.mat_neg(&ring.mat_mul(&dd, t)?))
    })?;
    let over = m.base_change(&cover.hom)?;
    let basis = cover.witness.clone();
    for j in 0..n {
        if !over.is_constant(&basis.column(j))? {
            return Err(Error::NotConstant);
        }
    }
    Ok((cover, basis))
}

/// Cover `R[U][1/det U]` with `δU = U·z`, over which conjugation by `U` is a differential
/// isomorphism from `Λ` to `(M_n, ′)`.
pub fn trivialize_algebra(alg: &DiffMatrixAlgebra) -> Result<(Cover, Mat)> {
    let r = alg.ring();
    let z = alg.witness().clone();
    let cover = matrix_cover(r, "U", alg.size(), CoverKind::Gauge, |ring, u| {
        let zz = ring.mat_embed(r, &z)?;
        ring.mat_mul(u, &zz)
    })?;
    let src = alg.base_change(&cover.hom)?;
    let dst = DiffMatrixAlgebra::coordinatewise(cover.ring(), alg.size());
    let u = cover.witness.clone();
    match mapd_scalar(&src, &dst, &u)? {
        Some(s) if cover.ring().is_zero(&s) => Ok((cover, u)),
        _ => Err(Error::NotDifferential("trivializing conjugation".into())),
    }
}

/// `R[U, 1/U]` with `δU = b·U`.
pub fn exp_cover(ring: &DiffRing, b: &El) -> Result<Cover> {
    let b = b.clone();
    matrix_cover(ring, "U", 1, CoverKind::Exponential, |r, u| {
        let bb = r.embed(ring, &b)?;
        Ok(r.mat_scale(u, &bb))
    })
}

/// Values on matrix units of `x ↦ u·Δ_src(u⁻¹ x u)·u⁻¹ − x′`, the part of the transported
/// derivation beyond coordinatewise differentiation.
pub fn transported_residual(src: &DiffMatrixAlgebra, u: &Mat) -> Result<Vec<Mat>> {
    let r = src.ring();
    let n = src.size();
    let inv = r.mat_inverse(u)?;
    (0..n * n)
        .map(|idx| {
            let x = r.mat_unit(n, idx / n, idx % n);
            let pulled = r.mat_product(&[&inv, &x, u])?;
            let t = r.mat_product(&[u, &src.delta(&pulled)?, &inv])?;
            r.mat_sub(&t, &r.mat_d(&x))
        })
        .collect()
}
