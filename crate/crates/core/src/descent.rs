//! Descent data along finite free covers `A → B`.
//!
//! A datum on a free `B`-module `N` with basis `e_j` is a matrix `Φ` over `B⊗B` with
//! `φ(e_j⊗1) = Σ_i Φ_ij (1⊗e_i)`. An element `x = Σ v_j e_j` descends when
//! `Φ·ι₁(v) = ι₂(v)`, and the cocycle condition reads `e₁(Φ) = e₀(Φ)·e₂(Φ)` over `B⊗B⊗B`.

use alloc::format;
use alloc::vec::Vec;

use crate::azumaya::DiffMatrixAlgebra;
use crate::dmod::DiffModule;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::report::CheckReport;
use crate::ring::{Amalgam, DiffRing, El, Rational};

#[derive(Clone, Debug)]
pub enum DatumKind {
    Module,
    /// `φ` acts on `M_n(B)` (as a rank `n²` module on matrix units) by algebra automorphisms.
    Algebra(DiffMatrixAlgebra),
}

#[derive(Clone, Debug)]
pub struct DescentDatum {
    amalgam: Amalgam,
    module: DiffModule,
    phi: Mat,
    kind: DatumKind,
}

/// Row-major coordinates of a square matrix, matching the matrix-unit basis `E_ab ↦ a·n + b`.
pub fn vectorize(x: &Mat) -> Vec<El> {
    x.entries().to_vec()
}

pub fn unvectorize(n: usize, v: &[El]) -> Result<Mat> {
    Mat::new(n, n, v.to_vec())
}

/// Matrix of `x ↦ m·x·m⁻¹` on matrix units.
pub fn conjugation_matrix(ring: &DiffRing, m: &Mat) -> Result<Mat> {
    let n = m.rows();
    let inv = ring.mat_inverse(m)?;
    let cols = (0..n * n)
        .map(|idx| Ok(vectorize(&ring.mat_product(&[m, &ring.mat_unit(n, idx / n, idx % n), &inv])?)))
        .collect::<Result<Vec<_>>>()?;
    Mat::from_columns(&cols)
}

fn unit_name(n: usize, idx: usize) -> alloc::string::String {
    format!("E{}{}", idx / n + 1, idx % n + 1)
}

fn square_root(k: usize) -> Option<usize> {
    (0..=k).find(|n| n * n == k)
}

impl DescentDatum {
    /// Module datum. `phi` must be invertible over `B⊗B` and intertwine the induced derivations.
    pub fn new_module(amalgam: &Amalgam, module: DiffModule, phi: Mat) -> Result<DescentDatum> {
        DescentDatum::build(amalgam, module, phi, DatumKind::Module)
    }

    /// Algebra datum on `(M_n(B), Δ)`; `phi` is additionally checked to be an algebra map.
    pub fn new_algebra(amalgam: &Amalgam, alg: DiffMatrixAlgebra, phi: Mat) -> Result<DescentDatum> {
        let module = alg.as_module();
        let d = DescentDatum::build(amalgam, module, phi, DatumKind::Algebra(alg))?;
        d.check_algebra_map()?;
        Ok(d)
    }

    /// Algebra datum `x ↦ m·x·m⁻¹` for an invertible `m` over `B⊗B`.
    pub fn conjugation(amalgam: &Amalgam, alg: DiffMatrixAlgebra, m: &Mat) -> Result<DescentDatum> {
        let r2 = amalgam.level(2)?;
        if m.rows() != alg.size() || !m.is_square() {
            return Err(Error::ShapeMismatch(format!("conjugator must be {0}x{0}", alg.size())));
        }
        let phi = conjugation_matrix(r2, m)?;
        DescentDatum::new_algebra(amalgam, alg, phi)
    }

    /// The datum of `M ⊗_A B` with `φ` the identity.
    pub fn canonical(amalgam: &Amalgam, m: &DiffModule) -> Result<DescentDatum> {
        let (a, b) = (amalgam.base(), amalgam.cover());
        if m.ring() != a {
            return Err(Error::RingMismatch);
        }
        let module = DiffModule::free(b, b.mat_embed(a, m.connection())?)?;
        let phi = amalgam.level(2)?.mat_identity(m.rank());
        DescentDatum::new_module(amalgam, module, phi)
    }

    /// The datum of `Λ ⊗_A B` for a matrix algebra `Λ` over `A`.
    pub fn canonical_algebra(amalgam: &Amalgam, alg: &DiffMatrixAlgebra) -> Result<DescentDatum> {
        let (a, b) = (amalgam.base(), amalgam.cover());
        if alg.ring() != a {
            return Err(Error::RingMismatch);
        }
        let over_b = DiffMatrixAlgebra::new(b, b.mat_embed(a, alg.witness())?)?;
        let n = alg.size();
        DescentDatum::new_algebra(amalgam, over_b, amalgam.level(2)?.mat_identity(n * n))
    }

    fn build(amalgam: &Amalgam, module: DiffModule, phi: Mat, kind: DatumKind) -> Result<DescentDatum> {
        if module.ring() != amalgam.cover() {
            return Err(Error::RingMismatch);
        }
        let r2 = amalgam.level(2)?;
        let n = module.rank();
        if phi.rows() != n || phi.cols() != n {
            return Err(Error::ShapeMismatch(format!("phi must be {n}x{n}, got {}x{}", phi.rows(), phi.cols())));
        }
        if !r2.is_invertible(&phi) {
            return Err(Error::NotInvertible);
        }
        let d = DescentDatum { amalgam: amalgam.clone(), module, phi, kind };
        if !r2.mat_is_zero(&d.differential_defect()?) {
            return Err(Error::NotDifferential("phi does not intertwine the induced derivations".into()));
        }
        Ok(d)
    }

    pub fn amalgam(&self) -> &Amalgam {
        &self.amalgam
    }

    pub fn base(&self) -> &DiffRing {
        self.amalgam.base()
    }

    pub fn cover(&self) -> &DiffRing {
        self.amalgam.cover()
    }

    pub fn module(&self) -> &DiffModule {
        &self.module
    }

    pub fn phi(&self) -> &Mat {
        &self.phi
    }

    pub fn kind(&self) -> &DatumKind {
        &self.kind
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    /// `Φ′ + ι₂(D)·Φ − Φ·ι₁(D)`, zero exactly when `φ` is differential.
    pub fn differential_defect(&self) -> Result<Mat> {
        let r2 = self.amalgam.level(2)?;
        let d = self.module.connection();
        let d1 = self.amalgam.embedding(2, 1)?.apply_mat(d);
        let d2 = self.amalgam.embedding(2, 2)?.apply_mat(d);
        let lhs = r2.mat_add(&r2.mat_d(&self.phi), &r2.mat_mul(&d2, &self.phi)?)?;
        r2.mat_sub(&lhs, &r2.mat_mul(&self.phi, &d1)?)
    }

    fn check_algebra_map(&self) -> Result<()> {
        let r2 = self.amalgam.level(2)?;
        let n = square_root(self.rank()).ok_or_else(|| Error::NotAlgebraMap("rank is not a square".into()))?;
        let image = |x: &Mat| -> Result<Mat> { unvectorize(n, &r2.mat_vec(&self.phi, &vectorize(x))?) };
        let units: Vec<Mat> = (0..n * n).map(|i| r2.mat_unit(n, i / n, i % n)).collect();
        let images = units.iter().map(image).collect::<Result<Vec<_>>>()?;
        if !r2.mat_eq(&image(&r2.mat_identity(n))?, &r2.mat_identity(n)) {
            return Err(Error::NotAlgebraMap("phi(1) ≠ 1".into()));
        }
        for (p, x) in units.iter().enumerate() {
            for (q, y) in units.iter().enumerate() {
                let lhs = image(&r2.mat_mul(x, y)?)?;
                let rhs = r2.mat_mul(&images[p], &images[q])?;
                if !r2.mat_eq(&lhs, &rhs) {
                    let (x, y) = (unit_name(n, p), unit_name(n, q));
                    return Err(Error::NotAlgebraMap(format!("phi({x}·{y}) ≠ phi({x})·phi({y})")));
                }
            }
        }
        Ok(())
    }

    /// `(e₁(Φ), e₀(Φ)·e₂(Φ))` over `B⊗B⊗B`.
    pub fn cocycle_sides(&self) -> Result<(Mat, Mat)> {
        let r3 = self.amalgam.level(3)?;
        let face = |i| self.amalgam.coface(2, i).map(|f| f.apply_mat(&self.phi));
        Ok((face(1)?, r3.mat_mul(&face(0)?, &face(2)?)?))
    }

    /// `φ₁₃ = φ₂₃·φ₁₂`.
    pub fn cocycle_check(&self) -> Result<bool> {
        let (lhs, rhs) = self.cocycle_sides()?;
        Ok(self.amalgam.level(3)?.mat_eq(&lhs, &rhs))
    }
}

/// `G((N, φ))` with an `A`-basis given as columns over `B` and the restricted connection.
#[derive(Clone, Debug)]
pub struct DescendedModule {
    cover: DiffRing,
    /// Column `j` holds the `N`-coordinates of the `j`-th basis element of `G`.
    pub basis: Mat,
    pub module: DiffModule,
    pub report: CheckReport,
}

/// Solve `Φ·ι₁(v) = ι₂(v)` over `A` and restrict the connection to the solutions.
pub fn descend_module(d: &DescentDatum) -> Result<DescendedModule> {
    if !d.cocycle_check()? {
        return Err(Error::CocycleFailed);
    }
    let (a, b) = (d.base(), d.cover());
    let n = d.rank();
    let r2 = d.amalgam.level(2)?;
    let basis = if r2.mat_eq(d.phi(), &r2.mat_identity(n)) {
        b.mat_identity(n)
    } else {
        kernel_basis(d)?
    };
    let det = b.det(&basis)?;
    if b.inverse(&det).is_none() {
        return Err(Error::KernelNotFree(format!("descended vectors span a proper submodule (det {})", b.format(&det))));
    }
    let inv = b.mat_inverse(&basis)?;
    let dn = d.module.connection();
    let moved = b.mat_add(&b.mat_d(&basis), &b.mat_mul(dn, &basis)?)?;
    let over_b = b.mat_mul(&inv, &moved)?;
    let mut conn = Vec::with_capacity(n * n);
    for x in over_b.entries() {
        match b.restrict_to(a, x) {
            Some(y) => conn.push(y),
            None => return Err(Error::NotClosed(format!("δ leaves the descended span ({})", b.format(x)))),
        }
    }
    let module = DiffModule::free(a, Mat::new(n, n, conn)?)?;

    let mut report = CheckReport::new("descended module");
    report.pass(format!("rank over A equals rank over B ({n})"));
    report.pass("descended basis is a B-basis of N");
    let back = b.mat_embed(a, module.connection())?;
    let iso = b.mat_sub(&moved, &b.mat_mul(&basis, &back)?)?;
    report.record(
        "G⊗B → N is differential",
        if b.mat_is_zero(&iso) { None } else { Some("X′ + D·X ≠ X·C".into()) },
    );
    let fixed = {
        let lhs = r2.mat_mul(d.phi(), &d.amalgam.embedding(2, 1)?.apply_mat(&basis))?;
        r2.mat_eq(&lhs, &d.amalgam.embedding(2, 2)?.apply_mat(&basis))
    };
    report.record("φ fixes every basis element", if fixed { None } else { Some("Φ·ι₁(X) ≠ ι₂(X)".into()) });
    Ok(DescendedModule { cover: b.clone(), basis, module, report })
}

fn kernel_basis(d: &DescentDatum) -> Result<Mat> {
    let (a, b) = (d.base(), d.cover());
    let r2 = d.amalgam.level(2)?;
    let beta = b.basis_over(a)?;
    let deg = beta.len();
    let n = d.rank();
    let i1 = d.amalgam.embedding(2, 1)?;
    let i2 = d.amalgam.embedding(2, 2)?;

    // unknown (j, k) is the coefficient of β_k in v_j
    let mut columns: Vec<Vec<El>> = Vec::with_capacity(n * deg);
    for j in 0..n {
        for bk in &beta {
            let (b1, b2) = (i1.apply(bk), i2.apply(bk));
            let mut col = Vec::new();
            for i in 0..n {
                let mut w = r2.mul(d.phi().get(i, j), &b1);
                if i == j {
                    w = r2.sub(&w, &b2);
                }
                col.extend(r2.coords_over(a, &w)?);
            }
            columns.push(col);
        }
    }
    let system = Mat::from_columns(&columns)?;
    let kernel = a.kernel(&system);
    if kernel.len() != n {
        return Err(Error::KernelNotFree(format!("kernel has {} generators, expected {n}", kernel.len())));
    }
    let cols = kernel
        .iter()
        .map(|v| {
            (0..n)
                .map(|j| {
                    let terms = (0..deg)
                        .map(|k| Ok(b.mul(&b.embed(a, &v[j * deg + k])?, &beta[k])))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(b.sum(&terms))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Mat::from_columns(&cols)
}

/// A descended algebra: basis matrices in `M_n(B)`, structure constants and derivation over `A`.
#[derive(Clone, Debug)]
pub struct DescendedAlgebra {
    ring: DiffRing,
    cover: DiffRing,
    size: usize,
    pub basis: Vec<Mat>,
    /// `structure[i][j]` are the coordinates of `basis[i]·basis[j]`.
    pub structure: Vec<Vec<Vec<El>>>,
    pub unit: Vec<El>,
    /// Column `k` holds the coordinates of `Δ(basis[k])`.
    pub derivation: Mat,
    pub report: CheckReport,
    inverse: Mat,
}

impl DescendedAlgebra {
    pub fn ring(&self) -> &DiffRing {
        &self.ring
    }

    pub fn cover(&self) -> &DiffRing {
        &self.cover
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The matrix in `M_n(B)` with the given coordinates.
    pub fn to_matrix(&self, coords: &[El]) -> Result<Mat> {
        let b = &self.cover;
        let mut acc = b.mat_zero(self.size, self.size);
        for (c, g) in coords.iter().zip(&self.basis) {
            acc = b.mat_add(&acc, &b.mat_scale(g, &b.embed(&self.ring, c)?))?;
        }
        Ok(acc)
    }

    /// Coordinates over `A` of a matrix in the span; `NotClosed` otherwise.
    pub fn coords_of(&self, x: &Mat) -> Result<Vec<El>> {
        let b = &self.cover;
        let v = b.mat_vec(&self.inverse, &vectorize(x))?;
        v.iter()
            .map(|c| b.restrict_to(&self.ring, c).ok_or_else(|| Error::NotClosed(format!("coordinate {}", b.format(c)))))
            .collect()
    }

    pub fn mul(&self, x: &[El], y: &[El]) -> Vec<El> {
        let a = &self.ring;
        let k = self.rank();
        let mut out = alloc::vec![a.zero(); k];
        for i in 0..k {
            for j in 0..k {
                let c = a.mul(&x[i], &y[j]);
                if a.is_zero(&c) {
                    continue;
                }
                for l in 0..k {
                    out[l] = a.add(&out[l], &a.mul(&c, &self.structure[i][j][l]));
                }
            }
        }
        out
    }

    /// `δ` on coordinates: `v′ + C·v`.
    pub fn delta(&self, v: &[El]) -> Vec<El> {
        let a = &self.ring;
        let cv = a.mat_vec(&self.derivation, v).expect("rank matches");
        v.iter().zip(cv).map(|(x, y)| a.add(&a.d(x), &y)).collect()
    }
}

/// Descend `(M_n(B), Δ)` along an algebra datum and check the result is a differential
/// `A`-algebra with `G ⊗ B ≅ M_n(B)`.
pub fn descend_algebra(d: &DescentDatum) -> Result<DescendedAlgebra> {
    let alg = match d.kind() {
        DatumKind::Algebra(alg) => alg.clone(),
        DatumKind::Module => return Err(Error::NotAlgebraMap("datum was declared as a module datum".into())),
    };
    let descended = descend_module(d)?;
    let (a, b) = (d.base().clone(), d.cover().clone());
    let n = alg.size();
    let k = n * n;
    let basis = (0..k).map(|j| unvectorize(n, &descended.basis.column(j))).collect::<Result<Vec<_>>>()?;
    let mut out = DescendedAlgebra {
        ring: a.clone(),
        cover: b.clone(),
        size: n,
        basis,
        structure: Vec::new(),
        unit: Vec::new(),
        derivation: descended.module.connection().clone(),
        report: descended.report,
        inverse: b.mat_inverse(&descended.basis)?,
    };
    let mut structure = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            let p = b.mat_mul(&out.basis[i], &out.basis[j])?;
            row.push(out.coords_of(&p).map_err(|_| {
                Error::NotClosed(format!("product of basis elements {} and {} leaves the span", i + 1, j + 1))
            })?);
        }
        structure.push(row);
    }
    out.structure = structure;
    out.report.pass("closed under multiplication");
    out.unit = out.coords_of(&b.mat_identity(n))?;
    for (idx, g) in out.basis.iter().enumerate() {
        let via_delta = out.coords_of(&alg.delta(g)?)?;
        if !via_delta.iter().zip(out.derivation.column(idx)).all(|(x, y)| a.eq(x, &y)) {
            return Err(Error::NotClosed("Δ disagrees with the descended connection".into()));
        }
    }
    out.report.pass("closed under δ");

    let e = |l: usize| (0..k).map(|i| if i == l { a.one() } else { a.zero() }).collect::<Vec<_>>();
    let eq = |x: &[El], y: &[El]| x.iter().zip(y).all(|(p, q)| a.eq(p, q));
    let mut assoc = None;
    let mut unit = None;
    let mut leibniz = None;
    for i in 0..k {
        let (ei, ui) = (e(i), out.mul(&out.unit, &e(i)));
        if unit.is_none() && !(eq(&ui, &ei) && eq(&out.mul(&ei, &out.unit), &ei)) {
            unit = Some(format!("basis element {}", i + 1));
        }
        for j in 0..k {
            let ej = e(j);
            let prod = out.mul(&ei, &ej);
            let lhs = out.delta(&prod);
            let t1 = out.mul(&out.delta(&ei), &ej);
            let t2 = out.mul(&ei, &out.delta(&ej));
            let rhs: Vec<El> = t1.iter().zip(&t2).map(|(x, y)| a.add(x, y)).collect();
            if leibniz.is_none() && !eq(&lhs, &rhs) {
                leibniz = Some(format!("pair ({}, {})", i + 1, j + 1));
            }
            for l in 0..k {
                let el = e(l);
                let left = out.mul(&prod, &el);
                let right = out.mul(&ei, &out.mul(&ej, &el));
                if assoc.is_none() && !eq(&left, &right) {
                    assoc = Some(format!("triple ({}, {}, {})", i + 1, j + 1, l + 1));
                }
            }
        }
    }
    out.report.record("associative", assoc);
    out.report.record("unital", unit);
    out.report.record("δ(xy) = δ(x)y + xδ(y) on basis pairs", leibniz);
    // the B-span of the basis is all of M_n(B) and multiplication is inherited
    out.report.pass("G⊗B ≅ M_n(B)");
    Ok(out)
}

/// Quaternion presentation `{1, i, j, k}` of a rank-4 descended algebra in `M_2(B)`.
#[derive(Clone, Debug)]
pub struct QuaternionPresentation {
    /// Coordinates over `A` in the descended basis.
    pub i: Vec<El>,
    pub j: Vec<El>,
    pub k: Vec<El>,
    /// `i² = a`, `j² = b`.
    pub a: El,
    pub b: El,
    pub delta_i: Vec<El>,
    pub delta_j: Vec<El>,
    pub report: CheckReport,
}

/// Find trace-free anticommuting `i, j` with scalar squares by Gram–Schmidt against the
/// reduced trace form, starting from the descended basis.
pub fn quaternion_presentation(alg: &DescendedAlgebra) -> Result<QuaternionPresentation> {
    if alg.size != 2 || alg.rank() != 4 {
        return Err(Error::ShapeMismatch("quaternion presentation needs a rank-4 form of M_2".into()));
    }
    let (a, b) = (&alg.ring, &alg.cover);
    let half = Rational::new(1.into(), 2.into());
    let trace_free: Vec<Mat> = alg
        .basis
        .iter()
        .map(|g| {
            let t = b.scale(&b.trace(g), &half);
            b.mat_sub(g, &b.mat_scalar(2, &t))
        })
        .collect::<Result<Vec<_>>>()?;
    let square = |x: &Mat| -> Result<Option<El>> { Ok(b.scalar_of(&b.mat_mul(x, x)?)) };

    let mut i_mat = None;
    for t in &trace_free {
        if b.mat_is_zero(t) {
            continue;
        }
        let s = square(t)?.ok_or_else(|| Error::NotScalar("square of a trace-free element".into()))?;
        if b.inverse(&s).is_some() {
            i_mat = Some((t.clone(), s));
            break;
        }
    }
    let (i_mat, s_i) = i_mat.ok_or_else(|| Error::NotClosed("no trace-free element with unit square".into()))?;
    let two_a = b.scale(&s_i, &Rational::from_integer(2.into()));
    let mut j_mat = None;
    for v in &trace_free {
        // j = v − tr(iv)/(2a)·i anticommutes with i
        let c = b.div(&b.trace(&b.mat_mul(&i_mat, v)?), &two_a)?;
        let j = b.mat_sub(v, &b.mat_scale(&i_mat, &c))?;
        if b.mat_is_zero(&j) {
            continue;
        }
        let s = square(&j)?.ok_or_else(|| Error::NotScalar("square of a trace-free element".into()))?;
        if !b.is_zero(&s) {
            j_mat = Some((j, s));
            break;
        }
    }
    let (j_mat, s_j) = j_mat.ok_or_else(|| Error::NotClosed("no second anticommuting generator".into()))?;
    let k_mat = b.mat_mul(&i_mat, &j_mat)?;

    let restrict = |x: &El| b.restrict_to(a, x).ok_or_else(|| Error::NotClosed("relation scalar outside A".into()));
    let (sa, sb) = (restrict(&s_i)?, restrict(&s_j)?);
    let (ic, jc, kc) = (alg.coords_of(&i_mat)?, alg.coords_of(&j_mat)?, alg.coords_of(&k_mat)?);

    let mut report = CheckReport::new("quaternion presentation");
    let check = |ok: bool, what: &str| if ok { None } else { Some(format!("{what} fails")) };
    report.record("tr i = tr j = 0", check(b.is_zero(&b.trace(&i_mat)) && b.is_zero(&b.trace(&j_mat)), "trace"));
    let ji = b.mat_mul(&j_mat, &i_mat)?;
    report.record("ij = −ji", check(b.mat_eq(&k_mat, &b.mat_neg(&ji)), "anticommutation"));
    let kk = b.mat_mul(&k_mat, &k_mat)?;
    let mab = b.neg(&b.mul(&s_i, &s_j));
    report.record("k² = −ab", check(b.mat_eq(&kk, &b.mat_scalar(2, &mab)), "k²"));
    let frame = Mat::from_columns(&[alg.unit.clone(), ic.clone(), jc.clone(), kc.clone()])?;
    let det = a.det(&frame)?;
    report.record(
        "{1, i, j, k} is an A-basis",
        if a.inverse(&det).is_some() { None } else { Some(format!("det {}", a.format(&det))) },
    );
    let (di, dj) = (alg.delta(&ic), alg.delta(&jc));
    // δ(i²) = δ(a) and δ(ij) = δ(i)j + iδ(j), computed from structure constants
    let ii = alg.mul(&ic, &ic);
    let lhs = alg.delta(&ii);
    let rhs: Vec<El> = alg.mul(&di, &ic).iter().zip(alg.mul(&ic, &di)).map(|(x, y)| a.add(x, &y)).collect();
    let da: Vec<El> = alg.unit.iter().map(|u| a.mul(u, &a.d(&sa))).collect();
    let ok = lhs.iter().zip(&rhs).all(|(x, y)| a.eq(x, y)) && lhs.iter().zip(&da).all(|(x, y)| a.eq(x, y));
    report.record("δ(i²) = δ(i)i + iδ(i) = δ(a)", check(ok, "Leibniz on i²"));
    let ij = alg.mul(&ic, &jc);
    let lhs = alg.delta(&ij);
    let rhs: Vec<El> = alg.mul(&di, &jc).iter().zip(alg.mul(&ic, &dj)).map(|(x, y)| a.add(x, &y)).collect();
    report.record("δ(ij) = δ(i)j + iδ(j)", check(lhs.iter().zip(&rhs).all(|(x, y)| a.eq(x, y)), "Leibniz on ij"));
    Ok(QuaternionPresentation { i: ic, j: jc, k: kc, a: sa, b: sb, delta_i: di, delta_j: dj, report })
}

/// Whether `alpha: N → N′` is a differential morphism of descent data, `ι₂(α)·Φ = Φ′·ι₁(α)`.
pub fn twisted_form_equiv(d: &DescentDatum, d2: &DescentDatum, alpha: &Mat) -> Result<bool> {
    if d.cover() != d2.cover() {
        return Err(Error::RingMismatch);
    }
    if alpha.rows() != d2.rank() || alpha.cols() != d.rank() {
        return Err(Error::ShapeMismatch(format!(
            "alpha must be {}x{}, got {}x{}",
            d2.rank(),
            d.rank(),
            alpha.rows(),
            alpha.cols()
        )));
    }
    let b = d.cover();
    let r2 = d.amalgam.level(2)?;
    let (dm, dn) = (d.module.connection(), d2.module.connection());
    let defect = b.mat_sub(&b.mat_add(&b.mat_d(alpha), &b.mat_mul(dn, alpha)?)?, &b.mat_mul(alpha, dm)?)?;
    if !b.mat_is_zero(&defect) {
        return Ok(false);
    }
    let lhs = r2.mat_mul(&d.amalgam.embedding(2, 2)?.apply_mat(alpha), d.phi())?;
    let rhs = r2.mat_mul(d2.phi(), &d.amalgam.embedding(2, 1)?.apply_mat(alpha))?;
    Ok(r2.mat_eq(&lhs, &rhs))
}

/// The `A`-linear map between descended modules induced by a morphism of data, in the two
/// descended bases.
pub fn descended_morphism(g: &DescendedModule, g2: &DescendedModule, alpha: &Mat) -> Result<Mat> {
    if g.module.ring() != g2.module.ring() || g.cover != g2.cover {
        return Err(Error::RingMismatch);
    }
    let (a, b) = (g.module.ring(), &g.cover);
    let m = b.mat_product(&[&b.mat_inverse(&g2.basis)?, alpha, &g.basis])?;
    let data = m
        .entries()
        .iter()
        .map(|x| b.restrict_to(a, x).ok_or_else(|| Error::NotClosed("image outside the descended span".into())))
        .collect::<Result<Vec<_>>>()?;
    Mat::new(m.rows(), m.cols(), data)
}

impl DescendedModule {
    pub fn cover(&self) -> &DiffRing {
        &self.cover
    }
}

/// The quaternion twisted form of `M_2` split by `t² = x`.
#[derive(Clone, Debug)]
pub struct QuaternionExample {
    pub amalgam: Amalgam,
    /// `(M_2(B), ′ + [z, −])` with `z = diag(1/(4x), −1/(4x))`.
    pub algebra: DiffMatrixAlgebra,
    /// `m = e₊·I + e₋·g` with `g = [[0, 1], [x, 0]]` and `e± = (1 ± t₁t₂/x)/2`.
    pub conjugator: Mat,
    pub datum: DescentDatum,
}

/// Build the quaternion example over `A = Q[x, 1/x]`, `δx = 1`, and `B = A[t]/(t² − x)`, with
/// amalgam levels up to `max_level` (at least 3).
///
/// `B⊗B` splits along the idempotents `e±`: on `e₊` the datum is the identity and on `e₋` it
/// is conjugation by `g`. The coordinatewise derivation does not commute with conjugation by
/// `g`; the witness `z` above makes `m⁻¹(m′ + [z, m]) = e₋/(2x)` scalar, so it does.
pub fn quaternion_example(max_level: usize) -> Result<QuaternionExample> {
    if max_level < 3 {
        return Err(Error::UnsupportedTower("the cocycle condition needs level 3".into()));
    }
    let qx = DiffRing::base(&["x"], &[("x", "1")])?;
    let a = qx.localize(&qx.parse("x")?)?;
    let b = a.monic_quotient_expr("t", "t^2 - x")?;
    let amalgam = Amalgam::over(&a, &b, max_level)?;
    let r2 = amalgam.level(2)?;
    let z = b.mat_parse(&[alloc::vec!["1/(4*x)", "0"], alloc::vec!["0", "-1/(4*x)"]])?;
    let algebra = DiffMatrixAlgebra::new(&b, z)?;
    let ep = r2.parse("(1 + t*t_2/x)/2")?;
    let em = r2.parse("(1 - t*t_2/x)/2")?;
    let g = r2.mat_parse(&[alloc::vec!["0", "1"], alloc::vec!["x", "0"]])?;
    let conjugator = r2.mat_add(&r2.mat_scalar(2, &ep), &r2.mat_scale(&g, &em))?;
    let datum = DescentDatum::conjugation(&amalgam, algebra.clone(), &conjugator)?;
    Ok(QuaternionExample { amalgam, algebra, conjugator, datum })
}
