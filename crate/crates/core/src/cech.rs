//! Čech cochains of a cover `A → B` and the degree-two boundary map.
//!
//! A degree-`m` cochain lives on `B^{⊗m+1}` (amalgam level `m + 1`). Scalar-valued kinds are
//! stored as `1×1` matrices. Coboundaries use the coface maps `e_i`: at level 2, `e₀`, `e₁`
//! and `e₂` are the `23`, `13` and `12` maps.

use alloc::format;
use alloc::vec::Vec;

use crate::descent::{unvectorize, vectorize, DescentDatum};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::report::CheckReport;
use crate::ring::{Amalgam, DiffRing, El};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SheafKind {
    /// `G_m`: units.
    Units,
    /// `G_{m,δ}`: units with `δu = 0`.
    ConstantUnits,
    /// The additive sheaf `W(A)`.
    Additive,
    /// `PGl_n`: invertible `n×n` matrices modulo scalar units.
    ProjectiveLinear(usize),
}

impl SheafKind {
    fn size(self) -> usize {
        match self {
            SheafKind::ProjectiveLinear(n) => n,
            _ => 1,
        }
    }

    fn multiplicative(self) -> bool {
        self != SheafKind::Additive
    }
}

#[derive(Clone, Debug)]
pub struct Cochain {
    amalgam: Amalgam,
    degree: usize,
    kind: SheafKind,
    value: Mat,
}

impl Cochain {
    pub fn new(amalgam: &Amalgam, degree: usize, kind: SheafKind, value: Mat) -> Result<Cochain> {
        let r = amalgam.level(degree + 1)?;
        let n = kind.size();
        if n == 0 || value.rows() != n || value.cols() != n {
            return Err(Error::ShapeMismatch(format!("{kind:?} value must be {n}x{n}")));
        }
        match kind {
            SheafKind::Units | SheafKind::ConstantUnits => {
                let u = value.get(0, 0);
                if r.inverse(u).is_none() {
                    return Err(Error::NotAUnit(r.format(u)));
                }
                if kind == SheafKind::ConstantUnits && !r.is_zero(&r.d(u)) {
                    return Err(Error::NotConstant);
                }
            }
            SheafKind::Additive => {}
            SheafKind::ProjectiveLinear(_) => {
                if !r.is_invertible(&value) {
                    return Err(Error::NotInvertible);
                }
            }
        }
        Ok(Cochain { amalgam: amalgam.clone(), degree, kind, value })
    }

    pub fn scalar(amalgam: &Amalgam, degree: usize, kind: SheafKind, value: El) -> Result<Cochain> {
        Cochain::new(amalgam, degree, kind, Mat::new(1, 1, alloc::vec![value])?)
    }

    /// The neutral cochain: `1`, `0` or the identity matrix.
    pub fn identity(amalgam: &Amalgam, degree: usize, kind: SheafKind) -> Result<Cochain> {
        let r = amalgam.level(degree + 1)?;
        let value = match kind {
            SheafKind::Additive => r.mat_zero(1, 1),
            k => r.mat_identity(k.size()),
        };
        Cochain::new(amalgam, degree, kind, value)
    }

    pub fn amalgam(&self) -> &Amalgam {
        &self.amalgam
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> SheafKind {
        self.kind
    }

    pub fn value(&self) -> &Mat {
        &self.value
    }

    /// The value of a scalar-valued cochain.
    pub fn element(&self) -> &El {
        self.value.get(0, 0)
    }

    /// `B^{⊗degree+1}`.
    pub fn ring(&self) -> &DiffRing {
        self.amalgam.level(self.degree + 1).expect("checked at construction")
    }

    fn is_neutral(&self) -> bool {
        let r = self.ring();
        match self.kind {
            SheafKind::Additive => r.is_zero(self.element()),
            SheafKind::ProjectiveLinear(_) => r.scalar_of(&self.value).is_some(),
            _ => r.is_one(self.element()),
        }
    }
}

/// Whether `a·b⁻¹` is a scalar matrix.
pub fn equal_mod_scalars(ring: &DiffRing, a: &Mat, b: &Mat) -> Result<bool> {
    let ratio = ring.mat_mul(a, &ring.mat_inverse(b)?)?;
    Ok(ring.scalar_of(&ratio).is_some())
}

/// Alternating coface combination. For `PGl_n` only degrees 0 and 1 are defined:
/// `g ↦ e₀(g)·e₁(g)⁻¹` and `m ↦ e₁(m)⁻¹·e₀(m)·e₂(m)`.
pub fn cech_d(c: &Cochain) -> Result<Cochain> {
    let k = c.degree + 1;
    let am = &c.amalgam;
    let top = am.level(k + 1)?;
    let faces = (0..=k).map(|i| am.coface(k, i).map(|f| f.apply_mat(&c.value))).collect::<Result<Vec<_>>>()?;
    let value = match c.kind {
        SheafKind::Additive => {
            let terms: Vec<El> = faces
                .iter()
                .enumerate()
                .map(|(i, f)| if i % 2 == 0 { f.get(0, 0).clone() } else { top.neg(f.get(0, 0)) })
                .collect();
            top.mat_scalar(1, &top.sum(&terms))
        }
        SheafKind::Units | SheafKind::ConstantUnits => {
            let mut acc = top.one();
            for (i, f) in faces.iter().enumerate() {
                let x = f.get(0, 0);
                let x = if i % 2 == 0 { x.clone() } else { top.inverse(x).ok_or(Error::NotAUnit(top.format(x)))? };
                acc = top.mul(&acc, &x);
            }
            top.mat_scalar(1, &acc)
        }
        SheafKind::ProjectiveLinear(_) => match c.degree {
            0 => top.mat_mul(&faces[0], &top.mat_inverse(&faces[1])?)?,
            1 => top.mat_product(&[&top.mat_inverse(&faces[1])?, &faces[0], &faces[2]])?,
            d => {
                return Err(Error::UnsupportedTower(format!("non-abelian coboundary in degree {d}")));
            }
        },
    };
    Cochain::new(am, k, c.kind, value)
}

/// `cech_d(c)` is neutral (modulo scalars for `PGl_n`).
pub fn is_cocycle(c: &Cochain) -> Result<bool> {
    Ok(cech_d(c)?.is_neutral())
}

/// `c = cech_d(candidate)` (modulo scalars for `PGl_n`).
pub fn is_coboundary(c: &Cochain, candidate: &Cochain) -> Result<bool> {
    if candidate.degree + 1 != c.degree || candidate.kind.size() != c.kind.size() {
        return Err(Error::ShapeMismatch(format!(
            "candidate of degree {} and kind {:?} for a degree-{} {:?} cochain",
            candidate.degree, candidate.kind, c.degree, c.kind
        )));
    }
    if c.kind.multiplicative() != candidate.kind.multiplicative() {
        return Err(Error::ShapeMismatch("additive and multiplicative kinds do not mix".into()));
    }
    let d = cech_d(candidate)?;
    let r = c.ring();
    Ok(match c.kind {
        SheafKind::ProjectiveLinear(_) => equal_mod_scalars(r, &c.value, &d.value)?,
        _ => r.eq(c.element(), d.element()),
    })
}

/// Logarithmic derivative `δ(u)/u`.
pub fn dlog(ring: &DiffRing, u: &El) -> Result<El> {
    let inv = ring.inverse(u).ok_or_else(|| Error::NotAUnit(ring.format(u)))?;
    Ok(ring.mul(&ring.d(u), &inv))
}

/// The `PGl_n` 1-cocycle of an algebra datum: a matrix `m` over `B⊗B` with `φ(x) = m·x·m⁻¹`.
///
/// For an algebra map `φ` every `M_Y = Σ_a φ(E_a1)·Y·E_1a` satisfies `φ(x)·M_Y = M_Y·x`; small
/// integer combinations `Y = Σ c_k E_k1` are tried until one is invertible.
pub fn pgl_cocycle_from_descent(d: &DescentDatum) -> Result<Cochain> {
    let am = d.amalgam();
    let r2 = am.level(2)?;
    let k = d.rank();
    let n = (1..=k).find(|n| n * n == k).ok_or(Error::NotConjugation)?;
    let image = |x: &Mat| -> Result<Mat> { unvectorize(n, &r2.mat_vec(d.phi(), &vectorize(x))?) };
    let column_images = (0..n).map(|a| image(&r2.mat_unit(n, a, 0))).collect::<Result<Vec<_>>>()?;
    let units: Vec<Mat> = (0..n * n).map(|i| r2.mat_unit(n, i / n, i % n)).collect();
    let unit_images = units.iter().map(image).collect::<Result<Vec<_>>>()?;

    let mut coeffs = alloc::vec![0i64; n];
    loop {
        // next coefficient vector in {0..3}^n, skipping zero
        let mut pos = 0;
        while pos < n && coeffs[pos] == 3 {
            coeffs[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return Err(Error::NotConjugation);
        }
        coeffs[pos] += 1;

        let mut y = r2.mat_zero(n, n);
        for (row, c) in coeffs.iter().enumerate() {
            y.set(row, 0, r2.from_int(*c));
        }
        let mut m = r2.mat_zero(n, n);
        for (a, img) in column_images.iter().enumerate() {
            m = r2.mat_add(&m, &r2.mat_product(&[img, &y, &r2.mat_unit(n, 0, a)])?)?;
        }
        for (x, fx) in units.iter().zip(&unit_images) {
            if !r2.mat_eq(&r2.mat_mul(fx, &m)?, &r2.mat_mul(&m, x)?) {
                return Err(Error::NotConjugation);
            }
        }
        if r2.is_invertible(&m) {
            return Cochain::new(am, 1, SheafKind::ProjectiveLinear(n), m);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryVariant {
    /// Lift to `Gl_n`; the boundary is a `G_m` 2-cocycle.
    Plain,
    /// Lift to `Gl_{n,δ}`; the lift must be δ-constant and the boundary is a `G_{m,δ}` 2-cocycle.
    Differential,
}

#[derive(Clone, Debug)]
pub struct TwoCocycle {
    pub value: Cochain,
    pub lift: Mat,
    /// Level at which `w₂₃₄·w₁₃₄⁻¹·w₁₂₄·w₁₂₃⁻¹ = 1` was checked; `None` when the amalgam stops
    /// at level 3 and only scalarity was verified.
    pub identity_level: Option<usize>,
}

/// `∂²`: the scalar `w = ℓ₁₃⁻¹·ℓ₂₃·ℓ₁₂` for a lift `ℓ` of a `PGl_n` 1-cocycle.
pub fn boundary2(c: &Cochain, lift: &Mat, variant: BoundaryVariant) -> Result<TwoCocycle> {
    let n = match c.kind {
        SheafKind::ProjectiveLinear(n) if c.degree == 1 => n,
        _ => return Err(Error::ShapeMismatch("boundary2 needs a degree-1 PGl_n cochain".into())),
    };
    let am = &c.amalgam;
    let r2 = am.level(2)?;
    if lift.rows() != n || lift.cols() != n {
        return Err(Error::ShapeMismatch(format!("lift must be {n}x{n}")));
    }
    if !r2.is_invertible(lift) {
        return Err(Error::NotInvertible);
    }
    if !equal_mod_scalars(r2, lift, &c.value)? {
        return Err(Error::LiftMismatch);
    }
    let kind = match variant {
        BoundaryVariant::Plain => SheafKind::Units,
        BoundaryVariant::Differential => {
            let log = r2.mat_mul(&r2.mat_inverse(lift)?, &r2.mat_d(lift))?;
            if r2.scalar_of(&log).is_none() {
                return Err(Error::NotDifferential("ℓ⁻¹ℓ′ is not scalar".into()));
            }
            if !r2.mat_is_zero(&r2.mat_d(lift)) {
                return Err(Error::LiftNotConstant);
            }
            SheafKind::ConstantUnits
        }
    };
    let lifted = Cochain { amalgam: am.clone(), degree: 1, kind: SheafKind::ProjectiveLinear(n), value: lift.clone() };
    let w = cech_d(&lifted)?;
    let r3 = am.level(3)?;
    let s = r3.scalar_of(&w.value).ok_or_else(|| Error::NotScalar(format!("{:?}", r3.mat_format(&w.value))))?;
    let value = Cochain::scalar(am, 2, kind, s)?;
    let identity_level = if am.max_level() >= 4 {
        if !is_cocycle(&value)? {
            return Err(Error::NotScalar("boundary fails the degree-2 cocycle identity".into()));
        }
        Some(4)
    } else {
        None
    };
    Ok(TwoCocycle { value, lift: lift.clone(), identity_level })
}

/// Two lifts give boundaries differing by `cech_d(ℓ₂·ℓ₁⁻¹)`.
pub fn lift_independence_check(c: &Cochain, lift1: &Mat, lift2: &Mat) -> Result<CheckReport> {
    let w1 = boundary2(c, lift1, BoundaryVariant::Plain)?;
    let w2 = boundary2(c, lift2, BoundaryVariant::Plain)?;
    let am = &c.amalgam;
    let (r2, r3) = (am.level(2)?, am.level(3)?);
    let mut report = CheckReport::new("lift independence");
    report.pass("both lifts reduce to the cochain");
    let ratio = r2.mat_mul(lift2, &r2.mat_inverse(lift1)?)?;
    let s = r2.scalar_of(&ratio).ok_or(Error::LiftMismatch)?;
    report.pass("ℓ₂·ℓ₁⁻¹ is scalar");
    let ds = cech_d(&Cochain::scalar(am, 1, SheafKind::Units, s)?)?;
    let quotient = r3.div(w2.value.element(), w1.value.element())?;
    report.record(
        "w₂·w₁⁻¹ = cech_d(ℓ₂·ℓ₁⁻¹)",
        if r3.eq(&quotient, ds.element()) { None } else { Some(format!("w₂/w₁ = {}", r3.format(&quotient))) },
    );
    Ok(report)
}

/// `∂²(c ⊗ c′) = ∂²(c)·∂²(c′)` on Kronecker products of cochains and lifts.
pub fn boundary_additivity_check(c1: &Cochain, lift1: &Mat, c2: &Cochain, lift2: &Mat) -> Result<CheckReport> {
    let (n1, n2) = (c1.kind.size(), c2.kind.size());
    if c1.amalgam.cover() != c2.amalgam.cover() || c1.amalgam.base() != c2.amalgam.base() {
        return Err(Error::RingMismatch);
    }
    let w1 = boundary2(c1, lift1, BoundaryVariant::Plain)?;
    let w2 = boundary2(c2, lift2, BoundaryVariant::Plain)?;
    let am = &c1.amalgam;
    let (r2, r3) = (am.level(2)?, am.level(3)?);
    let product = Cochain::new(am, 1, SheafKind::ProjectiveLinear(n1 * n2), r2.kron(&c1.value, &c2.value))?;
    let mut report = CheckReport::new("boundary additivity");
    let w = boundary2(&product, &r2.kron(lift1, lift2), BoundaryVariant::Plain)?;
    report.pass("∂² of the Kronecker product is scalar");
    let expected = r3.mul(w1.value.element(), w2.value.element());
    report.record(
        "∂²(c⊗c′) = ∂²(c)·∂²(c′)",
        if r3.eq(w.value.element(), &expected) {
            None
        } else {
            Some(format!("{} vs {}", r3.format(w.value.element()), r3.format(&expected)))
        },
    );
    Ok(report)
}

/// The cochain and lift of the opposite algebra on the transpose model: `(m⁻¹)ᵀ`.
pub fn opposite(c: &Cochain, lift: &Mat) -> Result<(Cochain, Mat)> {
    let r = c.ring();
    let value = r.mat_inverse(&c.value)?.transpose();
    let op = Cochain::new(&c.amalgam, c.degree, c.kind, value)?;
    Ok((op, r.mat_inverse(lift)?.transpose()))
}
