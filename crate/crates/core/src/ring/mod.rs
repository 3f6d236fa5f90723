//! Towers of differential commutative rings over Q.
//!
//! A ring is built from the rationals by a sequence of layers:
//!
//! - a polynomial layer `R[X_1..X_k]` with prescribed derivatives `δX_i`
//!   (this is both the base ring `Q[x..]` and every later adjunction),
//! - a localization `R[1/f]` at a single non-zero-divisor `f`,
//! - a monic quotient `R[t]/(f(t))` with `f′(t)` a unit, where `δt` is the
//!   unique extension `δt = -f^δ(t)/f′(t)`.
//!
//! Elements are stored in a normal form per layer and carry no pointer back to
//! their ring; every operation is a method on the owning [`DiffRing`]. Passing an
//! element of another ring is a logic error and may panic.

mod amalgam;
mod arith;
mod format;
mod hom;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;

use crate::error::{Error, Result};

pub use amalgam::Amalgam;
pub use hom::RingHom;

/// Exact rational numbers.
pub type Rational = BigRational;

/// Exponent vector of a monomial in the variables of one polynomial layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Mono(pub(crate) Vec<u32>);

impl Mono {
    pub(crate) fn one(k: usize) -> Mono {
        Mono(vec![0; k])
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    pub(crate) fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub(crate) fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub(crate) fn div(&self, other: &Mono) -> Option<Mono> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Mono)
    }
}

/// Layer-shaped element payload.
#[derive(Clone, Debug)]
pub(crate) enum Val {
    Rat(Rational),
    /// Sparse polynomial over the parent; never stores zero coefficients.
    Poly(BTreeMap<Mono, Val>),
    /// `p / f^m` over the parent.
    Frac(alloc::boxed::Box<Val>, u32),
    /// Coefficients of `1, t, .., t^{d-1}` over the parent.
    Quot(Vec<Val>),
}

/// An element of some [`DiffRing`].
#[derive(Clone, Debug)]
pub struct El(pub(crate) Val);

/// Which construction produced the top layer of a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Rationals,
    Polynomial,
    Localization,
    Quotient,
}

pub(crate) enum Layer {
    Rationals,
    Poly { names: Vec<String>, derivs: Vec<Val> },
    Localize { denom: Val, ddenom: Val },
    Quotient { name: String, modulus: Vec<Val>, dt: Val },
}

pub(crate) struct Node {
    id: usize,
    parent: Option<DiffRing>,
    pub(crate) layer: Layer,
}

/// A differential commutative Q-algebra presented as a tower. Cheap to clone.
#[derive(Clone)]
pub struct DiffRing(pub(crate) Arc<Node>);

static NEXT_ID: AtomicUsize = AtomicUsize::new(1);

impl fmt::Debug for DiffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffRing#{}{}", self.0.id, self.describe())
    }
}

impl PartialEq for DiffRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for DiffRing {}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl DiffRing {
    fn from_layer(parent: Option<DiffRing>, layer: Layer) -> DiffRing {
        DiffRing(Arc::new(Node {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            parent,
            layer,
        }))
    }

    /// The rationals with the zero derivation.
    pub fn rationals() -> DiffRing {
        DiffRing::from_layer(None, Layer::Rationals)
    }

    /// `Q[vars]` with `δ(var) = expr` for each listed assignment (missing ones are 0).
    pub fn base(vars: &[&str], derivatives: &[(&str, &str)]) -> Result<DiffRing> {
        DiffRing::rationals().adjoin(vars, derivatives)
    }

    /// Polynomial extension with derivatives given as expressions over old and new generators.
    pub fn adjoin(&self, vars: &[&str], derivatives: &[(&str, &str)]) -> Result<DiffRing> {
        for (name, _) in derivatives {
            if !vars.contains(name) {
                return Err(Error::UnknownVariable((*name).to_string()));
            }
        }
        self.adjoin_with(vars, |pre| {
            vars.iter()
                .map(|v| match derivatives.iter().find(|(n, _)| n == v) {
                    Some((_, e)) => pre.parse(e),
                    None => Ok(pre.zero()),
                })
                .collect()
        })
    }

    /// Polynomial extension whose derivatives are computed by `derivs` inside the new
    /// ring. The closure may use arithmetic and generators of the new ring but not `d`.
    pub fn adjoin_with<F>(&self, vars: &[&str], derivs: F) -> Result<DiffRing>
    where
        F: FnOnce(&DiffRing) -> Result<Vec<El>>,
    {
        self.check_new_names(vars)?;
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let zero = Val::Poly(BTreeMap::new());
        let pre = DiffRing::from_layer(
            Some(self.clone()),
            Layer::Poly { names: names.clone(), derivs: vec![zero; vars.len()] },
        );
        let values = derivs(&pre)?;
        if values.len() != vars.len() {
            return Err(Error::ShapeMismatch("one derivative per new variable".into()));
        }
        Ok(DiffRing::from_layer(
            Some(self.clone()),
            Layer::Poly { names, derivs: values.into_iter().map(|e| e.0).collect() },
        ))
    }

    /// `R[1/f]`. `δ(1/f) = -δf/f²` follows from the stored `δf`.
    pub fn localize(&self, f: &El) -> Result<DiffRing> {
        if self.is_zero(f) {
            return Err(Error::ZeroDenominator);
        }
        if !self.is_regular_v(&f.0) {
            return Err(Error::ZeroDivisorDenominator(self.format(f)));
        }
        let ddenom = self.d_v(&f.0);
        Ok(DiffRing::from_layer(
            Some(self.clone()),
            Layer::Localize { denom: f.0.clone(), ddenom },
        ))
    }

    /// `R[t]/(t^d + c_{d-1} t^{d-1} + .. + c_0)` with `coeffs = [c_0, .., c_{d-1}]`.
    pub fn monic_quotient(&self, var: &str, coeffs: &[El]) -> Result<DiffRing> {
        if coeffs.is_empty() {
            return Err(Error::NotMonic(var.to_string()));
        }
        self.check_new_names(&[var])?;
        let d = coeffs.len();
        let modulus: Vec<Val> = coeffs.iter().map(|c| c.0.clone()).collect();
        let placeholder = Val::Quot(vec![self.zero_v(); d]);
        let pre = DiffRing::from_layer(
            Some(self.clone()),
            Layer::Quotient { name: var.to_string(), modulus: modulus.clone(), dt: placeholder },
        );
        // f'(t) and f^δ(t) as elements of the quotient.
        let mut fprime = vec![self.zero_v(); d];
        let mut fdelta = vec![self.zero_v(); d];
        fprime[d - 1] = self.rat_v(&Rational::from_integer(d.into()));
        for (i, c) in modulus.iter().enumerate() {
            if i >= 1 {
                let s = self.scale_v(c, &Rational::from_integer(i.into()));
                fprime[i - 1] = self.add_v(&fprime[i - 1], &s);
            }
            fdelta[i] = self.d_v(c);
        }
        let fprime = Val::Quot(fprime);
        let fdelta = Val::Quot(fdelta);
        let inv = pre.inverse_v(&fprime).ok_or(Error::NotEtale)?;
        let dt = pre.neg_v(&pre.mul_v(&fdelta, &inv));
        let ring = DiffRing::from_layer(
            Some(self.clone()),
            Layer::Quotient { name: var.to_string(), modulus, dt: dt.clone() },
        );
        let check = ring.add_v(&ring.mul_v(&fprime, &dt), &fdelta);
        debug_assert!(ring.is_zero_v(&check));
        Ok(ring)
    }

    /// Monic quotient with the relation written as an expression in `var`, e.g. `"t^2 - x"`.
    pub fn monic_quotient_expr(&self, var: &str, poly: &str) -> Result<DiffRing> {
        self.check_new_names(&[var])?;
        let tmp = self.adjoin(&[var], &[])?;
        let f = tmp.parse(poly)?;
        let terms = match f.0 {
            Val::Poly(m) => m,
            _ => unreachable!(),
        };
        let degree = terms.keys().map(|m| m.0[0]).max().unwrap_or(0) as usize;
        if degree == 0 {
            return Err(Error::NotMonic(var.to_string()));
        }
        let lead = terms.get(&Mono(vec![degree as u32])).map(|c| El(c.clone()));
        if !lead.map(|c| self.is_one(&c)).unwrap_or(false) {
            return Err(Error::NotMonic(var.to_string()));
        }
        let coeffs: Vec<El> = (0..degree)
            .map(|i| El(terms.get(&Mono(vec![i as u32])).cloned().unwrap_or_else(|| self.zero_v())))
            .collect();
        self.monic_quotient(var, &coeffs)
    }

    fn check_new_names(&self, vars: &[&str]) -> Result<()> {
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Parse(alloc::format!("`{v}` is not an identifier")));
            }
            if vars[..i].contains(v) || self.generator(v).is_some() {
                return Err(Error::DuplicateName(v.to_string()));
            }
        }
        Ok(())
    }

    // ---------------------------------------------------------------- structure

    pub fn id(&self) -> usize {
        self.0.id
    }

    pub fn parent(&self) -> Option<&DiffRing> {
        self.0.parent.as_ref()
    }

    pub(crate) fn par(&self) -> &DiffRing {
        self.0.parent.as_ref().expect("layer without parent")
    }

    pub(crate) fn layer(&self) -> &Layer {
        &self.0.layer
    }

    pub fn kind(&self) -> LayerKind {
        match self.0.layer {
            Layer::Rationals => LayerKind::Rationals,
            Layer::Poly { .. } => LayerKind::Polynomial,
            Layer::Localize { .. } => LayerKind::Localization,
            Layer::Quotient { .. } => LayerKind::Quotient,
        }
    }

    /// Rings from the rationals up to `self`, inclusive.
    pub fn chain(&self) -> Vec<DiffRing> {
        let mut out = vec![self.clone()];
        let mut cur = self.clone();
        while let Some(p) = cur.parent().cloned() {
            out.push(p.clone());
            cur = p;
        }
        out.reverse();
        out
    }

    /// Whether `self` is `other` or one of its ancestors.
    pub fn is_ancestor_of(&self, other: &DiffRing) -> bool {
        let mut cur = Some(other.clone());
        while let Some(r) = cur {
            if &r == self {
                return true;
            }
            cur = r.parent().cloned();
        }
        false
    }

    /// Names introduced by this layer only.
    pub fn own_names(&self) -> Vec<String> {
        match &self.0.layer {
            Layer::Poly { names, .. } => names.clone(),
            Layer::Quotient { name, .. } => vec![name.clone()],
            _ => Vec::new(),
        }
    }

    /// All generator names of the tower, root first.
    pub fn generator_names(&self) -> Vec<String> {
        self.chain().iter().flat_map(|r| r.own_names()).collect()
    }

    /// A generator by name, searched through the whole tower.
    pub fn generator(&self, name: &str) -> Option<El> {
        self.generator_v(name).map(El)
    }

    fn generator_v(&self, name: &str) -> Option<Val> {
        match &self.0.layer {
            Layer::Rationals => None,
            Layer::Poly { names, .. } => {
                if let Some(i) = names.iter().position(|n| n == name) {
                    let mut e = vec![0; names.len()];
                    e[i] = 1;
                    let mut m = BTreeMap::new();
                    m.insert(Mono(e), self.par().one_v());
                    return Some(Val::Poly(m));
                }
                self.par().generator_v(name).map(|v| self.lift_v(v))
            }
            Layer::Localize { .. } => self.par().generator_v(name).map(|v| self.lift_v(v)),
            Layer::Quotient { name: own, modulus, .. } => {
                if own == name {
                    let p = self.par();
                    let mut c = vec![p.zero_v(); modulus.len() + 1];
                    c[1] = p.one_v();
                    return Some(self.quot_reduce(c));
                }
                self.par().generator_v(name).map(|v| self.lift_v(v))
            }
        }
    }

    /// Generators with their values, root first.
    pub fn generators(&self) -> Vec<(String, El)> {
        self.generator_names()
            .into_iter()
            .map(|n| {
                let g = self.generator(&n).expect("listed generator");
                (n, g)
            })
            .collect()
    }

    /// Denominator of a localization layer, as an element of the parent.
    pub fn localized_denominator(&self) -> Option<El> {
        match &self.0.layer {
            Layer::Localize { denom, .. } => Some(El(denom.clone())),
            _ => None,
        }
    }

    /// Inverse of the localized denominator, as an element of this ring.
    pub fn denominator_inverse(&self) -> Option<El> {
        match &self.0.layer {
            Layer::Localize { .. } => Some(El(Val::Frac(alloc::boxed::Box::new(self.par().one_v()), 1))),
            _ => None,
        }
    }

    /// Coefficients `[c_0, .., c_{d-1}]` of the monic relation of a quotient layer.
    pub fn quotient_modulus(&self) -> Option<Vec<El>> {
        match &self.0.layer {
            Layer::Quotient { modulus, .. } => Some(modulus.iter().cloned().map(El).collect()),
            _ => None,
        }
    }

    /// The relation `f(t)` evaluated in the quotient (always zero) and `δ(f(t))`.
    pub fn relation_check(&self) -> Option<(El, El)> {
        let modulus = self.quotient_modulus()?;
        let t = El(match &self.0.layer {
            Layer::Quotient { name, .. } => self.generator_v(name).unwrap(),
            _ => unreachable!(),
        });
        let mut f = self.pow(&t, modulus.len() as u32);
        for (i, c) in modulus.iter().enumerate() {
            let c = self.lift(c);
            f = self.add(&f, &self.mul(&c, &self.pow(&t, i as u32)));
        }
        let df = self.d(&f);
        Some((f, df))
    }

    /// Short structural description, e.g. `Q[x][1/x][t]/(..)`.
    pub fn describe(&self) -> String {
        match &self.0.layer {
            Layer::Rationals => "Q".to_string(),
            Layer::Poly { names, .. } => alloc::format!("{}[{}]", self.par().describe(), names.join(",")),
            Layer::Localize { denom, .. } => {
                alloc::format!("{}[1/({})]", self.par().describe(), self.par().format(&El(denom.clone())))
            }
            Layer::Quotient { name, modulus, .. } => {
                alloc::format!("{}[{}]/(deg {})", self.par().describe(), name, modulus.len())
            }
        }
    }

    // ---------------------------------------------------------------- elements

    pub fn zero(&self) -> El {
        El(self.zero_v())
    }

    pub fn one(&self) -> El {
        El(self.one_v())
    }

    pub fn from_int(&self, n: i64) -> El {
        El(self.rat_v(&Rational::from_integer(n.into())))
    }

    pub fn from_rational(&self, q: &Rational) -> El {
        El(self.rat_v(q))
    }

    pub fn add(&self, a: &El, b: &El) -> El {
        El(self.add_v(&a.0, &b.0))
    }

    pub fn sub(&self, a: &El, b: &El) -> El {
        El(self.sub_v(&a.0, &b.0))
    }

    pub fn neg(&self, a: &El) -> El {
        El(self.neg_v(&a.0))
    }

    pub fn mul(&self, a: &El, b: &El) -> El {
        El(self.mul_v(&a.0, &b.0))
    }

    pub fn scale(&self, a: &El, q: &Rational) -> El {
        El(self.scale_v(&a.0, q))
    }

    pub fn pow(&self, a: &El, e: u32) -> El {
        El(self.pow_v(&a.0, e))
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a El>>(&self, items: I) -> El {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn is_zero(&self, a: &El) -> bool {
        self.is_zero_v(&a.0)
    }

    pub fn is_one(&self, a: &El) -> bool {
        self.is_zero_v(&self.sub_v(&a.0, &self.one_v()))
    }

    /// Exact equality of normal forms (cross-multiplied in localizations).
    pub fn eq(&self, a: &El, b: &El) -> bool {
        self.is_zero_v(&self.sub_v(&a.0, &b.0))
    }

    /// The derivation.
    pub fn d(&self, a: &El) -> El {
        El(self.d_v(&a.0))
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inverse(&self, a: &El) -> Option<El> {
        self.inverse_v(&a.0).map(El)
    }

    /// `q` with `a = q·b`, when such a quotient is found.
    pub fn div_exact(&self, a: &El, b: &El) -> Option<El> {
        self.div_exact_v(&a.0, &b.0).map(El)
    }

    /// `a / b` when `b` is a unit.
    pub fn div(&self, a: &El, b: &El) -> Result<El> {
        let inv = self.inverse(b).ok_or_else(|| Error::NotAUnit(self.format(b)))?;
        Ok(self.mul(a, &inv))
    }

    /// The element as a rational constant, if it is one.
    pub fn as_rational(&self, a: &El) -> Option<Rational> {
        self.as_rational_v(&a.0)
    }

    /// Whether multiplication by `a` is injective (exact except for polynomial layers over
    /// non-domains, where a sufficient test is used).
    pub fn is_regular(&self, a: &El) -> bool {
        self.is_regular_v(&a.0)
    }

    /// Upper bound on the total degree of `a`, used to bound divisibility searches.
    pub fn degree_bound(&self, a: &El) -> u32 {
        self.deg_bound_v(&a.0)
    }

    /// Parse an expression over the tower's generators.
    pub fn parse(&self, text: &str) -> Result<El> {
        crate::expr::parse(self, text)
    }

    /// Lift an element of the parent ring.
    pub fn lift(&self, a: &El) -> El {
        El(self.lift_v(a.0.clone()))
    }

    /// Image of an element of an ancestor ring under the structural inclusion.
    pub fn embed(&self, from: &DiffRing, a: &El) -> Result<El> {
        if self == from {
            return Ok(a.clone());
        }
        match self.parent() {
            Some(p) => {
                let inner = p.embed(from, a)?;
                Ok(self.lift(&inner))
            }
            None => Err(Error::RingMismatch),
        }
    }

    /// Preimage in an ancestor ring, if `a` lies in its image.
    pub fn restrict_to(&self, ancestor: &DiffRing, a: &El) -> Option<El> {
        if self == ancestor {
            return Some(a.clone());
        }
        let p = self.parent()?;
        let inner = match (&self.0.layer, &a.0) {
            (Layer::Poly { .. }, Val::Poly(m)) => {
                if m.is_empty() {
                    p.zero_v()
                } else if m.len() == 1 {
                    let (mono, c) = m.iter().next().unwrap();
                    if !mono.is_one() {
                        return None;
                    }
                    c.clone()
                } else {
                    return None;
                }
            }
            (Layer::Localize { .. }, Val::Frac(num, e)) => match self.frac_norm((**num).clone(), *e) {
                Val::Frac(num, 0) => *num,
                _ => return None,
            },
            (Layer::Quotient { .. }, Val::Quot(c)) => {
                if c[1..].iter().any(|x| !p.is_zero_v(x)) {
                    return None;
                }
                c[0].clone()
            }
            _ => return None,
        };
        p.restrict_to(ancestor, &El(inner))
    }

    /// Rank of `self` as a free module over `ancestor`, when only quotient layers separate them.
    pub fn free_rank_over(&self, ancestor: &DiffRing) -> Result<usize> {
        if self == ancestor {
            return Ok(1);
        }
        match (&self.0.layer, self.parent()) {
            (Layer::Quotient { modulus, .. }, Some(p)) => Ok(modulus.len() * p.free_rank_over(ancestor)?),
            (_, Some(_)) => Err(Error::UnsupportedTower("not finite free over the base (non-quotient layer)".into())),
            (_, None) => Err(Error::RingMismatch),
        }
    }

    /// Basis `t^i · β` of `self` over `ancestor` (quotient layers only), in the order used by
    /// [`DiffRing::coords_over`].
    pub fn basis_over(&self, ancestor: &DiffRing) -> Result<Vec<El>> {
        if self == ancestor {
            return Ok(vec![self.one()]);
        }
        let p = self.parent().ok_or(Error::RingMismatch)?;
        let d = match &self.0.layer {
            Layer::Quotient { modulus, .. } => modulus.len(),
            _ => return Err(Error::UnsupportedTower("not finite free over the base (non-quotient layer)".into())),
        };
        let inner = p.basis_over(ancestor)?;
        let mut out = Vec::with_capacity(d * inner.len());
        for i in 0..d {
            for b in &inner {
                let mut c = vec![p.zero_v(); d];
                c[i] = b.0.clone();
                out.push(El(Val::Quot(c)));
            }
        }
        Ok(out)
    }

    /// Coordinates of `a` in [`DiffRing::basis_over`].
    pub fn coords_over(&self, ancestor: &DiffRing, a: &El) -> Result<Vec<El>> {
        if self == ancestor {
            return Ok(vec![a.clone()]);
        }
        let p = self.parent().ok_or(Error::RingMismatch)?;
        match (&self.0.layer, &a.0) {
            (Layer::Quotient { .. }, Val::Quot(c)) => {
                let mut out = Vec::new();
                for x in c {
                    out.extend(p.coords_over(ancestor, &El(x.clone()))?);
                }
                Ok(out)
            }
            _ => Err(Error::UnsupportedTower("not finite free over the base (non-quotient layer)".into())),
        }
    }
}
