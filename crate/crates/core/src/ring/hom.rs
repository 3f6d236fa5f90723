use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{DiffRing, El, Layer, Val};
use crate::error::{Error, Result};
use crate::matrix::Mat;

#[derive(Clone, Debug)]
enum LayerImage {
    Base,
    Gens(Vec<El>),
    /// Inverse of the image of the localized denominator.
    Inv(El),
    Gen(El),
}

/// A ring homomorphism between towers, fixed by the images of generators.
#[derive(Clone, Debug)]
pub struct RingHom {
    src: DiffRing,
    dst: DiffRing,
    chain: Vec<DiffRing>,
    images: Vec<LayerImage>,
}

impl RingHom {
    /// The homomorphism sending each named generator of `src` to the given element of `dst`.
    /// Generators without an assignment go to the generator of the same name in `dst`.
    /// Fails unless localized denominators become units, relations hold and `δ` commutes.
    pub fn new(src: &DiffRing, dst: &DiffRing, assignments: &[(&str, El)]) -> Result<RingHom> {
        for (name, _) in assignments {
            if src.generator(name).is_none() {
                return Err(Error::UnknownVariable((*name).into()));
            }
        }
        let hom = RingHom::build(src, dst, |name| {
            assignments
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, e)| e.clone())
                .or_else(|| dst.generator(name))
                .ok_or_else(|| Error::InvalidHom(format!("no image for generator `{name}`")))
        })?;
        hom.check_relations()?;
        hom.check_differential()?;
        Ok(hom)
    }

    /// The structural inclusion of an ancestor ring.
    pub fn inclusion(src: &DiffRing, dst: &DiffRing) -> Result<RingHom> {
        if !src.is_ancestor_of(dst) {
            return Err(Error::RingMismatch);
        }
        RingHom::build(src, dst, |name| dst.embed(src, &src.generator(name).unwrap()))
    }

    pub fn identity(r: &DiffRing) -> RingHom {
        RingHom::inclusion(r, r).expect("identity")
    }

    /// Skips the relation and derivation checks; inverses of denominators are still required.
    pub(crate) fn unchecked<F>(src: &DiffRing, dst: &DiffRing, image: F) -> Result<RingHom>
    where
        F: FnMut(&str) -> Result<El>,
    {
        RingHom::build(src, dst, image)
    }

    fn build<F>(src: &DiffRing, dst: &DiffRing, mut image: F) -> Result<RingHom>
    where
        F: FnMut(&str) -> Result<El>,
    {
        let chain = src.chain();
        let mut hom = RingHom { src: src.clone(), dst: dst.clone(), chain: chain.clone(), images: Vec::new() };
        for (idx, r) in chain.iter().enumerate() {
            let img = match r.layer() {
                Layer::Rationals => LayerImage::Base,
                Layer::Poly { names, .. } => {
                    LayerImage::Gens(names.iter().map(|n| image(n)).collect::<Result<Vec<_>>>()?)
                }
                Layer::Localize { denom, .. } => {
                    let f = hom.apply_at(idx - 1, denom);
                    let inv = dst.inverse(&f).ok_or_else(|| {
                        Error::InvalidHom(format!("denominator maps to non-unit {}", dst.format(&f)))
                    })?;
                    LayerImage::Inv(inv)
                }
                Layer::Quotient { name, .. } => LayerImage::Gen(image(name)?),
            };
            hom.images.push(img);
        }
        Ok(hom)
    }

    pub fn src(&self) -> &DiffRing {
        &self.src
    }

    pub fn dst(&self) -> &DiffRing {
        &self.dst
    }

    /// Image of a generator of the source.
    pub fn image_of(&self, name: &str) -> Option<El> {
        self.src.generator(name).map(|g| self.apply(&g))
    }

    fn apply_at(&self, idx: usize, v: &Val) -> El {
        let dst = &self.dst;
        let ring = &self.chain[idx];
        match (&self.images[idx], v) {
            (LayerImage::Base, Val::Rat(q)) => dst.from_rational(q),
            (LayerImage::Gens(gens), Val::Poly(m)) => {
                let mut acc = dst.zero();
                for (mono, c) in m {
                    let mut t = self.apply_at(idx - 1, c);
                    for (g, e) in gens.iter().zip(&mono.0) {
                        if *e > 0 {
                            t = dst.mul(&t, &dst.pow(g, *e));
                        }
                    }
                    acc = dst.add(&acc, &t);
                }
                acc
            }
            (LayerImage::Inv(inv), Val::Frac(n, e)) => {
                let n = self.apply_at(idx - 1, n);
                dst.mul(&n, &dst.pow(inv, *e))
            }
            (LayerImage::Gen(t), Val::Quot(c)) => {
                let mut acc = dst.zero();
                let mut power = dst.one();
                for x in c {
                    if !ring.par().is_zero_v(x) {
                        acc = dst.add(&acc, &dst.mul(&self.apply_at(idx - 1, x), &power));
                    }
                    power = dst.mul(&power, t);
                }
                acc
            }
            _ => panic!("element shapes do not match the ring"),
        }
    }

    pub fn apply(&self, a: &El) -> El {
        self.apply_at(self.chain.len() - 1, &a.0)
    }

    pub fn apply_mat(&self, m: &Mat) -> Mat {
        m.map(|x| self.apply(x))
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &RingHom) -> Result<RingHom> {
        if self.dst != next.src {
            return Err(Error::RingMismatch);
        }
        RingHom::build(&self.src, &next.dst, |name| Ok(next.apply(&self.image_of(name).unwrap())))
    }

    fn check_relations(&self) -> Result<()> {
        for (idx, r) in self.chain.iter().enumerate() {
            if let (Layer::Quotient { name, modulus, .. }, LayerImage::Gen(t)) = (r.layer(), &self.images[idx]) {
                let mut f = self.dst.pow(t, modulus.len() as u32);
                for (i, c) in modulus.iter().enumerate() {
                    let c = self.apply_at(idx - 1, c);
                    f = self.dst.add(&f, &self.dst.mul(&c, &self.dst.pow(t, i as u32)));
                }
                if !self.dst.is_zero(&f) {
                    return Err(Error::InvalidHom(format!("relation for `{name}` is not preserved")));
                }
            }
        }
        Ok(())
    }

    /// Generators on which `δ` fails to commute with the map.
    pub fn non_differential_generators(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (name, g) in self.src.generators() {
            let lhs = self.dst.d(&self.apply(&g));
            let rhs = self.apply(&self.src.d(&g));
            if !self.dst.eq(&lhs, &rhs) {
                bad.push(name);
            }
        }
        bad
    }

    pub fn is_differential(&self) -> bool {
        self.non_differential_generators().is_empty()
    }

    pub fn check_differential(&self) -> Result<()> {
        let bad = self.non_differential_generators();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidHom(format!("δ does not commute on {}", bad.join(", "))))
        }
    }
}
