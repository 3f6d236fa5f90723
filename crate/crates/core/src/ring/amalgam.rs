use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{DiffRing, El, Layer};
use crate::error::{Error, Result};
use crate::ring::RingHom;

/// Highest tensor power an amalgam will build.
pub const MAX_LEVEL: usize = 5;

struct Inner {
    base: DiffRing,
    cover: DiffRing,
    /// Generators of the cover introduced above the base.
    above: Vec<String>,
    /// `levels[k-1]` is `B^{⊗k}`.
    levels: Vec<DiffRing>,
    /// `embeddings[k-1][s-1]`: `B → B^{⊗k}` into slot `s`.
    embeddings: Vec<Vec<RingHom>>,
    /// `cofaces[k-1][i]`: `B^{⊗k} → B^{⊗k+1}` inserting `1` before slot `i+1`.
    cofaces: Vec<Vec<RingHom>>,
    /// Level-`k` generator name ↦ (cover generator, slot).
    slots: BTreeMap<String, (String, usize)>,
}

/// Tensor powers `B^{⊗k}` of a cover `A → B` over `A`, with coface maps and factor embeddings.
///
/// The cover must be the structural inclusion of `A` into a tower built on top of it. Copy
/// `s ≥ 2` of a generator `t` of `B` is named `t_s`; copy 1 keeps the original name.
#[derive(Clone)]
pub struct Amalgam(Arc<Inner>);

impl core::fmt::Debug for Amalgam {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Amalgam({:?} over {:?}, levels 1..={})", self.0.cover, self.0.base, self.0.levels.len())
    }
}

pub(crate) fn slot_name(g: &str, s: usize) -> String {
    if s == 1 {
        g.into()
    } else {
        format!("{g}_{s}")
    }
}

impl Amalgam {
    /// Build levels `1..=max_level` for the cover given as a ring map.
    pub fn new(cover: &RingHom, max_level: usize) -> Result<Amalgam> {
        let (a, b) = (cover.src(), cover.dst());
        if !a.is_ancestor_of(b) {
            return Err(Error::UnsupportedTower("cover target is not a tower over its source".into()));
        }
        for (name, g) in a.generators() {
            let expected = b.embed(a, &g)?;
            if !b.eq(&cover.apply(&g), &expected) {
                return Err(Error::UnsupportedTower(format!("cover moves base generator `{name}`")));
            }
        }
        Amalgam::over(a, b, max_level)
    }

    /// Build levels `1..=max_level` for the inclusion of `a` into the tower `b`.
    pub fn over(a: &DiffRing, b: &DiffRing, max_level: usize) -> Result<Amalgam> {
        if max_level == 0 || max_level > MAX_LEVEL {
            return Err(Error::UnsupportedTower(format!("amalgam level {max_level} outside 1..={MAX_LEVEL}")));
        }
        if !a.is_ancestor_of(b) {
            return Err(Error::UnsupportedTower("cover target is not a tower over its source".into()));
        }
        let chain = b.chain();
        let start = chain.iter().position(|r| r == a).unwrap() + 1;
        let layers: Vec<DiffRing> = chain[start..].to_vec();
        let above: Vec<String> = layers.iter().flat_map(|r| r.own_names()).collect();

        let mut slots = BTreeMap::new();
        for g in &above {
            slots.insert(g.clone(), (g.clone(), 1));
        }
        let mut levels = alloc::vec![b.clone()];
        for k in 2..=max_level {
            let mut ring = levels[k - 2].clone();
            for layer in &layers {
                ring = replay(layer, &ring, &above, k)?;
            }
            for g in &above {
                slots.insert(slot_name(g, k), (g.clone(), k));
            }
            levels.push(ring);
        }

        let mut inner = Inner {
            base: a.clone(),
            cover: b.clone(),
            above,
            levels,
            embeddings: Vec::new(),
            cofaces: Vec::new(),
            slots,
        };
        for k in 1..=max_level {
            let embs = (1..=k)
                .map(|s| inner.slot_hom(&inner.cover, 1, k, &[s]))
                .collect::<Result<Vec<_>>>()?;
            inner.embeddings.push(embs);
        }
        for k in 1..max_level {
            let faces = (0..=k)
                .map(|i| {
                    let map: Vec<usize> = (1..=k).map(|s| if s <= i { s } else { s + 1 }).collect();
                    inner.slot_hom(&inner.levels[k - 1], k, k + 1, &map)
                })
                .collect::<Result<Vec<_>>>()?;
            inner.cofaces.push(faces);
        }
        let am = Amalgam(Arc::new(inner));
        am.verify()?;
        Ok(am)
    }

    fn verify(&self) -> Result<()> {
        for faces in &self.0.cofaces {
            for f in faces {
                f.check_differential()?;
            }
        }
        for embs in &self.0.embeddings {
            for e in embs {
                e.check_differential()?;
            }
        }
        if !self.simplicial_identities_hold() {
            return Err(Error::UnsupportedTower("coface maps violate the simplicial identities".into()));
        }
        Ok(())
    }

    pub fn base(&self) -> &DiffRing {
        &self.0.base
    }

    pub fn cover(&self) -> &DiffRing {
        &self.0.cover
    }

    pub fn max_level(&self) -> usize {
        self.0.levels.len()
    }

    /// `B^{⊗k}` for `1 ≤ k ≤ max_level`.
    pub fn level(&self, k: usize) -> Result<&DiffRing> {
        self.check_level(k)?;
        Ok(&self.0.levels[k - 1])
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.max_level() {
            Err(Error::UnsupportedTower(format!("amalgam level {k} not built (have 1..={})", self.max_level())))
        } else {
            Ok(())
        }
    }

    /// Factor embedding `B → B^{⊗k}` into slot `s` (1-based).
    pub fn embedding(&self, k: usize, s: usize) -> Result<&RingHom> {
        self.check_level(k)?;
        self.0.embeddings[k - 1]
            .get(s.wrapping_sub(1))
            .ok_or_else(|| Error::ShapeMismatch(format!("slot {s} at level {k}")))
    }

    /// Coface `e_i: B^{⊗k} → B^{⊗k+1}` for `0 ≤ i ≤ k`.
    pub fn coface(&self, k: usize, i: usize) -> Result<&RingHom> {
        self.check_level(k + 1)?;
        self.0.cofaces[k - 1].get(i).ok_or_else(|| Error::ShapeMismatch(format!("coface {i} at level {k}")))
    }

    /// Map `B^{⊗k} → B^{⊗target}` sending slot `s` to `slots[s-1]`, e.g. `[1, 3]` from level 2
    /// to level 3 is the `13` map.
    pub fn slot_map(&self, k: usize, target: usize, slots: &[usize]) -> Result<RingHom> {
        self.check_level(k)?;
        self.check_level(target)?;
        if slots.len() != k || slots.iter().any(|s| *s == 0 || *s > target) {
            return Err(Error::ShapeMismatch(format!("slot map {slots:?} from level {k} to {target}")));
        }
        self.0.slot_hom(&self.0.levels[k - 1], k, target, slots)
    }

    /// Whether `e_j e_i = e_i e_{j-1}` for `i < j` on every generator at every built level.
    pub fn simplicial_identities_hold(&self) -> bool {
        for k in 1..self.max_level().saturating_sub(1) {
            let src = &self.0.levels[k - 1];
            for j in 1..=k + 1 {
                for i in 0..j {
                    let lhs = |x: &El| self.0.cofaces[k][j].apply(&self.0.cofaces[k - 1][i].apply(x));
                    let rhs = |x: &El| self.0.cofaces[k][i].apply(&self.0.cofaces[k - 1][j - 1].apply(x));
                    let top = &self.0.levels[k + 1];
                    for (_, g) in src.generators() {
                        if !top.eq(&lhs(&g), &rhs(&g)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Generators of the cover above the base.
    pub fn cover_generators(&self) -> &[String] {
        &self.0.above
    }
}

impl Inner {
    fn slot_hom(&self, src: &DiffRing, _k: usize, target: usize, slots: &[usize]) -> Result<RingHom> {
        let dst = &self.levels[target - 1];
        RingHom::unchecked(src, dst, |name| {
            let mapped = match self.slots.get(name) {
                Some((g, s)) => slot_name(g, slots[s - 1]),
                None => name.into(),
            };
            dst.generator(&mapped).ok_or(Error::UnknownVariable(mapped))
        })
    }
}

/// Rebuild one layer of the cover on top of `ring`, as copy number `k`.
fn replay(layer: &DiffRing, ring: &DiffRing, above: &[String], k: usize) -> Result<DiffRing> {
    let rename = |name: &str| {
        if above.iter().any(|g| g == name) {
            slot_name(name, k)
        } else {
            name.into()
        }
    };
    let translate = |target: &DiffRing, src: &DiffRing| {
        RingHom::unchecked(src, target, |name| {
            let n = rename(name);
            target.generator(&n).ok_or(Error::UnknownVariable(n))
        })
    };
    match layer.layer() {
        Layer::Rationals => unreachable!("the rationals are never above a base"),
        Layer::Poly { names, derivs } => {
            let new: Vec<String> = names.iter().map(|n| rename(n)).collect();
            let refs: Vec<&str> = new.iter().map(|s| s.as_str()).collect();
            ring.adjoin_with(&refs, |pre| {
                let h = translate(pre, layer)?;
                Ok(derivs.iter().map(|d| h.apply(&El(d.clone()))).collect())
            })
        }
        Layer::Localize { denom, .. } => {
            let h = translate(ring, layer.par())?;
            ring.localize(&h.apply(&El(denom.clone())))
        }
        Layer::Quotient { name, modulus, .. } => {
            let h = translate(ring, layer.par())?;
            let coeffs: Vec<El> = modulus.iter().map(|c| h.apply(&El(c.clone()))).collect();
            ring.monic_quotient(&rename(name), &coeffs)
        }
    }
}
