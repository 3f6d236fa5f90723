use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{DiffRing, Layer, Mono, Rational, Val};

impl DiffRing {
    pub(crate) fn zero_v(&self) -> Val {
        match &self.0.layer {
            Layer::Rationals => Val::Rat(Rational::zero()),
            Layer::Poly { .. } => Val::Poly(BTreeMap::new()),
            Layer::Localize { .. } => Val::Frac(Box::new(self.par().zero_v()), 0),
            Layer::Quotient { modulus, .. } => Val::Quot(vec![self.par().zero_v(); modulus.len()]),
        }
    }

    pub(crate) fn one_v(&self) -> Val {
        self.rat_v(&Rational::one())
    }

    pub(crate) fn rat_v(&self, q: &Rational) -> Val {
        match &self.0.layer {
            Layer::Rationals => Val::Rat(q.clone()),
            _ => self.lift_v(self.par().rat_v(q)),
        }
    }

    /// Image of a parent element.
    pub(crate) fn lift_v(&self, v: Val) -> Val {
        match &self.0.layer {
            Layer::Rationals => v,
            Layer::Poly { names, .. } => {
                let mut m = BTreeMap::new();
                if !self.par().is_zero_v(&v) {
                    m.insert(Mono::one(names.len()), v);
                }
                Val::Poly(m)
            }
            Layer::Localize { .. } => Val::Frac(Box::new(v), 0),
            Layer::Quotient { modulus, .. } => {
                let mut c = vec![self.par().zero_v(); modulus.len()];
                c[0] = v;
                Val::Quot(c)
            }
        }
    }

    pub(crate) fn is_zero_v(&self, v: &Val) -> bool {
        match v {
            Val::Rat(q) => q.is_zero(),
            Val::Poly(m) => m.is_empty(),
            Val::Frac(p, _) => self.par().is_zero_v(p),
            Val::Quot(c) => c.iter().all(|x| self.par().is_zero_v(x)),
        }
    }

    pub(crate) fn neg_v(&self, a: &Val) -> Val {
        match a {
            Val::Rat(q) => Val::Rat(-q),
            Val::Poly(m) => {
                let p = self.par();
                Val::Poly(m.iter().map(|(k, c)| (k.clone(), p.neg_v(c))).collect())
            }
            Val::Frac(n, e) => Val::Frac(Box::new(self.par().neg_v(n)), *e),
            Val::Quot(c) => {
                let p = self.par();
                Val::Quot(c.iter().map(|x| p.neg_v(x)).collect())
            }
        }
    }

    pub(crate) fn scale_v(&self, a: &Val, q: &Rational) -> Val {
        if q.is_zero() {
            return self.zero_v();
        }
        match a {
            Val::Rat(x) => Val::Rat(x * q),
            Val::Poly(m) => {
                let p = self.par();
                Val::Poly(m.iter().map(|(k, c)| (k.clone(), p.scale_v(c, q))).collect())
            }
            Val::Frac(n, e) => Val::Frac(Box::new(self.par().scale_v(n, q)), *e),
            Val::Quot(c) => {
                let p = self.par();
                Val::Quot(c.iter().map(|x| p.scale_v(x, q)).collect())
            }
        }
    }

    pub(crate) fn add_v(&self, a: &Val, b: &Val) -> Val {
        match (a, b) {
            (Val::Rat(x), Val::Rat(y)) => Val::Rat(x + y),
            (Val::Poly(x), Val::Poly(y)) => {
                let p = self.par();
                let mut out = x.clone();
                for (k, c) in y {
                    add_term(p, &mut out, k.clone(), c.clone());
                }
                Val::Poly(out)
            }
            (Val::Frac(pa, ma), Val::Frac(pb, mb)) => {
                let p = self.par();
                let m = (*ma).max(*mb);
                let f = self.denom();
                let na = p.mul_v(pa, &p.pow_v(f, m - ma));
                let nb = p.mul_v(pb, &p.pow_v(f, m - mb));
                let n = p.add_v(&na, &nb);
                if p.is_zero_v(&n) {
                    Val::Frac(Box::new(n), 0)
                } else {
                    Val::Frac(Box::new(n), m)
                }
            }
            (Val::Quot(x), Val::Quot(y)) => {
                let p = self.par();
                Val::Quot(x.iter().zip(y).map(|(s, t)| p.add_v(s, t)).collect())
            }
            _ => panic!("element shapes do not match the ring"),
        }
    }

    pub(crate) fn sub_v(&self, a: &Val, b: &Val) -> Val {
        self.add_v(a, &self.neg_v(b))
    }

    pub(crate) fn mul_v(&self, a: &Val, b: &Val) -> Val {
        match (a, b) {
            (Val::Rat(x), Val::Rat(y)) => Val::Rat(x * y),
            (Val::Poly(x), Val::Poly(y)) => {
                let p = self.par();
                let mut out = BTreeMap::new();
                for (ka, ca) in x {
                    for (kb, cb) in y {
                        add_term(p, &mut out, ka.mul(kb), p.mul_v(ca, cb));
                    }
                }
                Val::Poly(out)
            }
            (Val::Frac(pa, ma), Val::Frac(pb, mb)) => {
                let p = self.par();
                self.frac_norm(p.mul_v(pa, pb), ma + mb)
            }
            (Val::Quot(x), Val::Quot(y)) => {
                let p = self.par();
                let d = x.len();
                let mut prod = vec![p.zero_v(); 2 * d - 1];
                for (i, s) in x.iter().enumerate() {
                    if p.is_zero_v(s) {
                        continue;
                    }
                    for (j, t) in y.iter().enumerate() {
                        if p.is_zero_v(t) {
                            continue;
                        }
                        prod[i + j] = p.add_v(&prod[i + j], &p.mul_v(s, t));
                    }
                }
                self.quot_reduce(prod)
            }
            _ => panic!("element shapes do not match the ring"),
        }
    }

    pub(crate) fn pow_v(&self, a: &Val, mut e: u32) -> Val {
        let mut base = a.clone();
        let mut acc = self.one_v();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_v(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_v(&base, &base);
            }
        }
        acc
    }

    fn denom(&self) -> &Val {
        match &self.0.layer {
            Layer::Localize { denom, .. } => denom,
            _ => unreachable!(),
        }
    }

    /// Cancel factors of the localized denominator from the numerator.
    pub(crate) fn frac_norm(&self, n: Val, mut m: u32) -> Val {
        let p = self.par();
        if p.is_zero_v(&n) {
            return Val::Frac(Box::new(n), 0);
        }
        let f = self.denom();
        let mut n = n;
        while m > 0 {
            match p.div_exact_v(&n, f) {
                Some(q) => {
                    n = q;
                    m -= 1;
                }
                None => break,
            }
        }
        Val::Frac(Box::new(n), m)
    }

    /// Reduce a coefficient vector of any length modulo the monic relation.
    pub(crate) fn quot_reduce(&self, mut c: Vec<Val>) -> Val {
        let (modulus, p) = match &self.0.layer {
            Layer::Quotient { modulus, .. } => (modulus, self.par()),
            _ => unreachable!(),
        };
        let d = modulus.len();
        while c.len() > d {
            let lead = c.pop().unwrap();
            if p.is_zero_v(&lead) {
                continue;
            }
            let k = c.len() - d;
            for (i, m) in modulus.iter().enumerate() {
                c[k + i] = p.sub_v(&c[k + i], &p.mul_v(&lead, m));
            }
        }
        while c.len() < d {
            c.push(p.zero_v());
        }
        Val::Quot(c)
    }

    pub(crate) fn d_v(&self, a: &Val) -> Val {
        match (&self.0.layer, a) {
            (Layer::Rationals, _) => self.zero_v(),
            (Layer::Poly { derivs, .. }, Val::Poly(m)) => {
                let p = self.par();
                let mut out = BTreeMap::new();
                for (mono, c) in m {
                    let dc = p.d_v(c);
                    add_term(p, &mut out, mono.clone(), dc);
                }
                let mut acc = Val::Poly(out);
                for (mono, c) in m {
                    for (i, &e) in mono.0.iter().enumerate() {
                        if e == 0 || self.is_zero_v(&derivs[i]) {
                            continue;
                        }
                        let mut lower = mono.clone();
                        lower.0[i] -= 1;
                        let mut t = BTreeMap::new();
                        t.insert(lower, p.scale_v(c, &Rational::from_integer(e.into())));
                        acc = self.add_v(&acc, &self.mul_v(&Val::Poly(t), &derivs[i]));
                    }
                }
                acc
            }
            (Layer::Localize { denom, ddenom }, Val::Frac(n, m)) => {
                // δ(n/f^m) = (f·δn - m·n·δf) / f^{m+1}
                let p = self.par();
                let dn = p.d_v(n);
                if *m == 0 {
                    return Val::Frac(Box::new(dn), 0);
                }
                let a = p.mul_v(denom, &dn);
                let b = p.scale_v(&p.mul_v(n, ddenom), &Rational::from_integer((*m).into()));
                self.frac_norm(p.sub_v(&a, &b), m + 1)
            }
            (Layer::Quotient { dt, .. }, Val::Quot(c)) => {
                let p = self.par();
                let coeffwise = Val::Quot(c.iter().map(|x| p.d_v(x)).collect());
                let mut formal = vec![p.zero_v(); c.len()];
                for (i, x) in c.iter().enumerate().skip(1) {
                    formal[i - 1] = p.scale_v(x, &Rational::from_integer(i.into()));
                }
                let formal = Val::Quot(formal);
                if self.is_zero_v(&formal) {
                    return coeffwise;
                }
                self.add_v(&coeffwise, &self.mul_v(&formal, dt))
            }
            _ => panic!("element shapes do not match the ring"),
        }
    }

    pub(crate) fn inverse_v(&self, a: &Val) -> Option<Val> {
        match a {
            Val::Rat(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(Val::Rat(q.recip()))
                }
            }
            Val::Poly(m) => {
                if m.len() != 1 {
                    return None;
                }
                let (mono, c) = m.iter().next().unwrap();
                if !mono.is_one() {
                    return None;
                }
                self.par().inverse_v(c).map(|x| self.lift_v(x))
            }
            Val::Frac(n, e) => {
                let p = self.par();
                if p.is_zero_v(n) {
                    return None;
                }
                let f = self.denom();
                let bound = p.deg_bound_v(n) + 1;
                let mut fk = p.one_v();
                for k in 0..=bound {
                    if let Some(q) = p.div_exact_v(&fk, n) {
                        let num = p.mul_v(&q, &p.pow_v(f, *e));
                        return Some(self.frac_norm(num, k));
                    }
                    fk = p.mul_v(&fk, f);
                }
                None
            }
            Val::Quot(_) => {
                let p = self.par();
                let m = self.mult_matrix(a);
                let det = p.det_v(&m);
                let inv_det = p.inverse_v(&det)?;
                let d = m.len();
                // first column of the adjugate solves M·b = e_0
                let mut b = Vec::with_capacity(d);
                for i in 0..d {
                    let minor = p.det_v(&minor_of(&m, 0, i));
                    let c = if i % 2 == 0 { minor } else { p.neg_v(&minor) };
                    b.push(p.mul_v(&c, &inv_det));
                }
                let b = Val::Quot(b);
                let check = self.sub_v(&self.mul_v(a, &b), &self.one_v());
                if self.is_zero_v(&check) {
                    Some(b)
                } else {
                    None
                }
            }
        }
    }

    pub(crate) fn div_exact_v(&self, a: &Val, b: &Val) -> Option<Val> {
        if self.is_zero_v(b) {
            return if self.is_zero_v(a) { Some(self.zero_v()) } else { None };
        }
        if self.is_zero_v(a) {
            return Some(self.zero_v());
        }
        match (a, b) {
            (Val::Rat(x), Val::Rat(y)) => Some(Val::Rat(x / y)),
            (Val::Poly(x), Val::Poly(y)) => {
                let p = self.par();
                let (lm_b, lc_b) = y.iter().next_back().unwrap();
                let mut rem = x.clone();
                let mut quot = BTreeMap::new();
                while let Some((lm_r, lc_r)) = rem.iter().next_back() {
                    let shift = lm_r.div(lm_b)?;
                    let c = p.div_exact_v(lc_r, lc_b)?;
                    let mut term = BTreeMap::new();
                    term.insert(shift.clone(), c.clone());
                    let sub = self.mul_v(&Val::Poly(term), b);
                    let lm_before = lm_r.clone();
                    rem = match self.sub_v(&Val::Poly(rem), &sub) {
                        Val::Poly(r) => r,
                        _ => unreachable!(),
                    };
                    if rem.contains_key(&lm_before) {
                        return None;
                    }
                    add_term(p, &mut quot, shift, c);
                }
                Some(Val::Poly(quot))
            }
            (Val::Frac(na, ma), Val::Frac(nb, mb)) => {
                // a/b = (na · f^mb) / (nb · f^ma); find k with nb | na·f^{mb+k}
                let p = self.par();
                let f = self.denom();
                let bound = p.deg_bound_v(nb) + 1;
                let mut num = p.mul_v(na, &p.pow_v(f, *mb));
                for k in 0..=bound {
                    if let Some(q) = p.div_exact_v(&num, nb) {
                        return Some(self.frac_norm(q, ma + k));
                    }
                    num = p.mul_v(&num, f);
                }
                None
            }
            (Val::Quot(_), Val::Quot(y)) => {
                if let Some(inv) = self.inverse_v(b) {
                    return Some(self.mul_v(a, &inv));
                }
                let p = self.par();
                let m = self.mult_matrix(b);
                let det = p.det_v(&m);
                if p.is_zero_v(&det) {
                    return None;
                }
                let av = match a {
                    Val::Quot(c) => c,
                    _ => unreachable!(),
                };
                let d = y.len();
                let mut q = Vec::with_capacity(d);
                for i in 0..d {
                    let mut acc = p.zero_v();
                    for (j, aj) in av.iter().enumerate() {
                        if p.is_zero_v(aj) {
                            continue;
                        }
                        // adj(M)_{ij} = (-1)^{i+j} det(M without row j, col i)
                        let minor = p.det_v(&minor_of(&m, j, i));
                        let c = if (i + j) % 2 == 0 { minor } else { p.neg_v(&minor) };
                        acc = p.add_v(&acc, &p.mul_v(&c, aj));
                    }
                    q.push(p.div_exact_v(&acc, &det)?);
                }
                let q = Val::Quot(q);
                let check = self.sub_v(&self.mul_v(b, &q), a);
                if self.is_zero_v(&check) {
                    Some(q)
                } else {
                    None
                }
            }
            _ => panic!("element shapes do not match the ring"),
        }
    }

    pub(crate) fn as_rational_v(&self, a: &Val) -> Option<Rational> {
        match a {
            Val::Rat(q) => Some(q.clone()),
            Val::Poly(m) => match m.len() {
                0 => Some(Rational::zero()),
                1 => {
                    let (mono, c) = m.iter().next().unwrap();
                    if mono.is_one() {
                        self.par().as_rational_v(c)
                    } else {
                        None
                    }
                }
                _ => None,
            },
            Val::Frac(n, e) => match self.frac_norm((**n).clone(), *e) {
                Val::Frac(n, 0) => self.par().as_rational_v(&n),
                _ => None,
            },
            Val::Quot(c) => {
                let p = self.par();
                if c[1..].iter().any(|x| !p.is_zero_v(x)) {
                    return None;
                }
                p.as_rational_v(&c[0])
            }
        }
    }

    pub(crate) fn deg_bound_v(&self, a: &Val) -> u32 {
        match a {
            Val::Rat(_) => 0,
            Val::Poly(m) => {
                let p = self.par();
                m.iter().map(|(k, c)| k.degree() + p.deg_bound_v(c)).max().unwrap_or(0)
            }
            Val::Frac(n, _) => self.par().deg_bound_v(n),
            Val::Quot(c) => {
                let p = self.par();
                c.iter().map(|x| p.deg_bound_v(x)).max().unwrap_or(0)
            }
        }
    }

    pub(crate) fn is_regular_v(&self, a: &Val) -> bool {
        match a {
            Val::Rat(q) => !q.is_zero(),
            Val::Poly(m) => {
                let p = self.par();
                m.values().any(|c| p.is_regular_v(c))
            }
            Val::Frac(n, _) => self.par().is_regular_v(n),
            Val::Quot(_) => {
                let p = self.par();
                p.is_regular_v(&p.det_v(&self.mult_matrix(a)))
            }
        }
    }

    /// Matrix of multiplication by `a` on the basis `1, t, .., t^{d-1}` (columns are images).
    pub(crate) fn mult_matrix(&self, a: &Val) -> Vec<Vec<Val>> {
        let d = match &self.0.layer {
            Layer::Quotient { modulus, .. } => modulus.len(),
            _ => unreachable!(),
        };
        let p = self.par();
        let mut cols = Vec::with_capacity(d);
        let mut cur = a.clone();
        let mut t = vec![p.zero_v(); d + 1];
        t[1] = p.one_v();
        let t = self.quot_reduce(t);
        for _ in 0..d {
            match &cur {
                Val::Quot(c) => cols.push(c.clone()),
                _ => unreachable!(),
            }
            cur = self.mul_v(&cur, &t);
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Determinant by expansion over column subsets.
    pub(crate) fn det_v(&self, m: &[Vec<Val>]) -> Val {
        let n = m.len();
        if n == 0 {
            return self.one_v();
        }
        // table[mask] = det of rows 0..popcount(mask) restricted to columns in mask
        let mut table: Vec<Option<Val>> = vec![None; 1 << n];
        table[0] = Some(self.one_v());
        for mask in 1usize..(1 << n) {
            let row = mask.count_ones() as usize - 1;
            let mut acc = self.zero_v();
            for col in 0..n {
                if mask & (1 << col) == 0 {
                    continue;
                }
                let entry = &m[row][col];
                if self.is_zero_v(entry) {
                    continue;
                }
                let sub = table[mask & !(1 << col)].as_ref().unwrap();
                if self.is_zero_v(sub) {
                    continue;
                }
                let term = self.mul_v(entry, sub);
                // Laplace sign from the column's position among the chosen ones
                let above = (mask & ((1 << col) - 1)).count_ones() as usize;
                acc = if (row + above) % 2 == 1 {
                    self.sub_v(&acc, &term)
                } else {
                    self.add_v(&acc, &term)
                };
            }
            table[mask] = Some(acc);
        }
        table[(1 << n) - 1].take().unwrap()
    }
}

fn add_term(p: &DiffRing, m: &mut BTreeMap<Mono, Val>, k: Mono, c: Val) {
    if p.is_zero_v(&c) {
        return;
    }
    match m.remove(&k) {
        Some(old) => {
            let s = p.add_v(&old, &c);
            if !p.is_zero_v(&s) {
                m.insert(k, s);
            }
        }
        None => {
            m.insert(k, c);
        }
    }
}

fn minor_of(m: &[Vec<Val>], row: usize, col: usize) -> Vec<Vec<Val>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}
