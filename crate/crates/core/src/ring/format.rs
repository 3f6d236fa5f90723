use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{DiffRing, El, Layer, Mono, Val};

fn is_sum(s: &str) -> bool {
    s.contains(' ')
}

fn is_atom(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parenthesize `s` for use as a factor.
fn factor(s: &str) -> String {
    if is_sum(s) {
        format!("({s})")
    } else {
        s.to_string()
    }
}

/// Parenthesize `s` for use as a base or divisor.
fn tight(s: &str) -> String {
    if is_atom(s) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

fn term(coeff: String, mono: String) -> String {
    if mono.is_empty() {
        coeff
    } else if coeff == "1" {
        mono
    } else if coeff == "-1" {
        format!("-{mono}")
    } else {
        format!("{}*{}", factor(&coeff), mono)
    }
}

fn mono_string(names: &[String], m: &Mono) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(&m.0)
        .filter(|(_, e)| **e > 0)
        .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

impl DiffRing {
    /// Render an element as an expression that [`DiffRing::parse`] reads back.
    pub fn format(&self, a: &El) -> String {
        self.format_v(&a.0)
    }

    pub(crate) fn format_v(&self, a: &Val) -> String {
        match (&self.0.layer, a) {
            (Layer::Rationals, Val::Rat(q)) => q.to_string(),
            (Layer::Poly { names, .. }, Val::Poly(m)) => {
                let p = self.par();
                let terms = m.iter().rev().map(|(k, c)| term(p.format_v(c), mono_string(names, k))).collect();
                join_terms(terms)
            }
            (Layer::Localize { denom, .. }, Val::Frac(n, e)) => {
                let p = self.par();
                let (n, e) = match self.frac_norm((**n).clone(), *e) {
                    Val::Frac(n, e) => (*n, e),
                    _ => unreachable!(),
                };
                let num = p.format_v(&n);
                if e == 0 {
                    return num;
                }
                let f = tight(&p.format_v(denom));
                let den = if e == 1 { f } else { format!("{f}^{e}") };
                format!("{}/{}", factor(&num), den)
            }
            (Layer::Quotient { name, .. }, Val::Quot(c)) => {
                let p = self.par();
                let terms = c
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, x)| !p.is_zero_v(x))
                    .map(|(i, x)| {
                        let mono = match i {
                            0 => String::new(),
                            1 => name.clone(),
                            _ => format!("{name}^{i}"),
                        };
                        term(p.format_v(x), mono)
                    })
                    .collect();
                join_terms(terms)
            }
            _ => panic!("element shapes do not match the ring"),
        }
    }
}
