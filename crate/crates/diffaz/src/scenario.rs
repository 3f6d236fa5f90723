//! Scenario files: JSON declarations of rings, modules, algebras, covers, descent data and
//! cochains, followed by checks with expected outcomes.

use std::collections::BTreeMap;

use diffaz_core::azumaya::DiffMatrixAlgebra;
use diffaz_core::cech::{pgl_cocycle_from_descent, Cochain, SheafKind};
use diffaz_core::descent::DescentDatum;
use diffaz_core::dmod::DiffModule;
use diffaz_core::{Amalgam, DiffRing, Mat};
use serde::Deserialize;

use crate::ScenarioError;

/// Matrix literal: rows of expression strings.
pub type Matrix = Vec<Vec<String>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub declarations: Vec<Declaration>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Declaration {
    pub name: String,
    #[serde(flatten)]
    pub item: Item,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    /// `Q[vars]` with `δv` given by expressions in the new variables.
    Base { vars: Vec<String>, derivatives: BTreeMap<String, String> },
    Adjoin { ring: String, vars: Vec<String>, derivatives: BTreeMap<String, String> },
    Localize { ring: String, at: String },
    /// Monic quotient by `poly`, an expression in `var` over `ring`.
    Quotient { ring: String, var: String, poly: String },
    Module { ring: String, connection: Matrix },
    Algebra { ring: String, witness: Matrix },
    /// Tensor powers of `ring` over `base` up to `levels`.
    Cover { base: String, ring: String, levels: usize },
    Datum { cover: String, module: String, phi: Matrix },
    AlgebraDatum {
        cover: String,
        algebra: String,
        #[serde(default)]
        conjugator: Option<Matrix>,
        #[serde(default)]
        phi: Option<Matrix>,
    },
    /// `M ⊗_A B` (or `Λ ⊗_A B`) with `φ = id`; `of` names a module or algebra over the base.
    CanonicalDatum { cover: String, of: String },
    Cochain { cover: String, degree: usize, sheaf: Sheaf, value: Literal },
    /// The `PGl_n` 1-cocycle of an algebra datum.
    PglCocycle { datum: String },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheaf {
    Units,
    ConstantUnits,
    Additive,
    ProjectiveLinear,
}

/// An element or a matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Element(String),
    Matrix(Matrix),
}

#[derive(Debug, Clone, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub op: crate::checks::Op,
    pub expect: Expect,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expect {
    Pass,
    Fail,
    Value(serde_json::Value),
    Error(String),
}

impl<'de> Deserialize<'de> for Expect {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Expect, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Value { value: serde_json::Value },
            Error { error: String },
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "pass" => Ok(Expect::Pass),
            Raw::Word(w) if w == "fail" => Ok(Expect::Fail),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("expected outcome `{w}` is not pass or fail"))),
            Raw::Value { value } => Ok(Expect::Value(value)),
            Raw::Error { error } => Ok(Expect::Error(error)),
        }
    }
}

impl std::fmt::Display for Expect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expect::Pass => write!(f, "pass"),
            Expect::Fail => write!(f, "fail"),
            Expect::Value(v) => write!(f, "value {v}"),
            Expect::Error(k) => write!(f, "error {k}"),
        }
    }
}

pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
}

#[derive(Clone, Debug)]
pub enum Entry {
    Ring(DiffRing),
    Module(DiffModule),
    Algebra(DiffMatrixAlgebra),
    Cover(Amalgam),
    Datum(DescentDatum),
    Cochain(Cochain),
}

impl Entry {
    fn what(&self) -> &'static str {
        match self {
            Entry::Ring(_) => "ring",
            Entry::Module(_) => "module",
            Entry::Algebra(_) => "algebra",
            Entry::Cover(_) => "cover",
            Entry::Datum(_) => "datum",
            Entry::Cochain(_) => "cochain",
        }
    }
}

/// Declared objects by name.
#[derive(Default, Debug)]
pub struct Env {
    entries: BTreeMap<String, Entry>,
}

macro_rules! getter {
    ($name:ident, $variant:ident, $ty:ty) => {
        pub fn $name(&self, name: &str) -> Result<&$ty, ScenarioError> {
            match self.entries.get(name) {
                Some(Entry::$variant(x)) => Ok(x),
                Some(other) => Err(ScenarioError::Declaration(format!(
                    "`{name}` is a {}, expected a {}",
                    other.what(),
                    stringify!($name)
                ))),
                None => Err(ScenarioError::Declaration(format!("unknown name `{name}`"))),
            }
        }
    };
}

impl Env {
    getter!(ring, Ring, DiffRing);
    getter!(module, Module, DiffModule);
    getter!(algebra, Algebra, DiffMatrixAlgebra);
    getter!(cover, Cover, Amalgam);
    getter!(datum, Datum, DescentDatum);
    getter!(cochain, Cochain, Cochain);

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    /// Build every declaration in order. Any failure is a declaration error.
    pub fn build(decls: &[Declaration]) -> Result<Env, ScenarioError> {
        let mut env = Env::default();
        for d in decls {
            if env.entries.contains_key(&d.name) {
                return Err(ScenarioError::Declaration(format!("duplicate name `{}`", d.name)));
            }
            let entry = env.declare(&d.item).map_err(|e| match e {
                ScenarioError::Core(err) => ScenarioError::Declaration(format!("`{}`: {err}", d.name)),
                ScenarioError::Declaration(msg) => ScenarioError::Declaration(format!("`{}`: {msg}", d.name)),
                other => other,
            })?;
            env.entries.insert(d.name.clone(), entry);
        }
        Ok(env)
    }

    fn declare(&self, item: &Item) -> Result<Entry, ScenarioError> {
        Ok(match item {
            Item::Base { vars, derivatives } => {
                let v: Vec<&str> = vars.iter().map(String::as_str).collect();
                let d: Vec<(&str, &str)> = derivatives.iter().map(|(k, x)| (k.as_str(), x.as_str())).collect();
                Entry::Ring(DiffRing::base(&v, &d)?)
            }
            Item::Adjoin { ring, vars, derivatives } => {
                let v: Vec<&str> = vars.iter().map(String::as_str).collect();
                let d: Vec<(&str, &str)> = derivatives.iter().map(|(k, x)| (k.as_str(), x.as_str())).collect();
                Entry::Ring(self.ring(ring)?.adjoin(&v, &d)?)
            }
            Item::Localize { ring, at } => {
                let r = self.ring(ring)?;
                Entry::Ring(r.localize(&r.parse(at)?)?)
            }
            Item::Quotient { ring, var, poly } => Entry::Ring(self.ring(ring)?.monic_quotient_expr(var, poly)?),
            Item::Module { ring, connection } => {
                let r = self.ring(ring)?;
                Entry::Module(DiffModule::free(r, r.mat_parse(connection)?)?)
            }
            Item::Algebra { ring, witness } => {
                let r = self.ring(ring)?;
                Entry::Algebra(DiffMatrixAlgebra::new(r, r.mat_parse(witness)?)?)
            }
            Item::Cover { base, ring, levels } => {
                Entry::Cover(Amalgam::over(self.ring(base)?, self.ring(ring)?, *levels)?)
            }
            Item::Datum { cover, module, phi } => {
                let am = self.cover(cover)?;
                let phi = am.level(2)?.mat_parse(phi)?;
                Entry::Datum(DescentDatum::new_module(am, self.module(module)?.clone(), phi)?)
            }
            Item::AlgebraDatum { cover, algebra, conjugator, phi } => {
                let am = self.cover(cover)?;
                let alg = self.algebra(algebra)?.clone();
                let r2 = am.level(2)?;
                match (conjugator, phi) {
                    (Some(m), None) => Entry::Datum(DescentDatum::conjugation(am, alg, &r2.mat_parse(m)?)?),
                    (None, Some(p)) => Entry::Datum(DescentDatum::new_algebra(am, alg, r2.mat_parse(p)?)?),
                    _ => {
                        return Err(ScenarioError::Declaration(
                            "algebra datum needs exactly one of `conjugator` and `phi`".into(),
                        ))
                    }
                }
            }
            Item::CanonicalDatum { cover, of } => {
                let am = self.cover(cover)?;
                match self.entries.get(of) {
                    Some(Entry::Module(m)) => Entry::Datum(DescentDatum::canonical(am, m)?),
                    Some(Entry::Algebra(a)) => Entry::Datum(DescentDatum::canonical_algebra(am, a)?),
                    _ => return Err(ScenarioError::Declaration(format!("`{of}` is not a module or algebra"))),
                }
            }
            Item::Cochain { cover, degree, sheaf, value } => {
                let am = self.cover(cover)?;
                let r = am.level(degree + 1)?;
                let value = literal_matrix(r, value)?;
                let kind = match sheaf {
                    Sheaf::Units => SheafKind::Units,
                    Sheaf::ConstantUnits => SheafKind::ConstantUnits,
                    Sheaf::Additive => SheafKind::Additive,
                    Sheaf::ProjectiveLinear => SheafKind::ProjectiveLinear(value.rows()),
                };
                Entry::Cochain(Cochain::new(am, *degree, kind, value)?)
            }
            Item::PglCocycle { datum } => Entry::Cochain(pgl_cocycle_from_descent(self.datum(datum)?)?),
        })
    }
}

/// An element literal becomes a `1×1` matrix.
pub fn literal_matrix(r: &DiffRing, lit: &Literal) -> Result<Mat, ScenarioError> {
    Ok(match lit {
        Literal::Element(s) => r.mat_scalar(1, &r.parse(s)?),
        Literal::Matrix(m) => r.mat_parse(m)?,
    })
}
