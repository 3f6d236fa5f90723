//! Exact differential algebra over towers of commutative rings containing Q.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is computed with exact
//! rational arithmetic:
//!
//! - [`ring`]: differential ring towers (polynomial adjunction, localization at
//!   one element, monic étale quotients), ring homomorphisms and the tensor
//!   amalgams `B^{⊗m}` of a cover with their coface maps.
//! - [`dmod`]: free differential modules given by connection matrices, with the
//!   induced derivations on tensor products, duals and Hom.
//! - [`azumaya`]: matrix algebras with derivation `′ + [z,-]`, inner-derivation
//!   witnesses, differential automorphism tests and trivializing covers.
//! - [`descent`]: descent data over finite free covers, cocycle checks and the
//!   computation of descended modules and algebras.
//! - [`cech`]: Čech cochains with unit, constant-unit, additive and projective
//!   linear values, the logarithmic derivative and the degree-two boundary map.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod azumaya;
pub mod cech;
pub mod descent;
pub mod dmod;
mod error;
pub mod expr;
pub mod linalg;
pub mod matrix;
pub mod report;
pub mod ring;

pub use error::{Error, Result};
pub use matrix::Mat;
pub use report::CheckReport;
pub use ring::{Amalgam, DiffRing, El, Rational, RingHom};
