//! Exact computation in the group of polynomial automorphisms of the affine
//! plane over `Q` or a prime field.
//!
//! Maps compose as functions: `g.compose(&h)` is `g ∘ h`, so
//! `(g·h)(p) = g(h(p))`. Every module follows this convention.

pub mod error;
pub mod family;
pub mod fixed;
pub mod jung;
pub mod lab;
pub mod nilpotent;
pub mod plane;
pub mod poly;
pub mod scalar;
pub mod separable;
pub mod word;

pub use error::*;
pub use poly::{MPoly, UPoly, Vars};
pub use plane::{FactorClass, PlaneMap};
pub use scalar::{Field, Scalar};
pub use word::{AltWord, Factor, Letter};
