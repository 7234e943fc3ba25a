//! Poisson-type extensions for α-harmonic functions on the unit disk, their
//! first-order partials, the sharp constants bounding those partials, and a
//! harness that checks the resulting inequalities numerically.

pub mod boundary;
pub mod constants;
pub mod error;
pub mod extension;
pub mod harness;
pub mod means;
pub mod qc;
pub mod quad;
pub mod specfun;
mod sum;

pub use boundary::{extremal_family, BoundaryFunction, FamilyKind, SubstitutionMap, Variable};
pub use error::{Error, Result};
pub use extension::{AlphaParam, DiskPoint, Partials};
pub use means::LebesgueExponent;
pub use num_complex::Complex64;
pub use quad::QuadratureSpec;
