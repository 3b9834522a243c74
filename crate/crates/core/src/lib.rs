//! Triple-product calculus on finite-dimensional C*-algebras.
//!
//! Elements live in direct sums of full matrix blocks, maps are stored by
//! their action on matrix units, and the classifiers decide whether a linear
//! map is a triple, TRO or Jordan homomorphism, whether it (and its
//! amplifications) preserves orthogonality, and how it factors as a weighted
//! homomorphism.

pub mod algebra;
pub mod error;
pub mod funcalc;
pub mod maps;
pub mod matrix;
pub mod preservers;
pub mod rng;
pub mod tolerance;
pub mod triple;

pub use algebra::{amplify_element, Algebra, Element, MatrixUnit};
pub use error::{Error, Result};
pub use maps::LinearMap;
pub use matrix::{ComplexMatrix, SvdResult, C64};
pub use tolerance::Tolerances;
pub use triple::ScalarFunction;
