//! Exact polyhedral geometry and affine monoid toolkit.
//!
//! Cones, polytopes and lattices over ℤ and ℚ; Hilbert bases; normal and seminormal closures;
//! dilation towers; polarized monoids; Laurent matrix splitting; monomial matrix rings;
//! truncated big Witt vectors; and the iterated pyramid/bipyramid classification.

pub mod arith;
pub mod cone;
pub mod dilation;
pub mod error;
pub mod hilbert;
pub mod lambda;
pub mod lattice;
pub mod laurent;
pub mod linalg;
pub mod monoid;
pub mod pclass;
pub mod polytope;
pub mod pyramidal;
pub mod witt;

pub use error::{Error, Result};
