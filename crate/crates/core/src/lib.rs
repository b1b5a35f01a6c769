//! Finite-field point counting on monomial deformations of diagonal
//! hypersurfaces, Gauss and Jacobi sums, Katz hypergeometric sums, p-adic
//! gamma values and truncated hypergeometric congruences.

pub mod arith;
pub mod charsums;
pub mod cli;
pub mod congruence;
pub mod counting;
pub mod error;
pub mod ffield;
pub mod katz;
pub mod padic;
#[cfg(test)]
mod proptests;
pub mod weights;

pub use charsums::{CharIndex, ComplexValue, GaussTable};
pub use counting::{CountReport, DeformationFamily};
pub use error::{Error, Result};
pub use ffield::{FieldElement, FieldSpec};
pub use padic::{PadicInt, RationalInZp};
pub use weights::{HypParams, WeightSystem};
