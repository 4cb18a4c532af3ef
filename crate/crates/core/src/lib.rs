//! Exact 3d quantum trace of links in ideally triangulated 3-manifolds.

pub mod classical;
pub mod error;
pub mod gluing_algebra;
pub mod qtorus;
pub mod quantum_trace;
pub mod scalar;
mod text;
pub mod triangulation;

pub use error::{Error, Result};
pub use qtorus::{CommutationForm, Monomial, TorusElement};
pub use scalar::{GaussianHalfLaurent, GaussianInt};
