//! Fredholm determinants, renormalized von Neumann entropies, multiplicative
//! majorization, Kraus channels and bipartite Schmidt analysis, computed on
//! finite-dimensional truncations.

pub mod bipartite;
pub mod channels;
pub mod claims;
pub mod entropy;
pub mod error;
pub mod fredholm;
pub mod io;
pub mod linalg;
pub mod majorization;
pub mod random;
pub mod report;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Spectrum, TraceClassOperator};
pub use report::ClaimReport;
