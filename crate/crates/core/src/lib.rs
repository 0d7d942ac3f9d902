//! Exact graded dimensions and algebraic entropy for the path algebra `KE`,
//! the Cohn path algebra `C_K(E)`, its relative quotients `C_K^X(E)` and the
//! Leavitt path algebra `L_K(E)` of a finite directed graph `E`.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: graph documents, validation, adjacency data.
//! * [`matrix`]: arbitrary-precision nonnegative integer matrices.
//! * [`dims`]: graded dimension sequences of the standard filtrations.
//! * [`entropy`]: entropy estimators, spectral radius, the agreement chain.
//! * [`resolvent`]: resolvents and contour-integral reconstruction of `A^k`.
//! * [`oracle`]: brute-force normal forms in `C_K^X(E)`, the ground truth
//!   for the dimension formulas.
//! * [`corpus`]: named graphs and seeded random corpora.

pub mod corpus;
pub mod dims;
mod ddouble;
pub mod entropy;
pub mod graph;
pub mod matrix;
pub mod oracle;
pub mod resolvent;

pub use dims::{DimKind, DimSequence};
pub use entropy::{EntropyEstimate, SpectralEstimate};
pub use graph::{Edge, Graph, GraphError, VertexClasses};
pub use matrix::{ExactMatrix, MatrixError, PathCountVector};
