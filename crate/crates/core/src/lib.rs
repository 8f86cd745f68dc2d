//! Path complexes and path Weisfeiler-Lehman refinement.
//!
//! The crate lifts simple graphs to path, clique and ring complexes, refines
//! member colourings over them, runs a random-weight message-passing network,
//! and measures how well each method separates strongly regular graphs.

pub mod bench;
pub mod complex;
pub mod graph;
pub mod network;
pub mod refine;

pub use complex::{BoundaryMode, ComplexKind, HigherOrderComplex, LiftError, LiftSpec, MemberId};
pub use graph::{SimpleGraph, Vertex, VertexPermutation};
