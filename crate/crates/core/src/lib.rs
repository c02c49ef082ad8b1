//! Exact lattice computations for K3 surfaces attached to nodal plane
//! sextics.
//!
//! The crate is layered bottom-up: [`linalg`] provides exact integer linear
//! algebra, [`lattice`] builds Gram-matrix lattices and their discriminant
//! forms on top of it, [`roots`] enumerates short vectors in definite
//! lattices, and [`sextic`] models singular types, their invariant lattices
//! and embeddings into the K3 lattice.

// Matrix code reads best with explicit index loops.
#![allow(clippy::needless_range_loop)]

pub mod lattice;
pub mod linalg;
pub mod roots;
pub mod sextic;

pub use lattice::{Embedding, Lattice, Signature};
pub use linalg::IntMatrix;
pub use sextic::SingularType;
