//! Singular types of plane sextics and their K3 lattices.

mod embedding;
mod invariant;
mod types;

use thiserror::Error;

pub use embedding::{
    check_embedding, embedding_from_rows, find_primitive_embedding, search_embedding,
    EmbeddingCheck, K3Embedding, SearchOutcome,
};
pub use invariant::{
    build_invariant_lattice, half_sum_norm, is_baily_borel, lattice_m1, type_invariants,
    verify_no_extra_roots, InvariantLattice, RootReport, TypeInvariants, K3_RANK,
};
pub use types::{canonical_types, Component, NodeLabel, SingularType, TypeError, SEXTIC_DEGREE};

use crate::lattice::LatticeError;
use crate::linalg::LinalgError;
use crate::roots::RootsError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexticError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("glue classes of type {0} are not integral")]
    NonIntegralGlue(String),
    #[error("the Baily-Borel criterion is only established for unions of smooth curves, not {0}")]
    BailyBorelUndefined(String),
    #[error("embedding failed exact verification: {0}")]
    EmbeddingCheckFailed(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Roots(#[from] RootsError),
}

impl From<LinalgError> for SexticError {
    fn from(e: LinalgError) -> Self {
        SexticError::Lattice(e.into())
    }
}
