//! Command-line front end for the `sextic-lattice` library: census tables,
//! per-type reports, lattice inspection and self-verification.

pub mod cache;
pub mod commands;
pub mod error;
pub mod report;
pub mod verify;
