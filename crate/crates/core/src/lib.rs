//! Finite simplified morasses and the forcing thinned out along them.
//!
//! The crate builds fake gap-1 and gap-2 morasses, runs the two-step
//! thinning of the naive finite-condition forcings (the mod-finite chain
//! forcing and the almost-disjoint-functions forcing), and checks the
//! structural lemmas exhaustively on small instances.

pub mod embedding;
pub mod error;
pub mod forcing;
pub mod gap1;
pub mod gap1_thinning;
pub mod gap2;
pub mod generic;
pub mod gap2_thinning;
pub mod harness;
pub mod mutation;
pub mod order;
pub mod report;
pub mod spec_file;
pub mod suites;

pub use error::{Error, Result};
pub use order::{compose, critical_point, ssup, OrderMap, Ordinal};
