//! Exact computations with truncated cooperads, cofree coalgebras, twisting and
//! Maurer-Cartan spaces of operadic curved algebras.

// arity-indexed tables are walked in parallel throughout
#![allow(clippy::needless_range_loop)]

pub mod builders;
pub mod cofree;
pub mod cooperad;
pub mod error;
pub mod graded;
pub mod instance;
pub mod mc_space;
pub mod report;
pub mod scalars;
pub mod simplicial;
pub mod sym_action;
pub mod twisting;

pub use error::{Error, Result};
