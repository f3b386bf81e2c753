//! Statutory reasoning over the SARA tax cases.

pub mod audit;
pub mod case;
pub mod eval;
pub mod kb;
pub mod loader;
pub mod query;
pub mod schedule;
pub mod slots;
pub mod stats;
pub mod statute_tree;
