//! Fault-tolerant preservers of strong connectivity and of capped edge connectivity in
//! directed multigraphs.
//!
//! A `k`-fault-tolerant preserver of `G` is a subgraph `H` such that for every set `F` of
//! at most `k` failed edges, `H - F` and `G - F` agree on the relevant strong-connectivity
//! relation. The crate provides exact greedy constructions, a hierarchy-based construction,
//! a randomized fixed-parameter construction, exhaustive verifiers, and generators for the
//! graph families on which such preservers are forced to be large.

pub mod digraph;
pub mod error;
pub mod expander;
pub mod faults;
pub mod families;
pub mod flowcut;
pub mod fpt;
pub mod impcut;
pub mod kconn;
pub mod preservers;
pub mod verify;

pub use digraph::{DiGraph, Edge, EdgeId, SccPartition};
pub use error::{Error, Result};
pub use faults::FaultSet;
pub use flowcut::{Cut, Direction};
pub use preservers::{PreserverResult, Variant, VariantSpec};
