//! Recognition of k-leaf powers (and distance-range labeled K-leaf powers)
//! through leaf-root embeddings in `G ⊠ C_k` and dynamic programming over
//! tree decompositions.
//!
//! The crate is organised by subsystem:
//!
//! * [`graph`]: graphs, degeneracy, and the strong product with a cycle.
//! * [`leafroot`]: leaf-root trees, leaf powers, verification and the
//!   product embedding.
//! * [`treedecomp`]: tree decompositions (nice, extra-nice, mixed).
//! * [`dp`]: the local-picture dynamic program and witness assembly.
//! * [`reference`]: brute-force and closed-form oracles, instance generators.
//! * [`mso`]: MSO₂ formula construction, rendering and parsing.
//! * [`formats`]: text formats shared by the command line tool.

pub mod dp;
pub mod error;
pub mod formats;
pub mod graph;
pub mod leafroot;
pub mod mso;
pub mod reference;
pub mod treedecomp;

pub use error::{Error, Result};
pub use graph::{Graph, LabeledGraph, ProductGraph};
pub use leafroot::{LeafRootTree, Verdict};
