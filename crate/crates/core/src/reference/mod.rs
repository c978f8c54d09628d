//! Independent oracles and baselines: closed forms for k = 2 and k = 3,
//! exhaustive tree search, and random positive instances.

pub mod brute;
pub mod closed_form;
pub mod enumerate;
pub mod generate;

pub use brute::{brute_force_recognize, brute_force_recognize_labeled, OracleVerdict};
pub use closed_form::{bull, contains_induced, dart, gem, is_chordal, recognize_k2, recognize_k3};
pub use enumerate::{enumerate_trees, FreeTree};
pub use generate::{caterpillar_instance, random_leaf_power_instance, InstanceBundle};
