//! MSO₂ formulas describing leaf roots as subgraphs of `G ⊠ C_k`.
//!
//! Formulas are built fully expanded, checked for well-formedness, rendered
//! as s-expressions or in mathematical notation, and parsed back. Evaluation
//! is brute force and only meant for tiny structures.

pub mod ast;
pub mod emit;
pub mod eval;
pub mod render;

pub use ast::{check_well_formed, free_variables, Formula, Quantifier, Signature, Sort};
pub use emit::{
    edge_conjunct_count, emit_labeled_formula, emit_predicate, emit_recognition_formula, haspath_blocks, labeled_signature, range_pairs,
    range_set_name, recognition_signature, Emitter, Predicate, HORIZONTAL,
};
pub use eval::{
    evaluate, extend_walk, find_walk, is_walk, micro_oracle, micro_oracle_labeled, Structure, Value, Walk, MICRO_ORACLE_EDGE_LIMIT,
    SET_QUANTIFIER_LIMIT,
};
pub use render::{parse_formula_file, parse_sexpr, render, write_formula_file, Style};
