//! Labeled trees of nested subspaces, their `GL_n` orbit structure and
//! density decisions for products of partial flag varieties.

pub mod classify;
pub mod engine;
pub mod oracle;
pub mod parse;
pub mod product;
pub mod tree;

pub use classify::{
    orbit_class, trivially_sparse, FiniteCase, OrbitClass, OrbitKind, SparsenessCheck,
};
pub use engine::{
    decide, decide_with, EngineConfig, EngineError, Instance, RuleId, Status, Step, Verdict,
};
pub use parse::{parse_product_spec, parse_tree_spec, ParseError};
pub use product::{FlagProduct, ProductError};
pub use tree::{validate_tree, LabeledTree, RawTree, TreeError};
