//! A definitional-theory kernel and finite-model workbench for higher-order
//! logic with ad-hoc overloading.
//!
//! The crate has two halves. The proof-theoretic half implements the object
//! logic (types, terms, substitution), theory contexts grown by checked
//! updates (declarations, type definitions, possibly overloaded constant
//! specifications), an LCF-style derivation checker, and the dependency
//! analysis that keeps overloading from going circular. The semantic half
//! interprets ground theories in hereditarily finite sets and executes the
//! model-extension construction update by update, so conservativity and
//! consistency can be checked at small bounds rather than taken on faith.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run -p holdef --example syntax_tour
//! cargo run -p holdef --example theory_building
//! cargo run -p holdef --example proof_checking
//! cargo run -p holdef --example dependency_analysis
//! cargo run -p holdef --example independent_fragment
//! cargo run -p holdef --example hf_universe
//! cargo run -p holdef --example term_semantics
//! cargo run -p holdef --example model_extension
//! cargo run -p holdef --example conservativity
//! cargo run -p holdef --example consistency_check
//! cargo run -p holdef --example theory_dsl
//! ```
//!
//! The `holdef` binary wraps the same library behind `check`, `deps`,
//! `indep`, `model`, `conserve` and `consist` subcommands over the
//! s-expression theory format described in the README.

pub mod base_theories;
pub mod cli;
pub mod deps;
pub mod derive;
pub mod fragment;
pub mod hfset;
pub mod kernel;
pub mod model_ext;
pub mod report;
pub mod script;
pub mod semantics;
pub mod sexpr;
pub mod syntax;
pub mod theory;

pub use syntax::{ConstInstance, Term, Type, TypeSubst};
