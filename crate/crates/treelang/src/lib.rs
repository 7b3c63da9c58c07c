//! Recognizable tree languages and finite-state tree transformations.
//!
//! The crate implements the constructive theory end to end: ranked
//! alphabets and trees with their calculus ([`tree`], [`term`],
//! [`enumerate`]), the four finite tree automaton models with
//! determinization, Boolean operations and decision procedures ([`fta`]),
//! regular tree grammars and the context-free bridge via yields
//! ([`grammar`]), relabelings, tree homomorphisms and grammar-level closure
//! operations ([`langops`]), bottom-up / top-down / look-ahead tree
//! transducers with their composition and decomposition theory
//! ([`transduce`]), and surface/target languages with their decision
//! pipelines ([`surface`]).
//!
//! Every operation is a pure function over immutable values, so everything
//! can be shared and sent across threads. Enumeration sweeps go through
//! [`batch`], which is rayon-parallel under the default `parallel` feature
//! and sequential without it.

pub mod alphabet;
pub mod batch;
pub mod enumerate;
pub mod error;
pub mod fta;
pub mod gen;
pub mod grammar;
pub mod langops;
pub mod samples;
pub mod surface;
pub mod term;
pub mod text;
pub mod transduce;
pub mod tree;

pub use alphabet::RankedAlphabet;
pub use error::{Error, Result};
pub use term::{parse_term, print_term};
pub use tree::{Node, Tree, YieldString};
