//! Causal-structure toolkit for xor-type faithfulness violations.
//!
//! The crate detects k-associations and unfaithful triples against exact
//! conditional-independence oracles, orients colliders with a sound rule that
//! tolerates strict 2-associations, and recovers Markov blankets with a
//! Grow-Shrink variant whose grow phase also conditions on single partners.

pub mod association;
pub mod cli;
pub mod distribution;
pub mod graph;
pub mod growshrink;
pub mod nodeset;
pub mod oracle;
pub mod orientation;
pub mod scenarios;
pub mod sparsest_permutation;

pub use distribution::{Cpt, Dataset, DiscreteJoint, Rational};
pub use graph::Dag;
pub use nodeset::NodeSet;
pub use oracle::{IndependenceOracle, Oracle};
