//! Rule induction for inflectional morphology gated by the Tolerance
//! Principle.
//!
//! A [`LearnedTree`](model::LearnedTree) is grown by [`tree::train`] from
//! `(lemma, features, inflection)` instances and queried with
//! [`inflect::inflect`]. The [`corpus`] module loads and samples training
//! vocabularies; [`stats`] holds the rank correlation and t-tests used to
//! compare runs.

pub mod corpus;
pub mod error;
pub mod features;
pub mod inflect;
mod labeled;
pub mod model;
pub mod stats;
pub mod tp;
pub mod tree;

pub use error::{Error, Result};
pub use features::{ending_of, induce_ending_features, induce_for};
pub use inflect::{hamming_padded, inflect, nearest_memorized, AnalogyMode, ProductionResult, Provenance, Query};
pub use model::{
    apply_change, derive_change, Change, Feature, FeatureId, Instance, LearnedTree, Memorized, Node, RuleChanges, Word,
};
pub use tp::{is_productive, threshold, TpVerdict};
pub use tree::{best_split, node_verdict, train, TrainConfig};
