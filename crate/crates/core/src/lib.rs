//! Explanation queries over decision trees, decision sets, decision lists,
//! ordered binary decision diagrams and their majority-vote ensembles.
//!
//! The crate is organised around a [`models::Model`] value that can be loaded
//! from JSON, an explanation [`explain::Query`], and a set of solvers: exact
//! polynomial routines for single trees and diagrams ([`dt`], [`obdd`]), a
//! bounded branching search for decision lists ([`dslist`]), Boolean circuit
//! compilation ([`circuits`]) and an exhaustive reference oracle
//! ([`explain::oracle_min`]). [`solve`] picks a route automatically.
//! [`gadgets`] builds the instance families used to cross-check hardness
//! reductions.

pub mod circuits;
pub mod dslist;
pub mod dt;
pub mod error;
pub mod explain;
pub mod format;
pub mod gadgets;
pub mod models;
pub mod obdd;
pub mod random;
pub mod solve;

pub use error::{Error, Result};
pub use explain::{Kind, Minimality, Query, Target, Witness};
pub use models::{
    Classifier, DecisionList, DecisionSet, DecisionTree, Ensemble, Example, Literal, Model,
    ModelKind, Obdd, Parameters, PartialExample, Term,
};
