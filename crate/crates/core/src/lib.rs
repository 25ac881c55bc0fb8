//! Barabási-Albert random graphs whose node features are correlated along
//! edges, untrained GCN/GAT graph classifiers, and closed-form estimators for
//! the correlation strength seen by late-arriving nodes.
//!
//! The crate is `no_std` and only needs `alloc`. IO, the experiment sweep and
//! the command-line driver live in the `bacorr` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod generator;
pub mod gnn;
pub mod graph;
pub mod randkit;
pub mod sampling;
pub mod theory;

pub use error::{Error, Result};
pub use generator::{AttachmentRule, BaGenerator, CorrelationMode, Generated};
pub use gnn::{classify_forward, GnnParams, Matrix, ModelKind};
pub use graph::{DegreeHistogram, FeatureMatrix, Graph};
pub use randkit::Rng;
