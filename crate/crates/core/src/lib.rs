//! Hierarchy-aware classification loss engine.
//!
//! The crate is organized around a small pipeline:
//!
//! - [`taxonomy`] parses and validates class hierarchies (trees or DAGs) and
//!   derives reachability, ancestral paths, levels, and lowest common
//!   ancestors.
//! - [`targets`] builds soft-target distributions: one-hot, uniform label
//!   smoothing, ancestral smoothing with a dilution parameter, and LCA-based
//!   soft labels, precomputed as a per-class target matrix.
//! - [`loss`] computes losses and analytic gradients with respect to raw
//!   logits for the aggregated hierarchical loss, flat cross-entropy, and
//!   hierarchically weighted cross-entropy.
//! - [`trainer`] trains linear classifiers on fixed feature vectors, with
//!   learning-rate pairing between the hierarchical and flat losses, and
//!   generates synthetic hierarchical datasets.
//! - [`metrics`] evaluates leaf-level top-k accuracy and per-class accuracy
//!   at any internal level of the hierarchy.

pub mod loss;
pub mod metrics;
pub mod targets;
pub mod taxonomy;
pub mod trainer;

mod io;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use loss::{LogitBatch, LossContext, LossResult};
pub use metrics::{LevelAccuracy, MetricsReport, PredictionDump};
pub use targets::{TargetMatrix, TargetScheme};
pub use taxonomy::{AncestralPath, Mode, ReachabilityMatrix, Taxonomy};
pub use trainer::{FeatureDataset, LinearModel, RunConfig, SyntheticSpec};
