//! Domain-level hyperlink graph analytics for web ecosystem measurement.
//!
//! The crate covers the whole measurement pipeline: turning crawled HTML into
//! dated domain-to-domain link records ([`ingest`]), aggregating them into a
//! labeled [`graph::DomainGraph`], ecosystem metrics over that graph
//! ([`analytics`], [`centrality`]), popularity and mention time series
//! ([`stats`]), vector autoregression and partial Granger causality
//! ([`causality`]), and the partisanship x conspiracy-linking fringe score
//! ([`scoring`]).
//!
//! Inner loops that are embarrassingly parallel (per-source BFS, bootstrap
//! replicates, per-page parsing) go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Results never
//! depend on the number of workers.

// `!(x > 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod causality;
pub mod centrality;
pub mod error;
pub mod graph;
pub mod ingest;
pub(crate) mod linalg;
pub mod par;
pub mod scoring;
pub mod stats;

pub use error::{Error, Result};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
