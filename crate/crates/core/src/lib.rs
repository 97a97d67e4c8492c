//! Rank analysis of the most cited publications of research units.
//!
//! The crate builds a field's world list of papers ordered by citations,
//! reads off each paper's global rank (`rank1`) and its rank inside its own
//! unit (`rank2`), and condenses a unit's ten best global ranks into the
//! Rk-index. Synthetic lognormal ensembles ([`synthdist`]) are used to check
//! the Rk-index against top-percentile counts ([`experiments`]); real
//! paper-level records ([`ingest`]) are turned into country tables.

pub mod cli;
pub mod experiments;
pub mod export;
pub mod indicators;
pub mod ingest;
pub mod rankcore;
pub mod special;
pub mod stats;
pub mod synthdist;

pub use indicators::{rk_index, RkParams, RkResult};
pub use rankcore::{build_world, dual_ranks, geometric_mean, top_k, TiePolicy, WorldIndex};
pub use synthdist::{CitationSeries, Ensemble, EnsembleConfig, LognormalSpec};

/// Version string embedded in every output's metadata.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
