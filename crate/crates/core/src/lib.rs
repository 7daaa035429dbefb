//! Lending-prospect analysis for retail-bank borrower accounts.
//!
//! The pipeline runs in stages, each stage a plain function over immutable
//! inputs:
//!
//! 1. [`ingest`] — parse account/transaction tables, apply window, status,
//!    transaction-type and system-transaction filters, normalize nulls.
//! 2. [`features`] — aggregate per-account statistics, normalize by turnover,
//!    discretize into categorical bins and assign the five-level class label.
//! 3. [`tree`] — induce a decision tree over the discretized attributes with
//!    gain-ratio attribute selection.
//! 4. [`prune`] — pessimistic post-pruning with subtree replacement.
//! 5. [`rules`] — extract one IF-THEN rule per root-to-leaf path.
//! 6. [`eval`] — stratified cross-validation, confusion matrices and the
//!    prospective-sector ranking.
//!
//! [`synth`] generates deterministic synthetic account/transaction data and
//! [`config`] holds the key=value pipeline configuration.

pub mod config;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod prune;
pub mod rules;
pub mod synth;
pub mod table;
pub mod tree;

pub use features::ClassLabel;
