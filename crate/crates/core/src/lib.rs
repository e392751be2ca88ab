//! Targeted syntactic evaluation of language models.
//!
//! Test suites group minimal-pair sentences into regions; a scorer assigns
//! per-token surprisals, which are summed per region and checked against
//! each suite's predictions.

pub mod alignment;
pub mod engine;
pub mod prediction;
pub mod remote;
pub mod scoring;
pub mod suite;
pub mod suite_data;
