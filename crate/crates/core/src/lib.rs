//! Mining of code-review rounds, construction of abstracted method-level
//! datasets of review-induced changes, and evaluation of models that learn to
//! implement those changes.

pub mod abstraction;
pub mod comments;
pub mod dataset;
pub mod decoder;
pub mod extract;
pub mod java;
pub mod metrics;
pub mod miner;
