//! Energy-optimal configuration of a UAV → mobile BS → cloud semantic
//! communication pipeline: UAV placement, semantic compression ratio,
//! transmit powers and the inference offload decision, plus the baseline
//! schemes and sweep tooling used to compare against them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod compression_opt;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod placement;
pub mod power_search;
pub mod system_model;
pub mod verify;

pub use error::{Error, Result};
