//! Exact and Monte Carlo analysis of binary sequences grown by random
//! substitutions of constant length.
//!
//! Starting from the single symbol `1`, every iteration replaces each `0` by
//! `k` zeros and each `1` by `k` symbols that are independently `1` with
//! probability `p`. After `i` iterations the sequence has `k^i` symbols. This
//! crate computes the exact distribution of the number of ones, its moments,
//! the ensemble mean entropy and the entropy–variance curves, locates the
//! extremal values of `p`, and simulates the process directly.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use randsub_core::{dist, moments, RuleParams};
//!
//! let params = RuleParams::new(2, 0.5).unwrap();
//! let d = dist::distribution(1, params).unwrap();
//! assert_eq!(d.probs(), &[0.25, 0.5, 0.25]);
//! assert_eq!(moments::mean(3, params), 1.0);
//! ```

#![cfg_attr(not(test), no_std)]
// `!(x >= 0.0)` and friends also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dist;
pub mod entropy;
mod error;
pub mod extrema;
pub mod moments;
pub mod numeric;
pub mod optimize;
mod params;
pub mod simulate;

pub use dist::CountDistribution;
pub use error::{Error, Result};
pub use params::{RuleParams, SupportCap};
