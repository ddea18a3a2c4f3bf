//! One-bit over-the-air gradient aggregation for federated edge learning.
//!
//! Devices quantize local stochastic gradients to signs, transmit them
//! simultaneously over a broadband multiple-access channel with truncated
//! channel inversion, and the server decodes the majority vote from the
//! superposed signal. The [`analysis`] module evaluates the matching bit-error
//! and convergence bounds; [`harness`] runs experiments and checks them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod analysis;
pub mod channel;
pub mod error;
pub mod harness;
pub mod learn;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
