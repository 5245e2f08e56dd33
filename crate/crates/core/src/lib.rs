//! Simulator and verification harness for the regularized p-elastic
//! L² gradient flow of closed curves in R^n.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod curve;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod field;
pub mod flow;
pub mod generate;
pub mod geometry;
pub mod gradient;
pub mod output;
pub mod reparam;
pub mod spectral;
pub mod variation;
