//! Simulation, scenario files and batch runs for the air-data estimator.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod metrics;
pub mod output;
pub mod pipeline;
pub mod sim;
pub mod suite;
