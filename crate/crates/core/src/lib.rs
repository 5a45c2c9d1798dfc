//! Constrained moving-horizon estimation for air-data sensor fault detection,
//! isolation and estimation.
//!
//! The crate is `no_std` and only needs `alloc` for the horizon buffers.
#![no_std]
// `!(x < y)` comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod airmodel;
pub mod fdi;
pub mod mhe;
pub mod smallmat;
pub mod units;
