//! Outage-probability analysis of cell-free fluid antenna multiple access
//! (FAMA) networks with maximum ratio transmission at the base stations.
//!
//! Two independent routes are provided for every quantity: a correlated
//! Rayleigh Monte Carlo simulator ([`montecarlo`]) and numerical evaluation
//! of the integral-form outage expressions ([`analytic`]).

// NaN inputs must fail range checks, so guards are written as negations.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod checks;
pub mod error;
pub mod montecarlo;
pub mod netmodel;
pub mod quad;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
