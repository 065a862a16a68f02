//! Numerical twin of a continuous-variable optical quantum reservoir computer.
//!
//! The crate is organised along the physical pipeline:
//! [`optics`] turns pump and crystal parameters into squeezed supermodes and
//! covariance matrices, [`reservoir`] runs the feedback dynamics that map
//! inputs to measured observables, [`learn`] generates benchmark tasks and
//! trains linear readouts, and [`experiments`] wires the three together into
//! the benchmark runs used by the command-line harness.

pub mod error;
pub mod experiments;
pub mod learn;
pub mod optics;
pub mod reservoir;
pub mod rng;

pub use error::{Error, Result};
