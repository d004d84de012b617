//! Crossbar resistive-memory channel simulation and detection.
//!
//! The crate models an `N x N` ReRAM crossbar whose cell selectors may fail.
//! An active selector failure (a failed selector on a cell storing a logical 1)
//! opens length-3 sneak paths that pull the readout of some high-resistance
//! cells down from `R0` to `R0' = (1/R0 + 1/Rs)^-1`.
//!
//! * [`channel`] generates data arrays, failure patterns, sneak-path
//!   indicators and noisy readouts.
//! * [`structure`] is the combinatorial ground truth (supports, critical
//!   cells, line types) together with the closed-form line-type probabilities.
//! * [`detector`] is the joint data / sneak-path detector: line-type
//!   estimation, failure localisation, failure row/column recovery and the
//!   double-threshold decision for everything else.
//! * [`baseline`] is the single-threshold comparison detector.
//! * [`bounds`] holds the Q-function, decision thresholds and BER bounds.
//! * [`harness`] runs seeded Monte Carlo sweeps and writes CSV results.

pub mod baseline;
pub mod bounds;
pub mod channel;
pub mod detector;
mod error;
pub mod harness;
pub mod matrix;
pub mod structure;

pub use error::{Error, Result};
pub use matrix::{Cell, SquareMatrix};
