//! Simulation of a multi-antenna secondary link sharing spectrum with a
//! carrier-sensing primary link.
//!
//! The secondary transmitter switches between maximum-ratio transmission and
//! zero-forcing beamforming depending on how busy it observes the primary
//! network to be. Modules build up from complex linear algebra through
//! channels, sensing and precoding to a slot-level simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod cli;
pub mod error;
pub mod mac_traffic;
pub mod numerics;
pub mod sensing;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
