//! Joint information and energy transmit beamforming for multiuser MISO
//! downlinks with simultaneous wireless information and power transfer.
//!
//! Two independent solution paths are provided: fixed-point algorithms built
//! on uplink-downlink duality ([`duality`]) and a semidefinite-relaxation
//! oracle solved with a small dense interior-point method ([`sdr`]). The
//! [`experiments`] module runs seeded Monte-Carlo sweeps over SINR targets.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod duality;
pub mod error;
pub mod experiments;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod model;
pub mod par;
pub mod sdr;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use model::{BeamSolution, EnergyProfile, ReceiverType, Region, Scenario, SolveReport};
