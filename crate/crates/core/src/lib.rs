//! Simulation and optimization toolkit for UAV-enabled wireless-powered
//! underground communication networks.
//!
//! A terrestrial hybrid access point (HAP) charges a rotary-wing UAV, the UAV
//! flies to a field of buried sensors, the sensors are powered over the air
//! (by the HAP, the UAV, or both), upload their data to the hovering UAV in
//! TDMA slots, and the UAV returns to offload everything at the HAP.
//!
//! The crate covers the physics of that mission (soil dielectrics, the
//! air/soil path-loss composition, Rician ULA channels, CSI-free and full-CSI
//! energy precoders, rotary-wing propulsion power) and the energy-minimal time
//! allocation across the four mission phases.
//!
//! Module map:
//!
//! - [`scenario`]: configuration, constants, sensor placement and geometry
//! - [`soil`]: complex soil permittivity
//! - [`propagation`]: air, refraction and soil losses
//! - [`channel`]: steering vectors and Rician channel draws
//! - [`wet`]: precoders, transmit-power budget, incident and harvested power
//! - [`maxmin`]: full-CSI max-min fair beamforming
//! - [`uav_energy`]: propulsion power and mission energy
//! - [`link`]: UAV charging power, uplink throughput and offload time
//! - [`allocation`]: link coefficients and the time-allocation solver
//! - [`harness`]: Monte Carlo sweeps, the allocation table, validation checks

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod channel;
pub mod error;
pub mod harness;
pub mod link;
pub mod maxmin;
pub mod numeric;
pub mod propagation;
pub mod scenario;
pub mod seed;
pub mod soil;
pub mod uav_energy;
pub mod units;
mod validation;
pub mod wet;

pub use error::{Error, Result};
pub use scenario::Scenario;
