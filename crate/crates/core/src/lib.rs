//! Arrival times of two identical particles released as Gaussian packets.
//!
//! The crate evaluates one-body densities and probability currents for
//! Maxwell-Boltzmann, Bose-Einstein and Fermi-Dirac two-particle states,
//! freely evolving or falling in a uniform field, and turns the current at a
//! detector into an arrival-time distribution and its mean.

pub mod arrival;
pub mod error;
pub mod model;
pub mod one_body;
pub mod oracle;
pub mod quadrature;
pub mod spin_current;
pub mod wavepacket;

pub use error::{Error, Result};
pub use model::{
    characteristic_mass, reference_time, GaussianPacketSpec, PhysicalConstants, Scenario,
    StatisticsKind, TwoBodyConfig, HBAR, NEUTRON_MASS, STANDARD_G,
};
pub use quadrature::{CutoffRule, QuadraturePolicy};
