//! Simulation and verification of the Wigner's-friend extension of the GHZ
//! argument: three sealed laboratories sharing a GHZ-entangled electron
//! triple, each friend measuring z-spin and each outside observer measuring
//! the laboratory in a superposition basis, described in several inertial
//! frames.

pub mod cli;
pub mod error;
pub mod measurement;
pub mod models;
pub mod qmath;
pub mod scenario;
pub mod spacetime;
pub mod systems;

pub use error::{Error, Result};
