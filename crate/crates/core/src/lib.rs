//! Physics models for trapped-ion quantum information experiments.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numerical model:
//! ion-chain equilibria and axial normal modes, few-level Lindblad steady
//! states with the EIT Fano profile, sideband Rabi dynamics, cooling rate
//! equations, photon-counting state detection and addressing-beam crosstalk.
//! File formats, configuration and the command-line runner live in the
//! companion `iontrap-sim` crate.
//!
//! Units are SI throughout, except that every rate or angular frequency
//! whose name does not end in `_hz` is in rad/s.

#![no_std]

extern crate alloc;

pub mod apparatus;
pub mod chain;
pub mod cooling;
pub mod dynamics;
mod error;
pub mod fock;
pub mod liouville;
pub mod species;

pub use error::{Error, Result};
pub use fock::FockDistribution;
pub use species::{MotionalMode, RandomSeed, SpeciesConstants};

/// 2π, for converting between Hz and rad/s.
pub const TAU: f64 = core::f64::consts::TAU;
