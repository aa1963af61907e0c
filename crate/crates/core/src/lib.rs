//! ACO-seeded radial basis function networks and an adaptive RBFN tracking
//! controller for a three-link SCARA arm.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, configuration and the command line
//! live in the `acorbfn` companion crate.
//!
//! Modules, bottom-up:
//!
//! * [`dynamics`]: SCARA rigid-body model, friction, disturbance, FK and a
//!   closed-form IK oracle.
//! * [`rbfn`]: Gaussian RBF network, spread-based widths, LMS weight
//!   training with hidden-node growth.
//! * [`aco`]: ant colony center selection, the k-means baseline and the
//!   clustering comparison harness.
//! * [`controller`]: computed-torque + boundary-layer sliding term with an
//!   online-adapted RBFN compensator.
//! * [`sim`]: RK4 closed-loop simulation, metrics and the IK approximation
//!   experiment.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod aco;
pub mod controller;
pub mod dynamics;
mod error;
pub mod rbfn;
pub mod rng;
pub mod sim;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
