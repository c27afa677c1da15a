//! Game-theoretic merging decisions with learned, environment-adaptive
//! reward weights.
//!
//! A two-vehicle merging conflict is modeled per timestep as a 2x2
//! non-cooperative game whose payoffs are weighted sums of kinematic
//! features ([`scenario`], [`game`]). Reward weights are recovered from
//! demonstrated behavior by expected-feature matching ([`irl`]), mapped to
//! environment observations by a discrete-latent Gaussian model
//! ([`mapping`]), and evaluated for human-likeness and safety in
//! closed-loop replay ([`eval`]). Trajectory ingestion and behavior
//! calibration live in [`data`] and [`calib`]; [`synth`] generates
//! deterministic demo scenarios.

pub mod calib;
pub mod data;
pub mod error;
pub mod eval;
pub mod game;
pub mod irl;
pub mod mapping;
pub mod scenario;
pub mod synth;

pub use error::{Error, Result};
