//! Simulation and verification lab for the kinetic SDE
//! `dV_t = dL_t - t^{-beta} F(V_t) dt`, `dX_t = V_t dt`,
//! driven by an alpha-stable or general Levy process.
//!
//! The crate is organized around five subsystems:
//! - [`levy_noise`]: stable increments, Levy paths from a generating
//!   triplet, and the rescaling/limit algebra of triplets;
//! - [`sde_kernel`]: the jump-adapted Euler solver with explosion
//!   detection and the exact linear-case oracle;
//! - [`scaling`]: path rescaling, time changes, the autonomous
//!   critical-line equation and its invariant measure;
//! - [`moment_lab`]: theoretical moment-growth exponents and empirical
//!   exponent recovery;
//! - [`convergence_lab`]: path metrics and convergence-rate experiments.

pub mod convergence_lab;
pub mod error;
pub mod levy_noise;
pub mod moment_lab;
pub mod path;
pub mod quad;
pub mod rng;
pub mod scaling;
pub mod sde_kernel;
pub mod stats;

pub use error::{Result, SkeError};
