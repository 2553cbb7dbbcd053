//! Diffuse-interface solver for compressible N-phase flow with a single
//! velocity and pressure, per-phase temperatures, viscosity, heat conduction
//! and external energy sources.
//!
//! Each time step is split into a hydrodynamic stage followed by viscous,
//! temperature-relaxation and heat-conduction stages.

pub mod cases;
pub mod closures;
pub mod config;
pub mod convergence;
pub mod driver;
pub mod eos;
pub mod error;
pub mod grid;
pub mod hyperbolic;
pub mod output;
pub mod parabolic;
pub mod riemann;
pub mod roots;
pub mod state;
pub mod thermal;
pub mod viscous;

pub use error::{Error, Result};
