//! Frequency-domain data-driven analysis, simulation and control of
//! discrete-time LTI systems.
//!
//! The crate characterizes an unknown plant directly from sampled
//! frequency-domain data (FRF-style measurements on the grid
//! `w_k = pi*k/M`), without fitting a parametric model:
//!
//! - [`excitation`] tests persistence of excitation in time and frequency
//!   domain, including the collective (multi-experiment) variant,
//! - [`behavior`] checks trajectory membership, simulates the plant and
//!   evaluates its transfer function from data alone,
//! - [`control`] provides a data-driven LQR and the FreePC / DeePC
//!   receding-horizon controllers backed by in-house dense QP and SDP
//!   solvers,
//! - [`plantlab`] is a synthetic lab: ground-truth simulation, closed-loop
//!   data collection, multisine excitation, per-period DFT and FRF
//!   estimation,
//! - [`data`] holds the shared domain types (trajectories, spectra, block
//!   data matrices) and [`linalg`] the dense decompositions everything
//!   else consumes.

pub mod behavior;
pub mod control;
pub mod data;
pub mod error;
pub mod excitation;
pub mod io;
pub mod linalg;
pub mod plantlab;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, RealMatrix};
