//! Numerics for a damped harmonic oscillator probed by a three-path
//! interferometer: thermal-bath kernels and rates ([`bath`]), density-matrix
//! evolution ([`dynamics`]), closed-form interference states and fringe
//! profiles ([`interferometer`]), a Clausius-functional thermodynamic audit
//! ([`thermo`]), and coherence/ergotropy resource accounting ([`coherence`]).
//!
//! Everything is deterministic: random sampling (test oracles, postulate
//! audits) always goes through caller-seeded generators, and no global state
//! is consulted anywhere.

pub mod bath;
pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod interferometer;
pub mod quad;
pub mod thermo;

pub use error::{Error, Result};
