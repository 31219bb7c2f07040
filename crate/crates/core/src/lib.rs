//! Low-complexity RF chain and beam selection for MIMO systems that carry
//! communication and sensing on the same downlink waveform.
//!
//! The library models a base station whose transmit antennas (or DFT beams)
//! must be wired to a limited number of RF chains, a communication receiver,
//! and a set of widely separated sensing receivers. It provides:
//!
//! * random channel and target-response generation ([`scene`]),
//! * mutual-information metrics for both functions and a circuit power model
//!   ([`metrics`]),
//! * greedy eigenvalue-decomposition-based and coordinate-style selection,
//!   with exhaustive, random, and fixed baselines ([`select`]),
//! * DFT-codebook beamspace reduction and diagonal beam scoring
//!   ([`beamspace`]),
//! * the dense complex-matrix kernels they share ([`linalg`]).
//!
//! Selection decisions cost a rank-one or row-removal inverse update per step
//! instead of a fresh determinant per candidate, which is what makes the
//! greedy methods cheap at realistic array sizes.

pub mod beamspace;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod scene;
pub mod select;

pub use error::{Error, Result};
