//! Simulation and verification of microwave linear analog computers.
//!
//! A reconfigurable multiport admittance network driven by voltage sources
//! on some ports and matched loads on the rest settles into port voltages
//! that solve a linear system. By choosing the tunable admittances, those
//! voltages become LMMSE estimates, error covariances, matrix inverse
//! columns, or Kalman filter updates. This crate models that network,
//! implements the analog algorithms against digital oracles, checks the
//! lossless (purely reactive) realization, and evaluates the operation-count
//! comparisons between analog and digital evaluation.

pub mod cli;
pub mod costmodel;
pub mod error;
pub mod estimation;
pub mod kalman;
pub mod lossless;
pub mod network;
pub mod numerics;
pub mod primitives;
pub mod synth;

pub use error::{MilacError, Result, SingularSite};
pub use numerics::{ComplexMatrix, ComplexVector, CostMeter, RealMatrix, C64};
