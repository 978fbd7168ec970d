//! Simulation and analysis toolkit for quantum-logic-enhanced (QLE) sensing
//! with ensembles of NV-center electron/¹⁵N nuclear two-qubit sensors.
//!
//! The crate is split along the physics/estimation boundary:
//!
//! - [`model`]: physical constants, sensor parameters and the 4-level
//!   density-matrix model with the gate, optical and readout operations.
//! - [`sequences`]: pulse-sequence builders, toggling functions and exact
//!   accumulated-phase integration for AC signals.
//! - [`noise`]: phenomenological nuclear T₁ and electron T₂ models.
//! - [`analysis`]: weighted SNR estimators, the QLE sensitivity factor,
//!   calibration, sensitivity, periodograms and least-squares fitting.
//! - [`rng`]: counter-based seeded random streams.

// Guards like `!(x > 0.0)` reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod model;
pub mod noise;
pub mod rng;
pub mod sequences;

pub use model::{
    ModelError, NuclearRelaxation, PhysicalConstants, QuantumState, SensorEnsembleParams,
};
