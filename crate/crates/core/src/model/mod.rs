//! Two-qubit (electron ⊗ ¹⁵N nuclear) sensor model.

mod constants;
mod params;
mod state;

pub use constants::PhysicalConstants;
pub use params::SensorEnsembleParams;
pub use state::{NuclearRelaxation, NuclearSpin, QuantumState, Readout, BASIS_LABELS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Configuration(String),
}
