//! Scenario implementations. Each returns its output tables; the runner writes them.
//!
//! Stochastic draws come from per-point RNG streams labelled by scenario and
//! table, so results do not depend on evaluation order or worker count.

mod common;
mod correlation;
mod density;
mod eta_map;
mod odmr;
mod qle_snr;
mod sensitivity;
mod t1_sweeps;

pub use common::{linspace, logspace, ReadoutTransfer};

use qle_core::analysis::{AnalysisError, FitError};
use qle_core::model::ModelError;
use qle_core::noise::NoiseError;
use qle_core::sequences::SequenceError;
use thiserror::Error;

use crate::config::{ExperimentConfig, ScenarioSettings};
use crate::output::Table;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("fit failed: {0}")]
    Fit(#[from] FitError),
    #[error("{0}")]
    Other(String),
}

pub fn run(config: &ExperimentConfig) -> Result<Vec<Table>, ScenarioError> {
    match &config.settings {
        ScenarioSettings::OdmrSwap(s) => odmr::run(config, s),
        ScenarioSettings::NuclearT1FieldSweep(s) => t1_sweeps::run_field(config, s),
        ScenarioSettings::NuclearT1LaserSweep(s) => t1_sweeps::run_laser(config, s),
        ScenarioSettings::QleSnrVsN(s) => qle_snr::run(config, s),
        ScenarioSettings::CorrelationThreetone(s) => correlation::run(config, s),
        ScenarioSettings::SensitivityVsDuration(s) => sensitivity::run(config, s),
        ScenarioSettings::EtaMap(s) => eta_map::run(config, s),
        ScenarioSettings::DensityProjection(s) => density::run(config, s),
    }
}

/// Two-column `quantity,value` table for scalar results.
pub(crate) fn summary_table(name: &str, entries: &[(&str, f64)]) -> Table {
    let mut t = Table::new(name, &["quantity", "value"]);
    for (k, v) in entries {
        t.push(vec![(*k).into(), (*v).into()]);
    }
    t
}
