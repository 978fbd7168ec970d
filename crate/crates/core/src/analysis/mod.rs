//! Estimator mathematics and data analysis.

mod calibration;
mod eta;
pub mod fit;
mod snr;
mod spectrum;

pub use calibration::{ac_sensitivity, calibrate_field, Calibration, MIN_CALIBRATION_POINTS};
pub use eta::{
    eta_map, eta_qle, exponential_snr_curve, matched_reference_count, EnhancementMap,
    MatchedReference, TimingBudget,
};
pub use fit::{
    fit_power_function, fit_power_law, fit_sinusoid, fit_stretched_exponential, FitError,
    FitResult,
};
pub use snr::{optimal_snr, snr_enhancement, weighted_snr, ReadoutSeries};
pub use spectrum::{periodogram, Spectrum};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate operating point: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Fit(#[from] FitError),
}
