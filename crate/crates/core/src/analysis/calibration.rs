use serde::{Deserialize, Serialize};

use super::fit::{fit_sinusoid, FitResult};
use super::AnalysisError;

pub const MIN_CALIBRATION_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// B_AC(2π)/V_2π (T/V).
    pub tesla_per_volt: f64,
    /// Voltage producing 2π of phase (V).
    pub v_two_pi: f64,
    /// Sinusoid fit [C, V_2π, φ₀, offset].
    pub fit: FitResult,
}

/// Fits contrast = C·sin(2πv/V_2π + φ₀) + offset and scales `b_two_pi` (T) by 1/V_2π.
pub fn calibrate_field(
    voltages: &[f64],
    contrasts: &[f64],
    b_two_pi: f64,
) -> Result<Calibration, AnalysisError> {
    if voltages.len() < MIN_CALIBRATION_POINTS {
        return Err(AnalysisError::Domain(format!(
            "calibration needs at least {MIN_CALIBRATION_POINTS} points, got {}",
            voltages.len()
        )));
    }
    if !(b_two_pi > 0.0) {
        return Err(AnalysisError::Domain(format!(
            "B_AC(2pi) must be positive, got {b_two_pi}"
        )));
    }
    let fit = fit_sinusoid(voltages, contrasts)?;
    let v_two_pi = fit.params[1];
    let (lo, hi) = voltages
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if hi - lo < v_two_pi {
        return Err(AnalysisError::Domain(format!(
            "voltage span {} is shorter than the fitted period {v_two_pi}",
            hi - lo
        )));
    }
    Ok(Calibration {
        tesla_per_volt: b_two_pi / v_two_pi,
        v_two_pi,
        fit,
    })
}

/// η = σ¹ˢ/|dS/dB| (T/√Hz).
pub fn ac_sensitivity(sigma_1s: f64, slope: f64) -> Result<f64, AnalysisError> {
    if slope == 0.0 || !slope.is_finite() {
        return Err(AnalysisError::Degenerate(format!(
            "signal slope must be finite and nonzero, got {slope}"
        )));
    }
    if !(sigma_1s >= 0.0) {
        return Err(AnalysisError::Domain(format!(
            "1 s contrast uncertainty must be non-negative, got {sigma_1s}"
        )));
    }
    Ok(sigma_1s / slope.abs())
}
