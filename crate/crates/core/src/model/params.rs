use serde::{Deserialize, Serialize};

use super::ModelError;

/// Physical, sample and timing parameters of the NV ensemble sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorEnsembleParams {
    /// Bias field along the NV axis (G).
    pub bias_field: f64,
    /// Optical power (mW).
    pub laser_power: f64,
    /// Maximum fluorescence contrast between ↓e and ↑e.
    pub contrast_c0: f64,
    /// Expected detected photons per optical readout.
    pub photons_per_readout: f64,
    /// End-to-end SWAP population-transfer fidelity.
    pub swap_fidelity: f64,
    /// Fraction of ↑e electrons reset to ↓e by one optical pulse of length `t_op`.
    pub repolarization_fraction: f64,
    /// Optical pulse length (s).
    pub t_op: f64,
    /// SWAP block duration (s).
    pub t_swap: f64,
    /// Quantum-logic readout cycle duration (s).
    pub t_qlr: f64,
    /// Ramsey dephasing time (s).
    pub t2_star: f64,
    /// Hahn-echo coherence time (s).
    pub t2_hahn: f64,
    /// XY8 coherence time saturation value (s).
    pub t2_xy8_sat: f64,
    pub nv_density_ppm: f64,
    pub n_density_ppm: f64,
}

impl Default for SensorEnsembleParams {
    fn default() -> Self {
        Self {
            bias_field: 3700.0,
            laser_power: 130.0,
            contrast_c0: 0.02,
            photons_per_readout: 1.0e6,
            swap_fidelity: 0.93,
            repolarization_fraction: 0.75,
            t_op: 3.0e-6,
            t_swap: 16.5e-6,
            t_qlr: 3.0e-6,
            t2_star: 600.0e-9,
            t2_hahn: 14.5e-6,
            t2_xy8_sat: 28.0e-6,
            nv_density_ppm: 2.3,
            n_density_ppm: 14.0,
        }
    }
}

impl SensorEnsembleParams {
    /// Checks every field invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        let durations = [
            ("t_op", self.t_op),
            ("t_swap", self.t_swap),
            ("t_qlr", self.t_qlr),
            ("t2_star", self.t2_star),
            ("t2_hahn", self.t2_hahn),
            ("t2_xy8_sat", self.t2_xy8_sat),
        ];
        for (name, value) in durations {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::Configuration(format!(
                    "{name} must be a positive duration, got {value}"
                )));
            }
        }
        let fractions = [
            ("contrast_c0", self.contrast_c0),
            ("swap_fidelity", self.swap_fidelity),
            ("repolarization_fraction", self.repolarization_fraction),
        ];
        for (name, value) in fractions {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::Configuration(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        let positives = [
            ("bias_field", self.bias_field),
            ("laser_power", self.laser_power),
            ("nv_density_ppm", self.nv_density_ppm),
            ("n_density_ppm", self.n_density_ppm),
        ];
        for (name, value) in positives {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::Configuration(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(self.photons_per_readout > 0.0) {
            return Err(ModelError::Configuration(format!(
                "photons_per_readout must be positive, got {}",
                self.photons_per_readout
            )));
        }
        if self.t_qlr < self.t_op {
            return Err(ModelError::Configuration(format!(
                "t_qlr ({} s) must be at least t_op ({} s)",
                self.t_qlr, self.t_op
            )));
        }
        Ok(())
    }

    /// Per-gate fidelity when the SWAP fidelity is split evenly over its two CNOTs.
    pub fn per_gate_fidelity(&self) -> f64 {
        self.swap_fidelity.sqrt()
    }

    /// Single-readout shot-noise standard deviation in contrast units.
    pub fn readout_sigma(&self) -> f64 {
        (1.0 / self.photons_per_readout).sqrt()
    }
}
