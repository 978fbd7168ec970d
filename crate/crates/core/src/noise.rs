//! Phenomenological decoherence models.
//!
//! Nuclear T₁ under illumination is modeled as a power law in the bias field
//! (anchored at a reference field) and as `a·P^(-b) + c` in laser power.
//! Electron T₂ depends on the decoupling family and the number of π pulses:
//! XY8 follows a power law in the pulse count that saturates at the NV–NV
//! interaction limit, while DROID-60 keeps growing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequences::SequenceFamily;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("domain error: {0}")]
    Domain(String),
}

fn domain<T>(msg: String) -> Result<T, NoiseError> {
    Err(NoiseError::Domain(msg))
}

/// exp(−(t/t1)^β).
pub fn stretched_exp(t: f64, t1: f64, beta: f64) -> Result<f64, NoiseError> {
    if !(t >= 0.0) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    if !(t1 > 0.0) {
        return domain(format!("decay constant must be positive, got {t1}"));
    }
    if !(beta > 0.0 && beta <= 2.0) {
        return domain(format!("stretch exponent must lie in (0, 2], got {beta}"));
    }
    Ok((-(t / t1).powf(beta)).exp())
}

/// Nuclear spin lifetime under illumination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearT1Model {
    /// Field at which `reference_t1` applies (G).
    pub reference_field: f64,
    /// T₁ at `reference_field` (s).
    pub reference_t1: f64,
    /// Power-law exponent p in T₁ ∝ B^p.
    pub field_exponent: f64,
    /// Laser-power model coefficient a (µs·mW^b).
    pub laser_a: f64,
    /// Laser-power model exponent b.
    pub laser_b: f64,
    /// Laser-power model floor c (µs).
    pub laser_c: f64,
    /// Stretch exponent β of the decay under illumination.
    pub stretch_beta: f64,
}

impl Default for NuclearT1Model {
    fn default() -> Self {
        Self {
            reference_field: 3700.0,
            reference_t1: 3.44e-3,
            field_exponent: 2.0,
            laser_a: 4.003e4,
            laser_b: 0.5154,
            laser_c: 111.0,
            stretch_beta: 1.0,
        }
    }
}

impl NuclearT1Model {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.reference_field > 0.0 && self.reference_t1 > 0.0) {
            return domain("reference field and T1 must be positive".into());
        }
        if !(self.field_exponent > 0.0) {
            return domain(format!(
                "field exponent must be positive, got {}",
                self.field_exponent
            ));
        }
        if !(self.laser_a > 0.0 && self.laser_c >= 0.0 && self.laser_b > 0.0) {
            return domain("laser model requires a > 0, b > 0, c >= 0".into());
        }
        if !(self.stretch_beta > 0.0 && self.stretch_beta <= 2.0) {
            return domain(format!(
                "stretch exponent must lie in (0, 2], got {}",
                self.stretch_beta
            ));
        }
        Ok(())
    }

    /// Prefactor k of T₁ = k·B^p (s·G^(−p)).
    pub fn field_prefactor(&self) -> f64 {
        self.reference_t1 / self.reference_field.powf(self.field_exponent)
    }

    /// T₁ at bias field `b` (G), in seconds.
    pub fn t1_vs_field(&self, b: f64) -> Result<f64, NoiseError> {
        if !(b > 0.0) {
            return domain(format!("bias field must be positive, got {b}"));
        }
        Ok(self.field_prefactor() * b.powf(self.field_exponent))
    }

    /// T₁ at laser power `power` (mW), in seconds.
    pub fn t1_vs_laser(&self, power: f64) -> Result<f64, NoiseError> {
        if !(power > 0.0) {
            return domain(format!("laser power must be positive, got {power}"));
        }
        let micros = self.laser_a * power.powf(-self.laser_b) + self.laser_c;
        Ok(micros * 1e-6)
    }
}

/// Electron coherence under dynamical decoupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectronCoherenceModel {
    /// Hahn-echo T₂ (s).
    pub t2_hahn: f64,
    /// XY8 saturation value (s).
    pub t2_xy8_sat: f64,
    /// s in T₂ = t2_hahn·n^s before saturation.
    pub t2_scaling_exponent: f64,
    /// DROID-60 pulse-number scaling exponent (no saturation).
    pub droid_scaling_exponent: f64,
    /// Stretch exponent of the electron coherence decay.
    pub stretch_beta: f64,
    /// Total nitrogen density the T₂ values refer to (ppm).
    pub n_density_ppm: f64,
    /// Population decay constant between correlation blocks (s); `None` = no decay.
    pub t_corr_t1: Option<f64>,
}

impl Default for ElectronCoherenceModel {
    fn default() -> Self {
        Self {
            t2_hahn: 14.5e-6,
            t2_xy8_sat: 28.0e-6,
            t2_scaling_exponent: 2.0 / 3.0,
            droid_scaling_exponent: 0.34,
            stretch_beta: 0.6,
            n_density_ppm: 14.0,
            t_corr_t1: None,
        }
    }
}

impl ElectronCoherenceModel {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.t2_hahn > 0.0 && self.t2_xy8_sat > 0.0) {
            return domain("coherence times must be positive".into());
        }
        if !(self.t2_scaling_exponent >= 0.0 && self.droid_scaling_exponent >= 0.0) {
            return domain("scaling exponents must be non-negative".into());
        }
        if !(self.stretch_beta > 0.0 && self.stretch_beta <= 2.0) {
            return domain(format!(
                "stretch exponent must lie in (0, 2], got {}",
                self.stretch_beta
            ));
        }
        if !(self.n_density_ppm > 0.0) {
            return domain("nitrogen density must be positive".into());
        }
        if let Some(t) = self.t_corr_t1 {
            if !(t > 0.0) {
                return domain(format!("t_corr_t1 must be positive, got {t}"));
            }
        }
        Ok(())
    }

    /// T₂ for a decoupling family with `n_pulses` π pulses.
    pub fn t2(&self, family: SequenceFamily, n_pulses: usize) -> Result<f64, NoiseError> {
        if n_pulses == 0 {
            return domain("at least one pi pulse is required".into());
        }
        let n = n_pulses as f64;
        match family {
            SequenceFamily::Hahn => Ok(self.t2_hahn),
            SequenceFamily::Xy8 => {
                Ok((self.t2_hahn * n.powf(self.t2_scaling_exponent)).min(self.t2_xy8_sat))
            }
            SequenceFamily::Droid60 => Ok(self.t2_hahn * n.powf(self.droid_scaling_exponent)),
            other => domain(format!("no coherence model for sequence family {other:?}")),
        }
    }

    /// exp(−(T_sense/T₂)^β) for the given family and pulse count.
    pub fn decoherence_factor(
        &self,
        family: SequenceFamily,
        n_pulses: usize,
        t_sense: f64,
    ) -> Result<f64, NoiseError> {
        let t2 = self.t2(family, n_pulses)?;
        stretched_exp(t_sense, t2, self.stretch_beta)
    }

    /// Population survival over a correlation delay.
    pub fn correlation_survival(&self, t_corr: f64) -> Result<f64, NoiseError> {
        match self.t_corr_t1 {
            None => {
                if t_corr >= 0.0 {
                    Ok(1.0)
                } else {
                    domain(format!("t_corr must be non-negative, got {t_corr}"))
                }
            }
            Some(t1) => stretched_exp(t_corr, t1, 1.0),
        }
    }
}

/// Free function form of [`NuclearT1Model::t1_vs_field`].
pub fn nuclear_t1_vs_field(model: &NuclearT1Model, b: f64) -> Result<f64, NoiseError> {
    model.t1_vs_field(b)
}

/// Free function form of [`NuclearT1Model::t1_vs_laser`].
pub fn nuclear_t1_vs_laser(model: &NuclearT1Model, power: f64) -> Result<f64, NoiseError> {
    model.t1_vs_laser(power)
}

/// Free function form of [`ElectronCoherenceModel::t2`].
pub fn electron_t2(
    model: &ElectronCoherenceModel,
    family: SequenceFamily,
    n_pulses: usize,
) -> Result<f64, NoiseError> {
    model.t2(family, n_pulses)
}

/// T₂ ∝ 1/[N]: scales a reference T₂ to a new nitrogen density.
pub fn project_t2_for_density(t2_ref: f64, n_ppm_ref: f64, n_ppm_new: f64) -> Result<f64, NoiseError> {
    if !(t2_ref > 0.0) {
        return domain(format!("reference T2 must be positive, got {t2_ref}"));
    }
    if !(n_ppm_ref > 0.0 && n_ppm_new > 0.0) {
        return domain(format!(
            "densities must be positive, got {n_ppm_ref} and {n_ppm_new}"
        ));
    }
    Ok(t2_ref * n_ppm_ref / n_ppm_new)
}
