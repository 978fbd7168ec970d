use serde::{Deserialize, Serialize};

/// CODATA 2018 Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// CODATA 2018 reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Measured electron g-factor of the NV⁻ ground state.
pub const NV_G_FACTOR: f64 = 2.0028;

/// Constants entering the electron phase accumulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Landé g-factor (dimensionless).
    pub g: f64,
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    /// Free-electron value g = 2 with CODATA μ_B and ħ.
    fn default() -> Self {
        Self {
            g: 2.0,
            mu_b: BOHR_MAGNETON,
            hbar: HBAR,
        }
    }
}

impl PhysicalConstants {
    /// Same constants with the NV⁻ g-factor (2.0028).
    pub fn nv() -> Self {
        Self {
            g: NV_G_FACTOR,
            ..Self::default()
        }
    }

    /// Electron gyromagnetic ratio g·μ_B/ħ in rad·s⁻¹·T⁻¹.
    pub fn gamma_e(&self) -> f64 {
        self.g * self.mu_b / self.hbar
    }
}
