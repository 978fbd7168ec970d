use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Per-cycle signal amplitudes Aₙ and noise σₙ of N quantum-logic readouts,
/// with the conventional single-readout reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutSeries {
    pub amplitudes: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub ref_amplitude: f64,
    pub ref_sigma: f64,
}

impl ReadoutSeries {
    pub fn new(
        amplitudes: Vec<f64>,
        sigmas: Vec<f64>,
        ref_amplitude: f64,
        ref_sigma: f64,
    ) -> Result<Self, AnalysisError> {
        let series = Self {
            amplitudes,
            sigmas,
            ref_amplitude,
            ref_sigma,
        };
        series.validate()?;
        Ok(series)
    }

    /// Aₙ = A_ref·exp(−n·t_qlr/T₁) for n = 1..=N with constant σ.
    pub fn exponential_decay(
        n: usize,
        ref_amplitude: f64,
        sigma: f64,
        t_qlr: f64,
        t1: f64,
    ) -> Result<Self, AnalysisError> {
        if !(t_qlr > 0.0 && t1 > 0.0) {
            return Err(AnalysisError::Domain(
                "t_qlr and t1 must be positive".into(),
            ));
        }
        let amplitudes = (1..=n)
            .map(|k| ref_amplitude * (-(k as f64) * t_qlr / t1).exp())
            .collect();
        Self::new(amplitudes, vec![sigma; n], ref_amplitude, sigma)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.amplitudes.is_empty() {
            return Err(AnalysisError::Domain("readout series is empty".into()));
        }
        if self.amplitudes.len() != self.sigmas.len() {
            return Err(AnalysisError::Domain(format!(
                "{} amplitudes but {} sigmas",
                self.amplitudes.len(),
                self.sigmas.len()
            )));
        }
        if let Some(i) = self.sigmas.iter().position(|&s| !(s > 0.0)) {
            return Err(AnalysisError::Domain(format!(
                "sigma of cycle {} must be positive, got {}",
                i + 1,
                self.sigmas[i]
            )));
        }
        if !(self.ref_sigma > 0.0) {
            return Err(AnalysisError::Domain(format!(
                "reference sigma must be positive, got {}",
                self.ref_sigma
            )));
        }
        Ok(())
    }

    fn check_n(&self, up_to_n: usize) -> Result<(), AnalysisError> {
        self.validate()?;
        if up_to_n == 0 || up_to_n > self.len() {
            return Err(AnalysisError::Domain(format!(
                "up_to_n must lie in 1..={}, got {up_to_n}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Inverse-variance-optimal weights Aₙ/σₙ².
    pub fn optimal_weights(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .zip(&self.sigmas)
            .map(|(a, s)| a / (s * s))
            .collect()
    }

    pub fn reference_snr(&self) -> f64 {
        self.ref_amplitude / self.ref_sigma
    }

    /// SNR(n) for every n = 1..=N via SNR(n)² = SNR(n−1)² + Aₙ²/σₙ².
    pub fn cumulative_optimal_snr(&self) -> Result<Vec<f64>, AnalysisError> {
        self.validate()?;
        let mut acc = 0.0;
        Ok(self
            .amplitudes
            .iter()
            .zip(&self.sigmas)
            .map(|(a, s)| {
                acc += (a / s).powi(2);
                acc.sqrt()
            })
            .collect())
    }
}

/// √(Σₙ Aₙ²/σₙ²) over the first `up_to_n` cycles.
pub fn optimal_snr(series: &ReadoutSeries, up_to_n: usize) -> Result<f64, AnalysisError> {
    series.check_n(up_to_n)?;
    Ok(series.amplitudes[..up_to_n]
        .iter()
        .zip(&series.sigmas)
        .map(|(a, s)| (a / s).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// (Σ wₙAₙ) / √(Σ wₙ²σₙ²) over the first `up_to_n` cycles.
pub fn weighted_snr(
    series: &ReadoutSeries,
    weights: &[f64],
    up_to_n: usize,
) -> Result<f64, AnalysisError> {
    series.check_n(up_to_n)?;
    if weights.len() < up_to_n {
        return Err(AnalysisError::Domain(format!(
            "{} weights supplied for {up_to_n} cycles",
            weights.len()
        )));
    }
    let w = &weights[..up_to_n];
    if w.iter().all(|&x| x == 0.0) {
        return Err(AnalysisError::Domain("all weights are zero".into()));
    }
    let num: f64 = w.iter().zip(&series.amplitudes).map(|(w, a)| w * a).sum();
    let den: f64 = w
        .iter()
        .zip(&series.sigmas)
        .map(|(w, s)| (w * s).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(num / den)
}

/// optimal_snr(N) / (A_ref/σ_ref).
pub fn snr_enhancement(series: &ReadoutSeries, up_to_n: usize) -> Result<f64, AnalysisError> {
    Ok(optimal_snr(series, up_to_n)? / series.reference_snr())
}
