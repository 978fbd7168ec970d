use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Bin frequencies k·df for k = 0..=M/2 (Hz).
    pub frequencies: Vec<f64>,
    /// Power per hertz in each bin.
    pub power: Vec<f64>,
}

impl Spectrum {
    /// Bin spacing 1/(M·dt).
    pub fn resolution(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    /// Σ P·df.
    pub fn integrated_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.resolution()
    }

    /// Median power over non-DC bins.
    pub fn noise_floor(&self) -> f64 {
        let mut p: Vec<f64> = self.power.iter().skip(1).copied().collect();
        if p.is_empty() {
            return 0.0;
        }
        p.sort_by(f64::total_cmp);
        let m = p.len() / 2;
        if p.len() % 2 == 1 {
            p[m]
        } else {
            0.5 * (p[m - 1] + p[m])
        }
    }

    /// Indices of the `count` largest local maxima, DC excluded, in ascending frequency.
    pub fn peaks(&self, count: usize) -> Vec<usize> {
        let p = &self.power;
        let n = p.len();
        let mut candidates: Vec<usize> = (1..n)
            .filter(|&i| {
                let left = p[i - 1];
                let right = if i + 1 < n { p[i + 1] } else { f64::NEG_INFINITY };
                // index 1 compares against DC, which is zero after mean removal
                p[i] >= left && p[i] > right
            })
            .collect();
        candidates.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
        candidates.truncate(count);
        candidates.sort_unstable();
        candidates
    }

    /// Index of the strongest non-DC bin.
    pub fn dominant_bin(&self) -> Option<usize> {
        (1..self.power.len()).max_by(|&a, &b| self.power[a].total_cmp(&self.power[b]).then(b.cmp(&a)))
    }
}

/// One-sided periodogram of the mean-subtracted series, normalized so that
/// Σ P·df equals the population variance.
pub fn periodogram(samples: &[f64], dt: f64) -> Result<Spectrum, AnalysisError> {
    let m = samples.len();
    if m < 2 {
        return Err(AnalysisError::Domain(format!(
            "periodogram needs at least 2 samples, got {m}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(AnalysisError::Domain(format!("dt must be positive, got {dt}")));
    }
    let mean = samples.iter().sum::<f64>() / m as f64;
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let df = 1.0 / (m as f64 * dt);
    // |X_k|²/M² summed over all k is the variance; fold negative frequencies onto positive ones.
    let scale = 1.0 / ((m * m) as f64 * df);
    let half = m / 2;
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() * scale;
            if k == 0 || (m.is_multiple_of(2) && k == half) {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let frequencies = (0..=half).map(|k| k as f64 * df).collect();
    Ok(Spectrum { frequencies, power })
}
