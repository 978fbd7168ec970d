use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Durations entering the QLE sensitivity factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingBudget {
    /// Sensing duration (s).
    pub t_sense: f64,
    /// SWAP block duration (s).
    pub t_swap: f64,
    /// Readout cycle duration (s).
    pub t_qlr: f64,
    pub n_readouts: usize,
}

impl TimingBudget {
    pub fn new(t_sense: f64, t_swap: f64, t_qlr: f64, n_readouts: usize) -> Result<Self, AnalysisError> {
        let b = Self {
            t_sense,
            t_swap,
            t_qlr,
            n_readouts,
        };
        b.validate()?;
        Ok(b)
    }

    /// `t_swap` may be zero (the overhead-free limit); the other durations must be positive.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.t_sense > 0.0 && self.t_qlr > 0.0) {
            return Err(AnalysisError::Domain(format!(
                "t_sense and t_qlr must be positive, got {} and {}",
                self.t_sense, self.t_qlr
            )));
        }
        if !(self.t_swap >= 0.0) {
            return Err(AnalysisError::Domain(format!(
                "t_swap must be non-negative, got {}",
                self.t_swap
            )));
        }
        if self.n_readouts == 0 {
            return Err(AnalysisError::Domain("n_readouts must be at least 1".into()));
        }
        Ok(())
    }

    /// T_sense + T_SWAP + N·T_QLR.
    pub fn qle_cycle_time(&self) -> f64 {
        self.t_sense + self.t_swap + self.n_readouts as f64 * self.t_qlr
    }

    /// T_sense + T_QLR.
    pub fn conventional_cycle_time(&self) -> f64 {
        self.t_sense + self.t_qlr
    }

    pub fn with_readouts(&self, n_readouts: usize) -> Self {
        Self { n_readouts, ..*self }
    }

    pub fn with_t_sense(&self, t_sense: f64) -> Self {
        Self { t_sense, ..*self }
    }
}

/// η̃ = r·√(T_sense + T_QLR) / √(T_sense + T_SWAP + N·T_QLR).
pub fn eta_qle(snr_ratio: f64, budget: &TimingBudget) -> Result<f64, AnalysisError> {
    if !(snr_ratio > 0.0) {
        return Err(AnalysisError::Domain(format!(
            "SNR ratio must be positive, got {snr_ratio}"
        )));
    }
    budget.validate()?;
    Ok(snr_ratio * (budget.conventional_cycle_time() / budget.qle_cycle_time()).sqrt())
}

/// Number M of conventional measurements taking the same time as one QLE measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedReference {
    /// M solving M·(T_sense + T_QLR) = T_sense + T_SWAP + N·T_QLR.
    pub exact: f64,
    /// `exact` rounded to the nearest integer, at least 1.
    pub count: u64,
}

pub fn matched_reference_count(budget: &TimingBudget) -> Result<MatchedReference, AnalysisError> {
    budget.validate()?;
    let exact = budget.qle_cycle_time() / budget.conventional_cycle_time();
    Ok(MatchedReference {
        exact,
        count: (exact.round() as u64).max(1),
    })
}

/// η̃ over a grid of readout counts and sensing durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancementMap {
    pub n_axis: Vec<usize>,
    pub t_sense_axis: Vec<f64>,
    /// `eta[i][j]` is the value at `t_sense_axis[i]`, `n_axis[j]`.
    pub eta: Vec<Vec<f64>>,
}

impl EnhancementMap {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.eta[i]
    }

    /// Index into `n_axis` of the largest η̃ in row `i`.
    pub fn best_n_index(&self, i: usize) -> usize {
        self.eta[i]
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (j, &v)| {
                if v > bv {
                    (j, v)
                } else {
                    (bi, bv)
                }
            })
            .0
    }
}

/// Evaluates [`eta_qle`] on the grid, taking the SNR ratio at each N from `snr_curve`.
///
/// `template` supplies T_SWAP and T_QLR; its T_sense and N are replaced per cell.
pub fn eta_map<F>(
    snr_curve: F,
    template: &TimingBudget,
    n_axis: &[usize],
    t_sense_axis: &[f64],
) -> Result<EnhancementMap, AnalysisError>
where
    F: Fn(usize) -> f64,
{
    if n_axis.is_empty() || t_sense_axis.is_empty() {
        return Err(AnalysisError::Domain("map axes must be nonempty".into()));
    }
    let ratios: Vec<f64> = n_axis.iter().map(|&n| snr_curve(n)).collect();
    let eta = t_sense_axis
        .iter()
        .map(|&t| {
            n_axis
                .iter()
                .zip(&ratios)
                .map(|(&n, &r)| eta_qle(r, &template.with_t_sense(t).with_readouts(n)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EnhancementMap {
        n_axis: n_axis.to_vec(),
        t_sense_axis: t_sense_axis.to_vec(),
        eta,
    })
}

/// SNR(N)/SNR(Ref) for Aₙ = A_ref·exp(−n·t_qlr/T₁) with constant σ, summed directly.
pub fn exponential_snr_curve(t_qlr: f64, t1: f64) -> impl Fn(usize) -> f64 {
    let q = (-2.0 * t_qlr / t1).exp();
    move |n| (1..=n).map(|k| q.powi(k as i32)).sum::<f64>().sqrt()
}
