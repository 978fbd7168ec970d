use qle_core::model::{NuclearRelaxation, QuantumState, SensorEnsembleParams};
use qle_core::noise::NuclearT1Model;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ScenarioError;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
    if let Some(last) = v.last_mut() {
        *last = hi;
    }
    if let Some(first) = v.first_mut() {
        *first = lo;
    }
    v
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

/// Per-readout shot noise scaled down by `averages` shots.
pub fn averaged_sigma(params: &SensorEnsembleParams, averages: u64) -> f64 {
    params.readout_sigma() / (averages as f64).sqrt()
}

/// Nuclear relaxation under illumination at the configured bias field.
pub fn bias_relaxation(
    params: &SensorEnsembleParams,
    model: &NuclearT1Model,
) -> Result<NuclearRelaxation, ScenarioError> {
    Ok(NuclearRelaxation {
        t1: model.t1_vs_field(params.bias_field)?,
        beta: model.stretch_beta,
    })
}

/// Electron reset closing the SWAP block.
pub fn swap_and_reset(
    state: &QuantumState,
    params: &SensorEnsembleParams,
    relax: &NuclearRelaxation,
) -> Result<QuantumState, ScenarioError> {
    Ok(state
        .apply_swap(params)?
        .apply_optical_pulse(params.t_op, params, relax)?)
}

/// Per-cycle mean contrast Cₙ = αₙ + βₙ·d of an N-cycle QLE readout, as a
/// function of the electron polarization d left by the sensing block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutTransfer {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ReadoutTransfer {
    /// Density-matrix simulation of SWAP, reset, then `n` cycles of
    /// [CNOT_e|n, readout, optical pulse of length t_op].
    pub fn simulate(
        params: &SensorEnsembleParams,
        relax: &NuclearRelaxation,
        n: usize,
    ) -> Result<Self, ScenarioError> {
        let run = |d: f64| -> Result<Vec<f64>, ScenarioError> {
            let mut s = QuantumState::initial().apply_sensing_phase(d.acos(), 1.0)?;
            s = swap_and_reset(&s, params, relax)?;
            let f = params.per_gate_fidelity();
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                s = s.apply_cnot_e_given_n(f)?;
                out.push(s.mean_contrast(params));
                s = s.apply_optical_pulse(params.t_op, params, relax)?;
            }
            Ok(out)
        };
        // Every operation is affine in the state, so two polarizations fix the map.
        let up = run(1.0)?;
        let down = run(-1.0)?;
        Ok(Self {
            alpha: up.iter().zip(&down).map(|(u, d)| 0.5 * (u + d)).collect(),
            beta: up.iter().zip(&down).map(|(u, d)| 0.5 * (u - d)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Draws noisy cycle contrasts for polarization `d` and returns the
    /// inverse-variance weighted estimate of `d`.
    pub fn estimate<R: Rng + ?Sized>(&self, d: f64, sigma: f64, rng: &mut R) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            let c = a + b * d + gaussian(rng, sigma);
            num += b * (c - a);
            den += b * b;
        }
        num / den
    }

    /// Standard deviation of [`Self::estimate`] for per-cycle noise `sigma`.
    pub fn estimate_sigma(&self, sigma: f64) -> f64 {
        sigma / self.beta.iter().map(|b| b * b).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qle_core::rng::stream;

    #[test]
    fn spacing() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        let l = logspace(1.0, 300.0, 24);
        assert_eq!(l[0], 1.0);
        assert_eq!(l[23], 300.0);
        assert!((l[1] / l[0] - l[2] / l[1]).abs() < 1e-12);
    }

    #[test]
    fn ideal_transfer_matches_exponential_decay() {
        let params = SensorEnsembleParams {
            swap_fidelity: 1.0,
            repolarization_fraction: 1.0,
            ..SensorEnsembleParams::default()
        };
        let relax = NuclearRelaxation::exponential(3.44e-3);
        let t = ReadoutTransfer::simulate(&params, &relax, 50).unwrap();
        for (k, b) in t.beta.iter().enumerate() {
            let expected = params.contrast_c0 * (-((k + 1) as f64) * params.t_op / 3.44e-3).exp();
            assert!((b - expected).abs() < 1e-12, "cycle {}: {b} vs {expected}", k + 1);
        }
    }

    #[test]
    fn estimator_is_unbiased() {
        let params = SensorEnsembleParams::default();
        let relax = NuclearRelaxation::exponential(3.44e-3);
        let t = ReadoutTransfer::simulate(&params, &relax, 200).unwrap();
        let sigma = params.readout_sigma();
        let mut rng = stream(3, "transfer", 0);
        let n = 2000;
        let mean = (0..n).map(|_| t.estimate(0.3, sigma, &mut rng)).sum::<f64>() / n as f64;
        let se = t.estimate_sigma(sigma) / (n as f64).sqrt();
        assert!((mean - 0.3).abs() < 4.0 * se, "{mean}");
    }
}
