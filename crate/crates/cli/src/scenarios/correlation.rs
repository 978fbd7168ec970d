//! Correlation spectroscopy of a multi-tone signal with quantum-logic readout.
//!
//! The signal phase relative to the sequence is random from shot to shot. For
//! a window w and tone j the phase is linear in the tone,
//! φ_w = Σ_j (p_wj·cos θ_j + q_wj·sin θ_j), so the shot average of sin φ₁·sin φ₂
//! over uniform θ_j is ½·[Π_j J₀(|c⁻_j|) − Π_j J₀(|c⁺_j|)] with
//! c^±_j = (p₁ⱼ ± p₂ⱼ, q₁ⱼ ± q₂ⱼ).

use std::f64::consts::{FRAC_PI_2, PI};

use qle_core::analysis::periodogram;
use qle_core::model::PhysicalConstants;
use qle_core::rng::stream;
use qle_core::sequences::{
    accumulated_phase, build_correlation, build_droid60, build_xy8, sensing_windows, ACSignal,
    PulseKind, PulseSequence, SequenceFamily, Tone, TogglingFunction,
};
use rayon::prelude::*;

use super::common::{averaged_sigma, bias_relaxation, linspace, ReadoutTransfer};
use super::{summary_table, ScenarioError};
use crate::config::{CorrelationSettings, ExperimentConfig};
use crate::output::Table;

/// Bessel J₀ from (1/π)∫₀^π cos(x·sin t) dt; the trapezoid rule on this
/// periodic integrand converges geometrically.
pub(crate) fn bessel_j0(x: f64) -> f64 {
    let n = 32 + 2 * x.abs().ceil() as usize;
    let h = PI / n as f64;
    let inner: f64 = (1..n).map(|k| (x * (k as f64 * h).sin()).cos()).sum();
    (inner + 1.0) / n as f64
}

fn build_block(s: &CorrelationSettings) -> Result<PulseSequence, ScenarioError> {
    Ok(match s.block {
        SequenceFamily::Droid60 => build_droid60(s.repetitions, s.tau.si())?,
        _ => build_xy8(s.repetitions, s.tau.si())?,
    })
}

/// (cos, sin) quadrature phase responses of one window to each tone.
fn quadratures(
    tf: &TogglingFunction,
    tones: &[Tone],
    constants: &PhysicalConstants,
) -> Result<Vec<(f64, f64)>, ScenarioError> {
    tones
        .iter()
        .map(|t| {
            let at = |phase: f64| {
                accumulated_phase(tf, &ACSignal::single(Tone { phase, ..*t }), constants)
            };
            Ok((at(0.0)?, at(-FRAC_PI_2)?))
        })
        .collect()
}

/// Phase-averaged ⟨sin φ₁·sin φ₂⟩ for the correlation sequence with delay `t_corr`.
fn mean_correlation(
    block: &PulseSequence,
    t_corr: f64,
    tones: &[Tone],
    constants: &PhysicalConstants,
) -> Result<f64, ScenarioError> {
    let seq = build_correlation(block, t_corr)?;
    let windows = sensing_windows(&seq);
    if windows.len() != 2 {
        return Err(ScenarioError::Other(format!(
            "correlation sequence has {} sensing windows, expected 2",
            windows.len()
        )));
    }
    let w1 = quadratures(&windows[0], tones, constants)?;
    let w2 = quadratures(&windows[1], tones, constants)?;
    let (mut minus, mut plus) = (1.0, 1.0);
    for ((p1, q1), (p2, q2)) in w1.iter().zip(&w2) {
        minus *= bessel_j0((p1 - p2).hypot(q1 - q2));
        plus *= bessel_j0((p1 + p2).hypot(q1 + q2));
    }
    Ok(0.5 * (minus - plus))
}

pub fn run(config: &ExperimentConfig, s: &CorrelationSettings) -> Result<Vec<Table>, ScenarioError> {
    let params = config.params();
    let constants = PhysicalConstants::default();
    let coherence = config.coherence_model();
    let relax = bias_relaxation(&params, &config.nuclear_model())?;
    let transfer = ReadoutTransfer::simulate(&params, &relax, s.n_readouts)?;
    let sigma = averaged_sigma(&params, s.averages);

    let block = build_block(s)?;
    let n_pulses = block
        .elements
        .iter()
        .filter(|e| e.kind == PulseKind::MwPiBroadband)
        .count();
    let d_block = coherence.decoherence_factor(s.block, n_pulses, block.total_duration)?;
    let tones = config.signal.signal().tones;

    let step = s.t_corr_step.si();
    let t_corr = linspace(0.0, step * (s.points - 1) as f64, s.points);
    let rows = t_corr
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let survival = coherence.correlation_survival(t)?;
            let d = d_block * d_block * survival * mean_correlation(&block, t, &tones, &constants)?;
            let mut rng = stream(config.seed, "correlation_threetone/trace", i as u64);
            let measured = transfer.estimate(d, sigma, &mut rng);
            Ok((t, d, measured))
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    let mut trace = Table::new("trace", &["t_corr_s", "polarization_model", "polarization_measured"]);
    for &(t, d, m) in &rows {
        trace.push(vec![t.into(), d.into(), m.into()]);
    }

    let measured: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let spectrum = periodogram(&measured, step)?;
    let mut spec = Table::new("spectrum", &["frequency_hz", "power"]);
    for (f, p) in spectrum.frequencies.iter().zip(&spectrum.power) {
        spec.push(vec![(*f).into(), (*p).into()]);
    }

    let floor = spectrum.noise_floor();
    let found = spectrum.peaks(tones.len());
    let mut peaks = Table::new(
        "peaks",
        &["tone_hz", "peak_hz", "offset_bins", "power", "noise_floor", "ratio"],
    );
    for tone in &tones {
        let Some(&k) = found.iter().min_by(|&&a, &&b| {
            let da = (spectrum.frequencies[a] - tone.frequency).abs();
            let db = (spectrum.frequencies[b] - tone.frequency).abs();
            da.total_cmp(&db)
        }) else {
            continue;
        };
        let f = spectrum.frequencies[k];
        let p = spectrum.power[k];
        peaks.push(vec![
            tone.frequency.into(),
            f.into(),
            ((f - tone.frequency) / spectrum.resolution()).into(),
            p.into(),
            floor.into(),
            (p / floor).into(),
        ]);
    }

    let summary = summary_table(
        "summary",
        &[
            ("block_duration_s", block.total_duration),
            ("block_decoherence_factor", d_block),
            ("frequency_resolution_hz", spectrum.resolution()),
            ("estimate_sigma", transfer.estimate_sigma(sigma)),
            ("noise_floor", floor),
        ],
    );
    Ok(vec![trace, spec, peaks, summary])
}
