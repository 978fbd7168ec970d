use qle_core::model::{NuclearSpin, QuantumState};
use qle_core::rng::stream;
use rayon::prelude::*;

use super::common::{averaged_sigma, bias_relaxation, gaussian, linspace, swap_and_reset};
use super::{summary_table, ScenarioError};
use crate::config::{ExperimentConfig, OdmrSettings};
use crate::output::Table;

/// Transition probability of a nominal π pulse detuned by `delta` (Rabi formula).
fn pi_pulse_flip(delta: f64, rabi: f64) -> f64 {
    let x = (delta / rabi).powi(2);
    let s = (std::f64::consts::FRAC_PI_2 * (1.0 + x).sqrt()).sin();
    s * s / (1.0 + x)
}

/// Contrast after a detuned MW π pulse; the ↓n line sits at −A/2, the ↑n line at +A/2.
fn spectrum_point(
    state: &QuantumState,
    delta: f64,
    s: &OdmrSettings,
    c0: f64,
) -> Result<f64, ScenarioError> {
    let half = 0.5 * s.hyperfine.si();
    let rabi = s.rabi_frequency.si();
    let after = state
        .apply_conditional_electron_flip(NuclearSpin::Down, pi_pulse_flip(delta + half, rabi))?
        .apply_conditional_electron_flip(NuclearSpin::Up, pi_pulse_flip(delta - half, rabi))?;
    Ok(c0 * after.electron_polarization())
}

pub fn run(config: &ExperimentConfig, s: &OdmrSettings) -> Result<Vec<Table>, ScenarioError> {
    let params = config.params();
    let relax = bias_relaxation(&params, &config.nuclear_model())?;
    let unswapped = QuantumState::initial();
    let transferred = unswapped.apply_swap(&params)?;
    let swapped = swap_and_reset(&unswapped, &params, &relax)?;
    let sigma = averaged_sigma(&params, s.averages);
    let detunings = linspace(-s.span.si(), s.span.si(), s.points);

    let rows = detunings
        .par_iter()
        .enumerate()
        .map(|(i, &delta)| {
            let mut rng = stream(config.seed, "odmr_swap/spectrum", i as u64);
            let ideal_ref = spectrum_point(&unswapped, delta, s, params.contrast_c0)?;
            let ideal_swap = spectrum_point(&swapped, delta, s, params.contrast_c0)?;
            Ok(vec![
                delta.into(),
                (ideal_ref + gaussian(&mut rng, sigma)).into(),
                (ideal_swap + gaussian(&mut rng, sigma)).into(),
                ideal_ref.into(),
                ideal_swap.into(),
                sigma.into(),
            ])
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    let mut spectrum = Table::new(
        "spectrum",
        &[
            "detuning_hz",
            "contrast_no_swap",
            "contrast_swap",
            "model_no_swap",
            "model_swap",
            "sigma",
        ],
    );
    spectrum.rows = rows;

    let summary = summary_table(
        "summary",
        &[
            ("nuclear_polarization_no_swap", unswapped.nuclear_polarization()),
            ("nuclear_polarization_swap", transferred.nuclear_polarization()),
            ("nuclear_polarization_after_reset", swapped.nuclear_polarization()),
            ("swap_fidelity", params.swap_fidelity),
        ],
    );
    Ok(vec![spectrum, summary])
}
