use qle_core::analysis::ac_sensitivity;
use qle_core::model::{PhysicalConstants, SensorEnsembleParams};
use qle_core::noise::ElectronCoherenceModel;
use qle_core::rng::stream;
use qle_core::sequences::{
    build_droid60, build_hahn, build_xy8, phase_per_tesla, toggling_function, PulseSequence,
    SequenceFamily, DROID_INTERVALS_PER_REPETITION,
};
use rayon::prelude::*;

use super::common::{averaged_sigma, gaussian};
use super::ScenarioError;
use crate::config::{ExperimentConfig, SensitivitySettings};
use crate::output::Table;

/// Phase excursion of the finite-difference probe field.
const PROBE_PHASE: f64 = 0.1;

struct Point {
    family: SequenceFamily,
    repetitions: usize,
    n_pulses: usize,
    duration: f64,
    t2: f64,
    slope: f64,
    sensitivity: f64,
    measured: f64,
}

/// (repetitions, π pulses, sequence) for every duration up to `max_duration`.
fn sequences(
    family: SequenceFamily,
    tau: f64,
    max_duration: f64,
) -> Result<Vec<(usize, usize, PulseSequence)>, ScenarioError> {
    let per_rep = match family {
        SequenceFamily::Xy8 | SequenceFamily::Hahn => 8,
        SequenceFamily::Droid60 => DROID_INTERVALS_PER_REPETITION,
        other => {
            return Err(ScenarioError::Other(format!(
                "no sensitivity model for sequence family {other:?}"
            )))
        }
    };
    let k_max = (max_duration / (per_rep as f64 * tau) + 1e-9).floor() as usize;
    (1..=k_max)
        .map(|k| {
            let seq = match family {
                SequenceFamily::Xy8 => build_xy8(k, tau)?,
                SequenceFamily::Droid60 => build_droid60(k, tau)?,
                _ => build_hahn(k as f64 * per_rep as f64 * tau)?,
            };
            let pulses = if family == SequenceFamily::Hahn { 1 } else { per_rep * k };
            Ok((k, pulses, seq))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    config: &ExperimentConfig,
    params: &SensorEnsembleParams,
    coherence: &ElectronCoherenceModel,
    constants: &PhysicalConstants,
    family: SequenceFamily,
    index: usize,
    (repetitions, n_pulses, seq): (usize, usize, PulseSequence),
    averages: u64,
) -> Result<Point, ScenarioError> {
    let duration = seq.total_duration;
    let tf = toggling_function(&seq)?;
    // Resonant frequency: one signal half-period per toggling interval.
    let frequency = 0.5 * (n_pulses as f64) / duration;
    let ppt = phase_per_tesla(&tf, frequency, constants)?;
    let t2 = coherence.t2(family, n_pulses)?;
    let decay = coherence.decoherence_factor(family, n_pulses, duration)?;
    let slope = params.contrast_c0 * decay * ppt;
    let shot_time = duration + params.t_qlr;
    let sigma_1s = params.readout_sigma() * shot_time.sqrt();
    let sensitivity = ac_sensitivity(sigma_1s, slope)?;

    // Finite-difference slope from two noisy contrast measurements at ±δB.
    let label = format!("sensitivity_vs_duration/{family:?}");
    let mut rng = stream(config.seed, &label, index as u64);
    let db = PROBE_PHASE / ppt;
    let sigma = averaged_sigma(params, averages);
    let contrast = |b: f64| params.contrast_c0 * decay * (ppt * b).sin();
    let plus = contrast(db) + gaussian(&mut rng, sigma);
    let minus = contrast(-db) + gaussian(&mut rng, sigma);
    let measured_slope = (plus - minus) / (2.0 * db);
    let measured = if measured_slope == 0.0 {
        f64::INFINITY
    } else {
        sigma_1s / measured_slope.abs()
    };

    Ok(Point {
        family,
        repetitions,
        n_pulses,
        duration,
        t2,
        slope,
        sensitivity,
        measured,
    })
}

fn family_name(f: SequenceFamily) -> &'static str {
    match f {
        SequenceFamily::Xy8 => "XY8",
        SequenceFamily::Droid60 => "DROID60",
        SequenceFamily::Hahn => "HAHN",
        _ => "OTHER",
    }
}

pub fn run(config: &ExperimentConfig, s: &SensitivitySettings) -> Result<Vec<Table>, ScenarioError> {
    let params = config.params();
    let coherence = config.coherence_model();
    let constants = PhysicalConstants::default();

    let mut points = Vec::new();
    for &family in &s.families {
        let seqs = sequences(family, s.tau.si(), s.max_duration.si())?;
        let evaluated = seqs
            .into_par_iter()
            .enumerate()
            .map(|(i, item)| {
                evaluate(config, &params, &coherence, &constants, family, i, item, s.averages)
            })
            .collect::<Result<Vec<_>, _>>()?;
        points.extend(evaluated);
    }

    let mut table = Table::new(
        "sensitivity",
        &[
            "family",
            "repetitions",
            "n_pulses",
            "duration_s",
            "t2_s",
            "slope_per_t",
            "sensitivity_t_per_rthz",
            "sensitivity_measured_t_per_rthz",
        ],
    );
    for p in &points {
        table.push(vec![
            family_name(p.family).into(),
            p.repetitions.into(),
            p.n_pulses.into(),
            p.duration.into(),
            p.t2.into(),
            p.slope.into(),
            p.sensitivity.into(),
            p.measured.into(),
        ]);
    }

    let mut best = Table::new(
        "optimum",
        &["family", "repetitions", "duration_s", "sensitivity_t_per_rthz"],
    );
    for &family in &s.families {
        if let Some(p) = points
            .iter()
            .filter(|p| p.family == family)
            .min_by(|a, b| a.sensitivity.total_cmp(&b.sensitivity))
        {
            best.push(vec![
                family_name(family).into(),
                p.repetitions.into(),
                p.duration.into(),
                p.sensitivity.into(),
            ]);
        }
    }
    Ok(vec![table, best])
}
