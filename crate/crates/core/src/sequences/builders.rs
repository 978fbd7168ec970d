use std::f64::consts::FRAC_PI_2;

use super::{PulseElement, PulseKind, PulseSequence, SequenceError, SequenceFamily};
use crate::model::SensorEnsembleParams;

/// Axis phases of one XY8 cycle: X Y X Y Y X Y X.
pub const XY8_PHASES: [f64; 8] = [0.0, FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_2, 0.0, FRAC_PI_2, 0.0];

/// π-pulse-equivalent toggling intervals per DROID-60 repetition.
pub const DROID_INTERVALS_PER_REPETITION: usize = 48;

fn check_dd_args(repetitions: usize, tau: f64) -> Result<(), SequenceError> {
    if repetitions == 0 {
        return Err(SequenceError::Domain("repetitions must be at least 1".into()));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(SequenceError::Domain(format!(
            "pulse spacing tau must be positive, got {tau}"
        )));
    }
    Ok(())
}

/// π/2 then n π pulses at (j + ½)·τ then π/2, spanning n·τ.
fn dd_skeleton(n: usize, tau: f64, phase_of: impl Fn(usize) -> f64) -> Vec<PulseElement> {
    let end = n as f64 * tau;
    let mut elements = Vec::with_capacity(2 * n + 3);
    elements.push(PulseElement::new(PulseKind::MwPiHalf, 0.0, 0.0));
    let mut last = 0.0;
    for j in 0..n {
        let t = (j as f64 + 0.5) * tau;
        elements.push(PulseElement::new(PulseKind::FreeEvolution, last, t - last));
        elements.push(PulseElement::new(PulseKind::MwPiBroadband, t, 0.0).with_phase(phase_of(j)));
        last = t;
    }
    elements.push(PulseElement::new(PulseKind::FreeEvolution, last, end - last));
    elements.push(PulseElement::new(PulseKind::MwPiHalf, end, 0.0));
    elements
}

/// XY8:k with inter-pulse spacing `tau`: 8k π pulses, sensing duration 8k·τ.
pub fn build_xy8(repetitions: usize, tau: f64) -> Result<PulseSequence, SequenceError> {
    check_dd_args(repetitions, tau)?;
    let elements = dd_skeleton(8 * repetitions, tau, |j| XY8_PHASES[j % 8]);
    PulseSequence::new(elements, SequenceFamily::Xy8)
}

/// Effective DROID-60:k timing skeleton with the default interval count.
pub fn build_droid60(repetitions: usize, tau: f64) -> Result<PulseSequence, SequenceError> {
    build_droid60_with(repetitions, tau, DROID_INTERVALS_PER_REPETITION)
}

/// Effective DROID-60:k skeleton: `intervals_per_repetition`·k toggling
/// intervals of spacing `tau`. The literal DROID pulse phases are not modeled;
/// all pulses carry phase 0.
pub fn build_droid60_with(
    repetitions: usize,
    tau: f64,
    intervals_per_repetition: usize,
) -> Result<PulseSequence, SequenceError> {
    check_dd_args(repetitions, tau)?;
    if intervals_per_repetition == 0 {
        return Err(SequenceError::Domain(
            "intervals per repetition must be at least 1".into(),
        ));
    }
    let elements = dd_skeleton(intervals_per_repetition * repetitions, tau, |_| 0.0);
    PulseSequence::new(elements, SequenceFamily::Droid60)
}

/// Hahn echo of total length `duration`: π/2, π, π/2.
pub fn build_hahn(duration: f64) -> Result<PulseSequence, SequenceError> {
    check_dd_args(1, duration)?;
    PulseSequence::new(dd_skeleton(1, duration, |_| 0.0), SequenceFamily::Hahn)
}

/// Two copies of `block` separated by a free-evolution delay `t_corr`.
pub fn build_correlation(block: &PulseSequence, t_corr: f64) -> Result<PulseSequence, SequenceError> {
    if !matches!(block.family, SequenceFamily::Xy8 | SequenceFamily::Droid60) {
        return Err(SequenceError::Domain(format!(
            "correlation blocks must be XY8 or DROID60, got {:?}",
            block.family
        )));
    }
    if !(t_corr >= 0.0 && t_corr.is_finite()) {
        return Err(SequenceError::Domain(format!(
            "t_corr must be non-negative, got {t_corr}"
        )));
    }
    let d = block.total_duration;
    let mut elements = block.elements.clone();
    elements.push(PulseElement::new(PulseKind::FreeEvolution, d, t_corr));
    let offset = d + t_corr;
    elements.extend(block.elements.iter().map(|e| e.shifted(offset)));
    let mut seq = PulseSequence::new(elements, SequenceFamily::Correlation)?;
    seq.total_duration = 2.0 * d + t_corr;
    Ok(seq)
}

/// SWAP block (CNOT_e|n, CNOT_n|e, electron reset) of length `t_swap`, then
/// `n_readouts` cycles of [selective MW π + optical readout] of length `t_qlr`.
///
/// The MW pulses are instantaneous, the RF π pulse fills `t_swap − t_op`, and
/// any `t_qlr − t_op` idle time precedes the MW pulse of each cycle.
pub fn build_qle_readout(
    n_readouts: usize,
    params: &SensorEnsembleParams,
) -> Result<PulseSequence, SequenceError> {
    if n_readouts == 0 {
        return Err(SequenceError::Domain("at least one readout is required".into()));
    }
    params
        .validate()
        .map_err(|e| SequenceError::Domain(e.to_string()))?;
    if params.t_swap < params.t_op {
        return Err(SequenceError::Domain(format!(
            "t_swap ({}) must contain the optical reset pulse ({})",
            params.t_swap, params.t_op
        )));
    }
    let optical = PulseKind::Optical {
        power: params.laser_power,
    };
    let rf_len = params.t_swap - params.t_op;
    let mut elements = Vec::with_capacity(3 + 2 * n_readouts);
    elements.push(PulseElement::new(PulseKind::MwPiSelective, 0.0, 0.0));
    elements.push(PulseElement::new(PulseKind::RfPi, 0.0, rf_len));
    elements.push(PulseElement::new(optical.clone(), rf_len, params.t_op));
    let idle = params.t_qlr - params.t_op;
    for i in 0..n_readouts {
        let start = params.t_swap + i as f64 * params.t_qlr + idle;
        elements.push(PulseElement::new(PulseKind::MwPiSelective, start, 0.0));
        elements.push(PulseElement::new(optical.clone(), start, params.t_op));
    }
    let mut seq = PulseSequence::new(elements, SequenceFamily::QleReadout)?;
    seq.total_duration = params.t_swap + n_readouts as f64 * params.t_qlr;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-30)
    }

    #[test]
    fn xy8_examples() {
        let s = build_xy8(6, 0.5e-6).unwrap();
        assert_eq!(s.pi_pulse_count, 48);
        assert!(close(s.total_duration, 24e-6));
        let s = build_xy8(1, 1e-6).unwrap();
        assert_eq!(s.pi_pulse_count, 8);
        assert!(close(s.total_duration, 8e-6));
        let phases: Vec<f64> = s
            .elements
            .iter()
            .filter(|e| e.kind == PulseKind::MwPiBroadband)
            .map(|e| e.axis_phase)
            .collect();
        assert_eq!(phases, XY8_PHASES.to_vec());
        assert!(build_xy8(0, 1e-6).is_err());
        assert!(build_xy8(1, 0.0).is_err());
        assert!(build_xy8(1, -1e-6).is_err());
    }

    #[test]
    fn droid_examples() {
        let s = build_droid60(6, 0.5e-6).unwrap();
        assert!(close(s.total_duration, 144e-6));
        assert_eq!(s.pi_pulse_count, 288);
        assert_eq!(s.family, SequenceFamily::Droid60);
        let s = build_droid60(1, 0.5e-6).unwrap();
        assert!(close(s.total_duration, 24e-6));
        assert!(build_droid60(0, 0.5e-6).is_err());
        assert_eq!(build_droid60_with(2, 0.5e-6, 60).unwrap().pi_pulse_count, 120);
    }

    #[test]
    fn correlation_examples() {
        let block = build_xy8(6, 0.5e-6).unwrap();
        let c = build_correlation(&block, 0.0).unwrap();
        assert!(close(c.total_duration, 48e-6));
        let c = build_correlation(&block, 1.5e-3).unwrap();
        assert!(close(c.total_duration, 1.548e-3));
        assert_eq!(c.pi_pulse_count, 96);
        assert!(build_correlation(&block, -1e-9).is_err());
        let hahn = build_hahn(10e-6).unwrap();
        assert!(build_correlation(&hahn, 0.0).is_err());
    }

    #[test]
    fn qle_readout_examples() {
        let p = SensorEnsembleParams::default();
        let s = build_qle_readout(2000, &p).unwrap();
        assert!(close(s.total_duration, 6016.5e-6));
        assert_eq!(s.element_count(), 3 + 2 * 2000);
        let s = build_qle_readout(1, &p).unwrap();
        assert!(close(s.total_duration, 19.5e-6));
        assert!(close(s.elements.last().unwrap().end_time(), 19.5e-6));
        assert!(build_qle_readout(0, &p).is_err());
    }

    #[test]
    fn qle_readout_with_idle_time() {
        let p = SensorEnsembleParams {
            t_qlr: 5e-6,
            ..Default::default()
        };
        let s = build_qle_readout(3, &p).unwrap();
        assert!(close(s.total_duration, 31.5e-6));
        assert!(close(s.elements.last().unwrap().end_time(), 31.5e-6));
    }

    #[test]
    fn rejects_overlap() {
        let els = vec![
            PulseElement::new(PulseKind::FreeEvolution, 0.0, 2e-6),
            PulseElement::new(PulseKind::FreeEvolution, 1e-6, 2e-6),
        ];
        assert!(PulseSequence::new(els, SequenceFamily::Custom).is_err());
    }

    #[test]
    fn then_concatenates() {
        let p = SensorEnsembleParams::default();
        let s = build_xy8(6, 0.5e-6)
            .unwrap()
            .then(&build_qle_readout(10, &p).unwrap(), SequenceFamily::Custom)
            .unwrap();
        assert!(close(s.total_duration, 24e-6 + 16.5e-6 + 30e-6));
    }
}
