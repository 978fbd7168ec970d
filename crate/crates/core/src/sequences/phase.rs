use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{PulseKind, PulseSequence, SequenceError};
use crate::model::PhysicalConstants;

/// One sinusoidal component B·cos(2πf·t + phase), with t the absolute sequence time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    /// Amplitude (T).
    pub amplitude: f64,
    /// Frequency (Hz).
    pub frequency: f64,
    /// Phase at t = 0 (rad).
    pub phase: f64,
}

impl Tone {
    /// Tone whose zero crossings fall on the π pulses of a window starting at
    /// `window_start` with spacing 1/(2f).
    pub fn aligned(amplitude: f64, frequency: f64, window_start: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase: -2.0 * PI * frequency * window_start,
        }
    }

    /// ∫ₐᵇ B·cos(ωt + φ) dt.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let w = 2.0 * PI * self.frequency;
        self.amplitude / w * ((w * b + self.phase).sin() - (w * a + self.phase).sin())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ACSignal {
    pub tones: Vec<Tone>,
}

impl ACSignal {
    pub fn new(tones: Vec<Tone>) -> Result<Self, SequenceError> {
        let signal = Self { tones };
        signal.validate()?;
        Ok(signal)
    }

    pub fn single(tone: Tone) -> Self {
        Self { tones: vec![tone] }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        for (i, t) in self.tones.iter().enumerate() {
            if !(t.amplitude >= 0.0 && t.amplitude.is_finite()) {
                return Err(SequenceError::Domain(format!(
                    "tone {i}: amplitude must be non-negative, got {}",
                    t.amplitude
                )));
            }
            if !(t.frequency > 0.0 && t.frequency.is_finite()) {
                return Err(SequenceError::Domain(format!(
                    "tone {i}: frequency must be positive, got {}",
                    t.frequency
                )));
            }
        }
        Ok(())
    }

    /// Field value at time `t` (T).
    pub fn field_at(&self, t: f64) -> f64 {
        self.tones
            .iter()
            .map(|tone| tone.amplitude * (2.0 * PI * tone.frequency * t + tone.phase).cos())
            .sum()
    }
}

/// ±1 weighting of the field over one sensing window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TogglingFunction {
    pub window_start: f64,
    pub window_end: f64,
    /// Absolute times of the sign flips, strictly increasing.
    pub switch_times: Vec<f64>,
    pub initial_sign: f64,
}

impl TogglingFunction {
    pub fn sign_at(&self, t: f64) -> f64 {
        let flips = self.switch_times.iter().take_while(|&&s| s <= t).count();
        if flips % 2 == 0 {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }

    /// Constant-sign intervals as (start, end, sign).
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let bounds: Vec<f64> = std::iter::once(self.window_start)
            .chain(self.switch_times.iter().copied())
            .chain(std::iter::once(self.window_end))
            .collect();
        (0..bounds.len() - 1).map(move |i| {
            let sign = if i % 2 == 0 {
                self.initial_sign
            } else {
                -self.initial_sign
            };
            (bounds[i], bounds[i + 1], sign)
        })
    }

    pub fn duration(&self) -> f64 {
        self.window_end - self.window_start
    }
}

/// Every π/2 … π/2 window of `seq`, with one switch per decoupling π pulse.
pub fn sensing_windows(seq: &PulseSequence) -> Vec<TogglingFunction> {
    let mut windows = Vec::new();
    let mut open: Option<(f64, Vec<f64>)> = None;
    for el in &seq.elements {
        match el.kind {
            PulseKind::MwPiHalf => {
                if let Some((start, switches)) = open.take() {
                    windows.push(TogglingFunction {
                        window_start: start,
                        window_end: el.start_time,
                        switch_times: switches,
                        initial_sign: 1.0,
                    });
                } else {
                    open = Some((el.start_time, Vec::new()));
                }
            }
            PulseKind::MwPiBroadband => {
                if let Some((_, switches)) = open.as_mut() {
                    switches.push(el.center());
                }
            }
            _ => {}
        }
    }
    windows
}

/// Toggling function of the first sensing window of `seq`.
pub fn toggling_function(seq: &PulseSequence) -> Result<TogglingFunction, SequenceError> {
    let window = sensing_windows(seq)
        .into_iter()
        .next()
        .ok_or_else(|| SequenceError::Domain("sequence has no pi/2 ... pi/2 sensing window".into()))?;
    if window.switch_times.is_empty() {
        return Err(SequenceError::Domain(
            "sensing window contains no pi pulse".into(),
        ));
    }
    Ok(window)
}

/// φ = γ_e·Σ_tones ∫ B(t)·s(t) dt, integrated exactly over each constant-sign interval.
pub fn accumulated_phase(
    tf: &TogglingFunction,
    signal: &ACSignal,
    constants: &PhysicalConstants,
) -> Result<f64, SequenceError> {
    signal.validate()?;
    if !(tf.window_end >= tf.window_start) {
        return Err(SequenceError::Domain("sensing window ends before it starts".into()));
    }
    if tf.switch_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SequenceError::Domain(
            "switch times must be strictly increasing".into(),
        ));
    }
    let integral: f64 = tf
        .intervals()
        .map(|(a, b, sign)| sign * signal.tones.iter().map(|t| t.integral(a, b)).sum::<f64>())
        .sum();
    Ok(constants.gamma_e() * integral)
}

/// Phase per tesla of a resonant, zero-crossing-aligned tone at `frequency`.
pub fn phase_per_tesla(
    tf: &TogglingFunction,
    frequency: f64,
    constants: &PhysicalConstants,
) -> Result<f64, SequenceError> {
    let tone = Tone::aligned(1.0, frequency, tf.window_start);
    accumulated_phase(tf, &ACSignal::single(tone), constants)
}

/// Amplitude (T) of a resonant AC field producing 2π of phase with `n_pulses`
/// π pulses at sequence frequency `f0`: 2ħπ²f₀ / (g·μ_B·N).
pub fn b_ac_two_pi(
    f0: f64,
    n_pulses: usize,
    constants: &PhysicalConstants,
) -> Result<f64, SequenceError> {
    if !(f0 > 0.0) {
        return Err(SequenceError::Domain(format!(
            "sequence frequency must be positive, got {f0}"
        )));
    }
    if n_pulses == 0 {
        return Err(SequenceError::Domain("at least one pi pulse is required".into()));
    }
    Ok(2.0 * constants.hbar * PI * PI * f0 / (constants.g * constants.mu_b * n_pulses as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{build_droid60, build_hahn, build_xy8};

    #[test]
    fn xy8_switches_at_odd_half_spacings() {
        let tau = 1e-6;
        let tf = toggling_function(&build_xy8(1, tau).unwrap()).unwrap();
        assert_eq!(tf.switch_times.len(), 8);
        for (j, s) in tf.switch_times.iter().enumerate() {
            assert!((s - (2 * j + 1) as f64 * tau / 2.0).abs() < 1e-18);
        }
        assert_eq!(tf.initial_sign, 1.0);
    }

    #[test]
    fn hahn_switches_at_midpoint() {
        let tf = toggling_function(&build_hahn(10e-6).unwrap()).unwrap();
        assert_eq!(tf.switch_times, vec![5e-6]);
    }

    #[test]
    fn switch_count_equals_pi_pulse_count() {
        for seq in [
            build_xy8(3, 0.5e-6).unwrap(),
            build_droid60(2, 0.5e-6).unwrap(),
            build_hahn(1e-6).unwrap(),
        ] {
            assert_eq!(toggling_function(&seq).unwrap().switch_times.len(), seq.pi_pulse_count);
        }
    }

    #[test]
    fn no_window_is_an_error() {
        let p = crate::model::SensorEnsembleParams::default();
        let seq = crate::sequences::build_qle_readout(2, &p).unwrap();
        assert!(toggling_function(&seq).is_err());
    }

    #[test]
    fn sign_function() {
        let tf = toggling_function(&build_xy8(1, 1e-6).unwrap()).unwrap();
        assert_eq!(tf.sign_at(0.2e-6), 1.0);
        assert_eq!(tf.sign_at(0.7e-6), -1.0);
        assert_eq!(tf.sign_at(1.7e-6), 1.0);
    }

    #[test]
    fn zero_amplitude_gives_zero_phase() {
        let tf = toggling_function(&build_xy8(6, 0.5e-6).unwrap()).unwrap();
        let signal = ACSignal::single(Tone::aligned(0.0, 1e6, 0.0));
        assert_eq!(accumulated_phase(&tf, &signal, &PhysicalConstants::default()).unwrap(), 0.0);
    }

    #[test]
    fn b_ac_two_pi_examples() {
        let c = PhysicalConstants::default();
        let b48 = b_ac_two_pi(1e6, 48, &c).unwrap();
        assert!((b48 * 1e6 - 2.338).abs() < 5e-4, "{b48}");
        let b96 = b_ac_two_pi(1e6, 96, &c).unwrap();
        assert_eq!(b48 / 2.0, b96);
        // NV g-factor reproduces the quoted 0.3891 µT at 288 intervals.
        let b = b_ac_two_pi(1e6, 288, &PhysicalConstants::nv()).unwrap();
        assert_eq!(format!("{:.4}", b * 1e6), "0.3891");
        assert!(b_ac_two_pi(0.0, 8, &c).is_err());
        assert!(b_ac_two_pi(1e6, 0, &c).is_err());
    }
}
