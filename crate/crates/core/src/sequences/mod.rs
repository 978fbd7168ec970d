//! Pulse-sequence construction and AC phase accumulation.
//!
//! Sequences are timelines of zero-width MW π and π/2 pulses, finite RF and
//! optical pulses, and free-evolution intervals. A sensing window is the span
//! between two π/2 pulses; [`toggling_function`] turns it into the ±1 sign
//! function that weights the field integral in [`accumulated_phase`].

mod builders;
mod phase;

pub use builders::{
    build_correlation, build_droid60, build_droid60_with, build_hahn, build_qle_readout,
    build_xy8, DROID_INTERVALS_PER_REPETITION, XY8_PHASES,
};
pub use phase::{
    accumulated_phase, b_ac_two_pi, phase_per_tesla, sensing_windows, toggling_function, ACSignal,
    Tone, TogglingFunction,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("domain error: {0}")]
    Domain(String),
}

/// Sequence family tag. Drives the coherence model in [`crate::noise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceFamily {
    #[serde(rename = "XY8")]
    Xy8,
    #[serde(rename = "DROID60")]
    Droid60,
    #[serde(rename = "HAHN")]
    Hahn,
    #[serde(rename = "CORRELATION")]
    Correlation,
    #[serde(rename = "QLE_READOUT")]
    QleReadout,
    #[serde(rename = "CUSTOM")]
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PulseKind {
    /// Nuclear-state-selective MW π pulse (CNOT_e|n).
    MwPiSelective,
    /// Broadband MW π pulse used for decoupling; one toggling switch each.
    MwPiBroadband,
    MwPiHalf,
    /// RF π pulse on the nuclear transition (CNOT_n|e).
    RfPi,
    /// Optical pulse at the given power (mW).
    Optical { power: f64 },
    FreeEvolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseElement {
    pub kind: PulseKind,
    /// MW phase (rad); zero for non-MW elements.
    pub axis_phase: f64,
    /// Start time (s).
    pub start_time: f64,
    /// Duration (s); MW pulses are idealized as instantaneous.
    pub duration: f64,
}

impl PulseElement {
    pub fn new(kind: PulseKind, start_time: f64, duration: f64) -> Self {
        Self {
            kind,
            axis_phase: 0.0,
            start_time,
            duration,
        }
    }

    pub fn with_phase(mut self, axis_phase: f64) -> Self {
        self.axis_phase = axis_phase;
        self
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    pub fn center(&self) -> f64 {
        self.start_time + 0.5 * self.duration
    }

    fn shifted(&self, dt: f64) -> Self {
        Self {
            start_time: self.start_time + dt,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub elements: Vec<PulseElement>,
    pub family: SequenceFamily,
    /// Number of decoupling π pulses (toggling switches).
    pub pi_pulse_count: usize,
    /// End time of the last element (s).
    pub total_duration: f64,
}

impl PulseSequence {
    /// Validates ordering and non-overlap, and derives the pulse count and duration.
    pub fn new(elements: Vec<PulseElement>, family: SequenceFamily) -> Result<Self, SequenceError> {
        let mut prev_end = 0.0_f64;
        for (i, el) in elements.iter().enumerate() {
            if !(el.start_time >= 0.0 && el.duration >= 0.0) {
                return Err(SequenceError::Domain(format!(
                    "element {i} has negative start time or duration"
                )));
            }
            // Tolerate rounding in accumulated start times.
            if el.start_time < prev_end - 1e-15 * prev_end.max(1e-12) {
                return Err(SequenceError::Domain(format!(
                    "element {i} starts at {} before the previous element ends at {prev_end}",
                    el.start_time
                )));
            }
            prev_end = el.end_time();
        }
        let pi_pulse_count = elements
            .iter()
            .filter(|e| e.kind == PulseKind::MwPiBroadband)
            .count();
        if family == SequenceFamily::Xy8 && pi_pulse_count % 8 != 0 {
            return Err(SequenceError::Domain(format!(
                "XY8 sequence needs a multiple of 8 pi pulses, got {pi_pulse_count}"
            )));
        }
        let total_duration = elements.last().map_or(0.0, PulseElement::end_time);
        Ok(Self {
            elements,
            family,
            pi_pulse_count,
            total_duration,
        })
    }

    /// Appends `other` after this sequence, shifted by `self.total_duration`.
    pub fn then(&self, other: &PulseSequence, family: SequenceFamily) -> Result<Self, SequenceError> {
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().map(|e| e.shifted(self.total_duration)));
        let mut seq = Self::new(elements, family)?;
        seq.total_duration = self.total_duration + other.total_duration;
        Ok(seq)
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }
}
