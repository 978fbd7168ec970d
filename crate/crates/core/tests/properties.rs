use std::f64::consts::PI;

use proptest::prelude::*;
use qle_core::analysis::{
    eta_qle, matched_reference_count, optimal_snr, periodogram, weighted_snr, ReadoutSeries,
    TimingBudget,
};
use qle_core::model::PhysicalConstants;
use qle_core::sequences::{
    accumulated_phase, b_ac_two_pi, build_correlation, build_droid60, build_xy8,
    toggling_function, ACSignal, Tone,
};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn resonant_phase(seq: &qle_core::sequences::PulseSequence, tau: f64, amplitude: f64) -> f64 {
    let tf = toggling_function(seq).unwrap();
    let f = 1.0 / (2.0 * tau);
    let signal = ACSignal::single(Tone::aligned(amplitude, f, tf.window_start));
    accumulated_phase(&tf, &signal, &PhysicalConstants::default()).unwrap()
}

#[test]
fn resonant_closed_form_xy8_and_droid() {
    let c = PhysicalConstants::default();
    for (seq, n) in [
        (build_xy8(1, 0.5e-6).unwrap(), 8),
        (build_xy8(6, 0.5e-6).unwrap(), 48),
        (build_droid60(6, 0.5e-6).unwrap(), 288),
        (build_xy8(3, 2e-6).unwrap(), 24),
    ] {
        let tau = seq.total_duration / n as f64;
        let f = 1.0 / (2.0 * tau);
        let b = 1e-7;
        let closed = c.gamma_e() * b * n as f64 / (PI * f);
        assert!(rel(resonant_phase(&seq, tau, b), closed) < 1e-9);
    }
}

#[test]
fn two_pi_amplitude_gives_two_pi() {
    for (k, n) in [(1, 8), (6, 48), (36, 288)] {
        let seq = build_xy8(k, 0.5e-6).unwrap();
        assert_eq!(seq.pi_pulse_count, n);
        let b = b_ac_two_pi(1e6, n, &PhysicalConstants::default()).unwrap();
        assert!(rel(resonant_phase(&seq, 0.5e-6, b), 2.0 * PI) < 1e-9);
    }
}

#[test]
fn off_resonant_tone_is_rejected() {
    let c = PhysicalConstants::default();
    for k in [1, 2, 6] {
        let tau = 0.5e-6;
        let seq = build_xy8(k, tau).unwrap();
        let tf = toggling_function(&seq).unwrap();
        let on = resonant_phase(&seq, tau, 1e-7);
        for phase in [0.0, 0.3, 1.9] {
            let off = ACSignal::single(Tone {
                amplitude: 1e-7,
                frequency: 1.0 / (4.0 * tau),
                phase,
            });
            let phi = accumulated_phase(&tf, &off, &c).unwrap();
            assert!(phi.abs() < 1e-6 * on.abs(), "k={k} phase={phase}: {phi} vs {on}");
        }
    }
}

#[test]
fn bin_centered_peak_frequency_is_exact() {
    let (m, dt) = (1000, 2e-6);
    for k in [3, 50, 377] {
        let f = k as f64 / (m as f64 * dt);
        let x: Vec<f64> = (0..m).map(|i| (2.0 * PI * f * i as f64 * dt + 0.7).cos()).collect();
        let s = periodogram(&x, dt).unwrap();
        assert_eq!(s.frequencies[s.dominant_bin().unwrap()], f);
    }
}

#[test]
fn three_tone_trace_resolves_three_peaks() {
    let (m, dt) = (3750, 0.4e-6);
    let tones = [0.998e6, 1.0e6, 1.002e6];
    // Undersampled at 2.5 MHz; the tones alias to distinct bins.
    let x: Vec<f64> = (0..m)
        .map(|i| {
            let t = i as f64 * dt;
            tones.iter().enumerate().map(|(j, f)| (2.0 * PI * f * t + j as f64).cos()).sum()
        })
        .collect();
    let s = periodogram(&x, dt).unwrap();
    let df = s.resolution();
    let fs = 1.0 / dt;
    let aliased: Vec<f64> = tones
        .iter()
        .map(|f| {
            let a = f.rem_euclid(fs);
            if a > fs / 2.0 {
                fs - a
            } else {
                a
            }
        })
        .collect();
    let peaks = s.peaks(3);
    assert_eq!(peaks.len(), 3);
    let mut found: Vec<f64> = peaks.iter().map(|&i| s.frequencies[i]).collect();
    found.sort_by(f64::total_cmp);
    let mut expected = aliased.clone();
    expected.sort_by(f64::total_cmp);
    for (a, b) in found.iter().zip(&expected) {
        assert!((a - b).abs() <= df, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn phase_is_linear_in_amplitude(
        b in 1e-9f64..1e-5,
        alpha in 0.01f64..100.0,
        f in 0.2e6f64..3e6,
        phase in -PI..PI,
        k in 1usize..8,
    ) {
        let tf = toggling_function(&build_xy8(k, 0.5e-6).unwrap()).unwrap();
        let c = PhysicalConstants::default();
        let one = accumulated_phase(&tf, &ACSignal::single(Tone { amplitude: b, frequency: f, phase }), &c).unwrap();
        let scaled = accumulated_phase(&tf, &ACSignal::single(Tone { amplitude: alpha * b, frequency: f, phase }), &c).unwrap();
        prop_assert!((scaled - alpha * one).abs() <= 1e-12 * (alpha * one).abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn phase_is_additive_over_tones(
        b1 in 1e-9f64..1e-6, b2 in 1e-9f64..1e-6,
        f1 in 0.5e6f64..2e6, f2 in 0.5e6f64..2e6,
    ) {
        let tf = toggling_function(&build_xy8(2, 0.5e-6).unwrap()).unwrap();
        let c = PhysicalConstants::default();
        let t1 = Tone { amplitude: b1, frequency: f1, phase: 0.1 };
        let t2 = Tone { amplitude: b2, frequency: f2, phase: -0.4 };
        let both = accumulated_phase(&tf, &ACSignal::new(vec![t1, t2]).unwrap(), &c).unwrap();
        let sum = accumulated_phase(&tf, &ACSignal::single(t1), &c).unwrap()
            + accumulated_phase(&tf, &ACSignal::single(t2), &c).unwrap();
        prop_assert!((both - sum).abs() <= 1e-12 * (both.abs() + sum.abs()) + 1e-18);
    }

    #[test]
    fn correlation_duration_identity(t_corr in 0.0f64..2e-3, k in 1usize..10) {
        let block = build_xy8(k, 0.5e-6).unwrap();
        let d0 = build_correlation(&block, 0.0).unwrap().total_duration;
        let d = build_correlation(&block, t_corr).unwrap().total_duration;
        // exact up to the single rounding of the sum
        prop_assert!((d - d0 - t_corr).abs() <= f64::EPSILON * d);
    }

    #[test]
    fn cauchy_schwarz(
        data in prop::collection::vec((-10.0f64..10.0, 0.01f64..5.0, -10.0f64..10.0), 1..60),
    ) {
        let (a, rest): (Vec<f64>, Vec<(f64, f64)>) = data.iter().map(|&(a, s, w)| (a, (s, w))).unzip();
        let (s, w): (Vec<f64>, Vec<f64>) = rest.into_iter().unzip();
        let series = ReadoutSeries::new(a, s, 1.0, 1.0).unwrap();
        let n = series.len();
        let opt = optimal_snr(&series, n).unwrap();
        if w.iter().any(|&x| x != 0.0) {
            prop_assert!(weighted_snr(&series, &w, n).unwrap() <= opt + 1e-12 * opt.max(1.0));
        }
        let ow = series.optimal_weights();
        if ow.iter().any(|&x| x != 0.0) {
            let eq = weighted_snr(&series, &ow, n).unwrap();
            prop_assert!((eq - opt).abs() <= 1e-12 * opt.max(1.0));
        }
    }

    #[test]
    fn optimal_snr_recurrence(amps in prop::collection::vec(-3.0f64..3.0, 1..40), sigma in 0.1f64..2.0) {
        let n = amps.len();
        let series = ReadoutSeries::new(amps.clone(), vec![sigma; n], 1.0, sigma).unwrap();
        let mut prev = 0.0f64;
        for k in 1..=n {
            let cur = optimal_snr(&series, k).unwrap();
            prop_assert!(cur >= prev);
            let expected = (prev * prev + (amps[k - 1] / sigma).powi(2)).sqrt();
            prop_assert!((cur - expected).abs() <= 1e-12 * cur.max(1.0));
            prev = cur;
        }
    }

    #[test]
    fn eta_monotone(
        r in 0.1f64..100.0,
        t_sense in 1e-6f64..2e-3,
        n in 1usize..5000,
    ) {
        let b = TimingBudget::new(t_sense, 16.5e-6, 3e-6, n).unwrap();
        let e = eta_qle(r, &b).unwrap();
        prop_assert!(eta_qle(r, &b.with_readouts(n + 1)).unwrap() < e);
        prop_assert!(eta_qle(r * 1.01, &b).unwrap() > e);
    }

    #[test]
    fn matched_reference_within_rounding(
        t_sense in 1e-6f64..2e-3,
        t_swap in 0.0f64..50e-6,
        t_qlr in 1e-6f64..10e-6,
        n in 1usize..5000,
    ) {
        let b = TimingBudget::new(t_sense, t_swap, t_qlr, n).unwrap();
        let m = matched_reference_count(&b).unwrap();
        let lhs = m.count as f64 * b.conventional_cycle_time();
        prop_assert!((lhs - b.qle_cycle_time()).abs() <= 0.5 * b.conventional_cycle_time() * (1.0 + 1e-12));
        prop_assert!((m.exact * b.conventional_cycle_time() - b.qle_cycle_time()).abs() <= 1e-12 * b.qle_cycle_time());
    }
}
