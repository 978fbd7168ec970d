//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use qle_cli::config::{ExperimentConfig, OutputFormat, Scenario};
use qle_cli::output::Table;
use qle_cli::runner::{compute, run_scenario, RunOptions, MANIFEST_FILE};
use qle_core::analysis::{
    calibrate_field, eta_qle, fit_power_function, fit_power_law, fit_stretched_exponential,
    matched_reference_count, optimal_snr, weighted_snr, ReadoutSeries, TimingBudget,
};
use qle_core::model::{
    NuclearRelaxation, NuclearSpin, PhysicalConstants, QuantumState, SensorEnsembleParams,
};
use qle_core::rng::stream;
use qle_core::sequences::{
    accumulated_phase, b_ac_two_pi, build_xy8, toggling_function, ACSignal, Tone,
};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn gauss(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(outcome: Outcome, elapsed: Duration, budget: Option<Duration>) -> Outcome {
    match (outcome, budget) {
        (Ok(d), Some(b)) if elapsed > b => Err(format!("{d}; runtime {elapsed:?} exceeds {b:?}")),
        (o, _) => o,
    }
}

fn scenario_tables(scenario: Scenario) -> Result<Vec<Table>, String> {
    compute(&ExperimentConfig::defaults(scenario), 0).map_err(|e| e.to_string())
}

fn table<'a>(tables: &'a [Table], name: &str) -> &'a Table {
    tables.iter().find(|t| t.name == name).expect("table present")
}

/// Resonant aligned tone at B_AC(2π) accumulates 2π; N = 288 anchor at the NV g-factor.
fn criterion_1() -> Outcome {
    let c = PhysicalConstants::default();
    let f0 = 1e6;
    let mut worst: f64 = 0.0;
    for n in [8usize, 48, 288] {
        let tf = toggling_function(&build_xy8(n / 8, 0.5 / f0).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let b = b_ac_two_pi(f0, n, &c).map_err(|e| e.to_string())?;
        let tone = Tone::aligned(b, f0, tf.window_start);
        let phi = accumulated_phase(&tf, &ACSignal::single(tone), &c).map_err(|e| e.to_string())?;
        worst = worst.max((phi - 2.0 * PI).abs() / (2.0 * PI));
    }
    let anchor = b_ac_two_pi(f0, 288, &PhysicalConstants::nv()).map_err(|e| e.to_string())? * 1e6;
    let anchor_ok = format!("{anchor:.4}") == "0.3891";
    check(
        worst < 1e-9 && anchor_ok,
        format!("max rel err {worst:.2e} (< 1e-9); B_AC(2pi, N=288) = {anchor:.5} uT (expected 0.3891)"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = stream(2, "acceptance/weighting", 0);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_equality: f64 = 0.0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=40);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..2.0)).collect();
        let series = ReadoutSeries::new(a, s, 1.0, 1.0).map_err(|e| e.to_string())?;
        let opt = optimal_snr(&series, n).map_err(|e| e.to_string())?;
        let w: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
        let ws = weighted_snr(&series, &w, n).map_err(|e| e.to_string())?;
        worst_excess = worst_excess.max(ws - opt);
        let best = weighted_snr(&series, &series.optimal_weights(), n).map_err(|e| e.to_string())?;
        if opt > 0.0 {
            worst_equality = worst_equality.max((best - opt).abs() / opt);
        }
    }
    check(
        worst_excess <= 1e-12 && worst_equality <= 1e-12,
        format!(
            "max(weighted - optimal) = {worst_excess:.2e} (<= 1e-12); optimal-weight rel gap {worst_equality:.2e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let tables = scenario_tables(Scenario::QleSnrVsN)?;
    let e = table(&tables, "snr").floats("enhancement");
    let q = (-2.0 * 3e-6 / 3.44e-3_f64).exp();
    let mut oracle = 0.0;
    let mut term = 1.0;
    for _ in 0..2000 {
        term *= q;
        oracle += term;
    }
    let oracle = f64::sqrt(oracle);
    let last = *e.last().ok_or("empty table")?;
    let monotone = e.windows(2).all(|w| w[1] >= w[0]);
    let increments: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    let saturating = increments.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    check(
        e.len() == 2000
            && (last - 23.6).abs() <= 0.1
            && (last - oracle).abs() <= 1e-9 * oracle
            && monotone
            && saturating,
        format!(
            "enhancement(2000) = {last:.4} (23.6 +/- 0.1), oracle {oracle:.4}; monotone {monotone}, saturating {saturating}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = stream(4, "acceptance/eta", 0);
    let mut exact = true;
    for _ in 0..1000 {
        let r = rng.random_range(0.1..50.0);
        let b = TimingBudget::new(rng.random_range(1e-6..2e-3), 0.0, rng.random_range(1e-6..1e-5), 1)
            .map_err(|e| e.to_string())?;
        exact &= eta_qle(r, &b).map_err(|e| e.to_string())? == r;
    }

    let tables = scenario_tables(Scenario::EtaMap)?;
    let map = table(&tables, "eta_map");
    let t = map.floats("t_sense_s");
    let eta = map.floats("eta");
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for (ti, ei) in t.iter().zip(&eta) {
        match rows.last_mut() {
            Some((tl, v)) if tl == ti => v.push(*ei),
            _ => rows.push((*ti, vec![*ei])),
        }
    }
    let t_swap = 16.5e-6;
    let grid = rows.len() == 50 && rows.iter().all(|(_, v)| v.len() == 50);
    let above_one = rows
        .iter()
        .filter(|(ts, _)| *ts > t_swap)
        .all(|(_, v)| v.iter().any(|&x| x > 1.0));
    let mut mid_rows = 0;
    let decreasing = rows
        .iter()
        .filter(|(ts, _)| (200e-6..=600e-6).contains(ts))
        .all(|(_, v)| {
            mid_rows += 1;
            let best = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            best + 1 < v.len() && v[best..].windows(2).all(|w| w[1] < w[0])
        });
    check(
        exact && grid && above_one && decreasing && mid_rows > 0,
        format!(
            "eta(N=1, T_SWAP=0) == r exact: {exact}; 50x50 grid: {grid}; eta>1 for all T_sense>T_SWAP: {above_one}; \
             decreasing past optimum in {mid_rows} rows at 200-600 us: {decreasing}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = stream(5, "acceptance/matched", 0);
    let mut worst_units: f64 = 0.0;
    let mut worst_round: f64 = 0.0;
    for _ in 0..1000 {
        let b = TimingBudget::new(
            rng.random_range(1e-6..2e-3),
            rng.random_range(0.0..50e-6),
            rng.random_range(1e-6..1e-5),
            rng.random_range(1..5000),
        )
        .map_err(|e| e.to_string())?;
        let m = matched_reference_count(&b).map_err(|e| e.to_string())?;
        let lhs = m.exact * (b.t_sense + b.t_qlr);
        let rhs = b.t_sense + b.t_swap + b.n_readouts as f64 * b.t_qlr;
        worst_units = worst_units.max((lhs - rhs).abs() / (f64::EPSILON * rhs));
        worst_round = worst_round.max((m.count as f64 - m.exact).abs());
    }
    let example = TimingBudget::new(750e-6, 16.5e-6, 3e-6, 1000).map_err(|e| e.to_string())?;
    let m = matched_reference_count(&example).map_err(|e| e.to_string())?;
    check(
        worst_units <= 1.0 && worst_round <= 0.5 && (m.exact - 5.002).abs() <= 1e-3,
        format!(
            "max identity error {worst_units:.2} ulp (<= 1), max |count - exact| {worst_round:.3}; \
             M(750 us, 16.5 us, 3 us, 1000) = {:.5}",
            m.exact
        ),
    )
}

fn criterion_6() -> Outcome {
    let v_two_pi = 0.0670;
    let b_two_pi = 0.3891e-6;
    let v: Vec<f64> = (0..41).map(|i| i as f64 * 0.005).collect();
    let model = |x: f64| 0.02 * (2.0 * PI * x / v_two_pi + 0.3).sin() + 0.01;
    let clean: Vec<f64> = v.iter().map(|&x| model(x)).collect();
    let exact = calibrate_field(&v, &clean, b_two_pi).map_err(|e| e.to_string())?;
    let truth = b_two_pi / v_two_pi;
    let noiseless = (exact.tesla_per_volt - truth).abs() / truth;

    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let mut rng = stream(6, "acceptance/calibration", k);
        let noisy: Vec<f64> = clean.iter().map(|c| c + 0.0002 * gauss(&mut rng)).collect();
        let cal = calibrate_field(&v, &noisy, b_two_pi).map_err(|e| e.to_string())?;
        worst = worst.max((cal.tesla_per_volt * 1e6 - 5.806).abs() / 5.806);
    }
    check(
        noiseless <= 1e-6 && worst <= 5e-3,
        format!(
            "noiseless rel err {noiseless:.2e} (<= 1e-6); worst of 100 datasets at 1% noise {:.3}% from 5.806 uT/V (<= 0.5%)",
            worst * 100.0
        ),
    )
}

fn criterion_7() -> Outcome {
    let tables = scenario_tables(Scenario::CorrelationThreetone)?;
    let peaks = table(&tables, "peaks");
    let offsets = peaks.floats("offset_bins");
    let ratios = peaks.floats("ratio");
    let ok = peaks.rows.len() == 3
        && offsets.iter().all(|o| o.abs() <= 1.0)
        && ratios.iter().all(|&r| r >= 10.0);
    let worst_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        ok,
        format!(
            "{} peaks, offsets {offsets:?} bins (<= 1), min peak/floor {worst_ratio:.1} (>= 10)",
            peaks.rows.len()
        ),
    )
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

fn criterion_8() -> Outcome {
    const DATASETS: u64 = 100;
    // Stretched exponential: T₁ unbiased within 3 standard errors.
    let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.3e-3).collect();
    let mut t1s = Vec::new();
    for k in 0..DATASETS {
        let mut rng = stream(8, "acceptance/stretched", k);
        let y: Vec<f64> = t
            .iter()
            .map(|&x| 0.5 * (-(x / 3.44e-3).powf(0.8)).exp() + 0.005 * gauss(&mut rng))
            .collect();
        let r = fit_stretched_exponential(&t, &y).map_err(|e| e.to_string())?;
        t1s.push(r.params[1]);
    }
    let (m, sd) = mean_sd(&t1s);
    let stretched_ok = (m - 3.44e-3).abs() < 3.0 * sd / (DATASETS as f64).sqrt();

    // Power function a·P^(−b) + c at 1% noise: b within ±0.03.
    let p: Vec<f64> = (0..24).map(|i| 300f64.powf(i as f64 / 23.0)).collect();
    let mut worst_b: f64 = 0.0;
    for k in 0..DATASETS {
        let mut rng = stream(8, "acceptance/power-function", k);
        let y: Vec<f64> = p
            .iter()
            .map(|&x| (4.003e4 * x.powf(-0.5154) + 111.0) * (1.0 + 0.01 * gauss(&mut rng)))
            .collect();
        let r = fit_power_function(&p, &y).map_err(|e| e.to_string())?;
        worst_b = worst_b.max((r.params[1] - 0.5154).abs());
    }

    // Field power law over 8 points at 3% noise: exponent within ±0.15.
    let b: Vec<f64> = (0..8).map(|i| 1000.0 + 3000.0 * i as f64 / 7.0).collect();
    let mut worst_p: f64 = 0.0;
    for k in 0..DATASETS {
        let mut rng = stream(8, "acceptance/power-law", k);
        let y: Vec<f64> = b
            .iter()
            .map(|&x| 3.44e-3 * (x / 3700.0).powf(1.8) * (1.0 + 0.03 * gauss(&mut rng)))
            .collect();
        let r = fit_power_law(&b, &y).map_err(|e| e.to_string())?;
        worst_p = worst_p.max((r.params[1] - 1.8).abs());
    }
    check(
        stretched_ok && worst_b <= 0.03 && worst_p <= 0.15,
        format!(
            "stretched-exp T1 bias {:.2e} s (3 SE = {:.2e}); worst |b - 0.5154| = {worst_b:.4} (<= 0.03); \
             worst |p - 1.8| = {worst_p:.3} (<= 0.15); {DATASETS} datasets each",
            m - 3.44e-3,
            3.0 * sd / (DATASETS as f64).sqrt()
        ),
    )
}

fn physical(s: &QuantumState) -> bool {
    let tr = s.trace();
    (tr.re - 1.0).abs() < 1e-9
        && tr.im.abs() < 1e-9
        && s.hermiticity_error() < 1e-9
        && s.min_eigenvalue() > -1e-9
}

fn criterion_9() -> Outcome {
    let ideal = SensorEnsembleParams {
        swap_fidelity: 1.0,
        ..SensorEnsembleParams::default()
    };
    let down = QuantumState::initial();
    let up = down.apply_sensing_phase(PI, 1.0).map_err(|e| e.to_string())?;
    let pd = down.apply_swap(&ideal).map_err(|e| e.to_string())?.nuclear_polarization();
    let pu = up.apply_swap(&ideal).map_err(|e| e.to_string())?.nuclear_polarization();
    let ideal_ok = pd == 1.0 && pu == -1.0;
    let real = down
        .apply_swap(&SensorEnsembleParams::default())
        .map_err(|e| e.to_string())?
        .nuclear_polarization();

    let mut rng = stream(9, "acceptance/fuzz", 0);
    let mut state = QuantumState::initial();
    let mut fuzz_ok = true;
    for _ in 0..10_000 {
        let params = SensorEnsembleParams {
            swap_fidelity: rng.random(),
            repolarization_fraction: rng.random(),
            ..SensorEnsembleParams::default()
        };
        let f: f64 = rng.random();
        let next = match rng.random_range(0..7) {
            0 => state.apply_cnot_e_given_n(f),
            1 => state.apply_cnot_n_given_e(f),
            2 => state.apply_conditional_electron_flip(NuclearSpin::Up, f),
            3 => state.apply_swap(&params),
            4 => {
                let relax = NuclearRelaxation {
                    t1: rng.random_range(1e-5..1e-2),
                    beta: rng.random_range(0.3..2.0),
                };
                state.apply_optical_pulse(rng.random_range(0.0..20e-6), &params, &relax)
            }
            5 => state.apply_sensing_phase(rng.random_range(-10.0..10.0), rng.random()),
            _ => state.apply_correlation_phases(
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random(),
            ),
        };
        match next {
            Ok(s) if physical(&s) => state = s,
            _ => {
                fuzz_ok = false;
                break;
            }
        }
    }
    check(
        ideal_ok && (real - 0.93).abs() <= 1e-12 && fuzz_ok,
        format!(
            "ideal SWAP polarization {pd} / {pu}; at F = 0.93 transferred {real:.15}; 1e4-step fuzz invariants hold: {fuzz_ok}"
        ),
    )
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.file_name().is_some_and(|n| n != MANIFEST_FILE))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read(&p).expect("readable output"))
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for scenario in Scenario::ALL {
        let config = ExperimentConfig::defaults(scenario);
        let mut outputs = Vec::new();
        for (run, threads) in [(0, 1usize), (1, 4)] {
            let dir = root.path().join(format!("{}-{run}", scenario.name()));
            let opts = RunOptions {
                out_dir: dir.clone(),
                threads,
                format: OutputFormat::Csv,
            };
            run_scenario(&config, &opts).map_err(|e| format!("{scenario}: {e}"))?;
            outputs.push(data_files(&dir));
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{scenario}: outputs differ between 1 and 4 threads"));
        }
        compared += outputs[0].len();
    }
    check(
        true,
        format!("{} scenarios x 2 runs (1 vs 4 threads): {compared} data files byte-identical", Scenario::ALL.len()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 phase consistency", criterion_1, Some(Duration::from_secs(1))),
        ("2 weighting optimality", criterion_2, Some(Duration::from_secs(10))),
        ("3 SNR growth", criterion_3, None),
        ("4 enhancement factor", criterion_4, Some(Duration::from_secs(5))),
        ("5 matched reference", criterion_5, None),
        ("6 calibration", criterion_6, None),
        ("7 spectral resolution", criterion_7, Some(Duration::from_secs(30))),
        ("8 fit recovery", criterion_8, Some(Duration::from_secs(60))),
        ("9 protocol fidelity", criterion_9, None),
        ("10 determinism", criterion_10, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match within_budget(outcome, elapsed, budget) {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
