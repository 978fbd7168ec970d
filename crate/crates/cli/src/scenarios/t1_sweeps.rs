//! Nuclear T₁ under illumination versus bias field and versus laser power.

use qle_core::analysis::{fit_power_function, fit_power_law, fit_stretched_exponential, FitResult};
use qle_core::model::{NuclearRelaxation, QuantumState, SensorEnsembleParams};
use qle_core::rng::stream;
use rayon::prelude::*;

use super::common::{averaged_sigma, gaussian, linspace, logspace, swap_and_reset};
use super::ScenarioError;
use crate::config::{ExperimentConfig, FieldSweepSettings, LaserSweepSettings};
use crate::output::{Cell, Table};

struct Sweep {
    t_op_min: f64,
    t_op_max_factor: f64,
    t_op_points: usize,
    averages: u64,
}

struct PointResult {
    decay_rows: Vec<Vec<Cell>>,
    t1_model: f64,
    fit: FitResult,
}

/// Differential nuclear readout after an optical pulse of length `t_op`:
/// contrast with SWAP minus contrast without, each read through one CNOT_e|n.
fn differential_signal(
    params: &SensorEnsembleParams,
    relax: &NuclearRelaxation,
    t_op: f64,
) -> Result<f64, ScenarioError> {
    let f = params.per_gate_fidelity();
    let read = |s: QuantumState| -> Result<f64, ScenarioError> {
        Ok(s.apply_optical_pulse(t_op, params, relax)?
            .apply_cnot_e_given_n(f)?
            .mean_contrast(params))
    };
    let init = QuantumState::initial();
    let swapped = swap_and_reset(&init, params, relax)?;
    let reference = init.apply_optical_pulse(params.t_op, params, relax)?;
    Ok(read(swapped)? - read(reference)?)
}

fn measure_point(
    config: &ExperimentConfig,
    label: &str,
    index: usize,
    coord: f64,
    relax: NuclearRelaxation,
    sweep: &Sweep,
) -> Result<PointResult, ScenarioError> {
    let params = config.params();
    let sigma = averaged_sigma(&params, sweep.averages) * std::f64::consts::SQRT_2;
    let t_ops = linspace(
        sweep.t_op_min,
        (sweep.t_op_max_factor * relax.t1).max(2.0 * sweep.t_op_min),
        sweep.t_op_points,
    );
    let mut rng = stream(config.seed, label, index as u64);
    let mut rows = Vec::with_capacity(t_ops.len());
    let mut ys = Vec::with_capacity(t_ops.len());
    for &t in &t_ops {
        let model = differential_signal(&params, &relax, t)?;
        let y = model + gaussian(&mut rng, sigma);
        ys.push(y);
        rows.push(vec![coord.into(), t.into(), y.into(), model.into(), sigma.into()]);
    }
    let fit = fit_stretched_exponential(&t_ops, &ys)?;
    Ok(PointResult {
        decay_rows: rows,
        t1_model: relax.t1,
        fit,
    })
}

fn assemble(
    coord_name: &str,
    coords: &[f64],
    results: Vec<PointResult>,
) -> (Table, Table) {
    let mut decay = Table::new(
        "decay",
        &[coord_name, "t_op_s", "signal", "model", "sigma"],
    );
    let mut t1 = Table::new(
        "t1",
        &[coord_name, "t1_model_s", "t1_fit_s", "t1_fit_sigma_s", "beta_fit", "amplitude_fit"],
    );
    for (c, r) in coords.iter().zip(results) {
        decay.rows.extend(r.decay_rows);
        t1.push(vec![
            (*c).into(),
            r.t1_model.into(),
            r.fit.params[1].into(),
            r.fit.uncertainties[1].into(),
            r.fit.params[2].into(),
            r.fit.params[0].into(),
        ]);
    }
    (decay, t1)
}

fn fit_table(names: &[&str], fit: &FitResult) -> Table {
    let mut t = Table::new("fit", &["parameter", "value", "sigma"]);
    for (i, n) in names.iter().enumerate() {
        t.push(vec![(*n).into(), fit.params[i].into(), fit.uncertainties[i].into()]);
    }
    t.push(vec!["residual_norm".into(), fit.residual_norm.into(), 0.0.into()]);
    t
}

/// T₁ = a·B^p from stretched-exponential fits at each field.
pub fn run_field(config: &ExperimentConfig, s: &FieldSweepSettings) -> Result<Vec<Table>, ScenarioError> {
    let model = config.nuclear_model();
    let fields_g = linspace(s.field_min.gauss(), s.field_max.gauss(), s.fields);
    let sweep = Sweep {
        t_op_min: s.t_op_min.si(),
        t_op_max_factor: s.t_op_max_factor,
        t_op_points: s.t_op_points,
        averages: s.averages,
    };
    let results = fields_g
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            let relax = NuclearRelaxation {
                t1: model.t1_vs_field(b)?,
                beta: model.stretch_beta,
            };
            measure_point(config, "nuclear_t1_field_sweep/decay", i, b, relax, &sweep)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (decay, t1) = assemble("field_g", &fields_g, results);
    let fit = fit_power_law(&t1.floats("field_g"), &t1.floats("t1_fit_s"))?;
    Ok(vec![decay, t1, fit_table(&["prefactor_s_per_g_pow", "exponent"], &fit)])
}

/// T₁ = a·P^(−b) + c (µs, P in mW) from stretched-exponential fits at each power.
pub fn run_laser(config: &ExperimentConfig, s: &LaserSweepSettings) -> Result<Vec<Table>, ScenarioError> {
    let model = config.nuclear_model();
    let powers = logspace(s.power_min.milliwatts(), s.power_max.milliwatts(), s.powers);
    let sweep = Sweep {
        t_op_min: s.t_op_min.si(),
        t_op_max_factor: s.t_op_max_factor,
        t_op_points: s.t_op_points,
        averages: s.averages,
    };
    let results = powers
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let relax = NuclearRelaxation {
                t1: model.t1_vs_laser(p)?,
                beta: model.stretch_beta,
            };
            measure_point(config, "nuclear_t1_laser_sweep/decay", i, p, relax, &sweep)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (decay, t1) = assemble("power_mw", &powers, results);
    let t1_us: Vec<f64> = t1.floats("t1_fit_s").iter().map(|t| t * 1e6).collect();
    let fit = fit_power_function(&t1.floats("power_mw"), &t1_us)?;
    Ok(vec![decay, t1, fit_table(&["a_us", "b", "c_us"], &fit)])
}
