use qle_core::analysis::{self, exponential_snr_curve, matched_reference_count, TimingBudget};

use super::common::{bias_relaxation, linspace, logspace};
use super::ScenarioError;
use crate::config::{EtaMapSettings, ExperimentConfig};
use crate::output::Table;

/// Readout counts evenly spaced in N, rounded and deduplicated.
pub(crate) fn n_axis(s: &EtaMapSettings) -> Vec<usize> {
    let mut n: Vec<usize> = linspace(s.n_min as f64, s.n_max as f64, s.n_points)
        .into_iter()
        .map(|x| x.round() as usize)
        .collect();
    n.dedup();
    n
}

pub fn run(config: &ExperimentConfig, s: &EtaMapSettings) -> Result<Vec<Table>, ScenarioError> {
    let params = config.params();
    let t1 = bias_relaxation(&params, &config.nuclear_model())?.t1;
    let curve = exponential_snr_curve(params.t_qlr, t1);
    let template = TimingBudget::new(s.t_sense_min.si(), params.t_swap, params.t_qlr, 1)?;
    let ns = n_axis(s);
    let ts = logspace(s.t_sense_min.si(), s.t_sense_max.si(), s.t_sense_points);
    let map = analysis::eta_map(&curve, &template, &ns, &ts)?;

    let mut long = Table::new(
        "eta_map",
        &[
            "t_sense_s",
            "n",
            "snr_ratio",
            "eta",
            "matched_reference_exact",
            "matched_reference",
        ],
    );
    let mut optimum = Table::new(
        "optimum",
        &["t_sense_s", "best_n", "best_eta", "eta_at_n_max"],
    );
    for (i, &t) in ts.iter().enumerate() {
        for (j, &n) in ns.iter().enumerate() {
            let budget = template.with_t_sense(t).with_readouts(n);
            let m = matched_reference_count(&budget)?;
            long.push(vec![
                t.into(),
                n.into(),
                curve(n).into(),
                map.eta[i][j].into(),
                m.exact.into(),
                m.count.into(),
            ]);
        }
        let b = map.best_n_index(i);
        optimum.push(vec![
            t.into(),
            ns[b].into(),
            map.eta[i][b].into(),
            (*map.eta[i].last().expect("nonempty axis")).into(),
        ]);
    }
    Ok(vec![long, optimum])
}
