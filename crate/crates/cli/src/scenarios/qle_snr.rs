use qle_core::analysis::ReadoutSeries;
use qle_core::rng::stream;

use super::common::{averaged_sigma, bias_relaxation, gaussian, ReadoutTransfer};
use super::{summary_table, ScenarioError};
use crate::config::{AmplitudeModel, ExperimentConfig, QleSnrSettings};
use crate::output::Table;

fn series(config: &ExperimentConfig, s: &QleSnrSettings) -> Result<ReadoutSeries, ScenarioError> {
    let params = config.params();
    let relax = bias_relaxation(&params, &config.nuclear_model())?;
    let sigma = averaged_sigma(&params, s.averages);
    let series = match s.amplitude_model {
        AmplitudeModel::Exponential => ReadoutSeries::exponential_decay(
            s.n_max,
            params.contrast_c0,
            sigma,
            params.t_qlr,
            relax.t1,
        )?,
        AmplitudeModel::DensityMatrix => {
            let transfer = ReadoutTransfer::simulate(&params, &relax, s.n_max)?;
            ReadoutSeries::new(
                transfer.beta.iter().map(|b| b.abs()).collect(),
                vec![sigma; s.n_max],
                params.contrast_c0,
                sigma,
            )?
        }
    };
    Ok(series)
}

pub fn run(config: &ExperimentConfig, s: &QleSnrSettings) -> Result<Vec<Table>, ScenarioError> {
    let series = series(config, s)?;
    let snr = series.cumulative_optimal_snr()?;
    let reference = series.reference_snr();
    let mut rng = stream(config.seed, "qle_snr_vs_n/amplitude", 0);

    let mut table = Table::new(
        "snr",
        &["n", "amplitude", "sigma", "snr", "enhancement", "amplitude_measured"],
    );
    for (i, ((a, sg), q)) in series.amplitudes.iter().zip(&series.sigmas).zip(&snr).enumerate() {
        table.push(vec![
            (i + 1).into(),
            (*a).into(),
            (*sg).into(),
            (*q).into(),
            (q / reference).into(),
            (a + gaussian(&mut rng, *sg)).into(),
        ]);
    }

    let params = config.params();
    let t1 = bias_relaxation(&params, &config.nuclear_model())?.t1;
    let last = *snr.last().expect("n_max >= 1");
    let summary = summary_table(
        "summary",
        &[
            ("n_max", s.n_max as f64),
            ("nuclear_t1_s", t1),
            ("reference_snr", reference),
            ("snr_n_max", last),
            ("enhancement_n_max", last / reference),
        ],
    );
    Ok(vec![table, summary])
}
