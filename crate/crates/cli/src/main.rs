use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qle_cli::config::{parse_config, ConfigError, ExperimentConfig, OutputFormat, Scenario};
use qle_cli::runner::{resolve_out_dir, run_scenario, RunError, RunOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qle", version, about = "Run quantum-logic-enhanced sensing scenarios")]
struct Cli {
    /// Master RNG seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file and QLE_OUT_DIR.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Config file; its scenario must match the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in a config file.
    Run { config: PathBuf },
    #[command(name = "odmr_swap", alias = "odmr-swap")]
    OdmrSwap(ScenarioArgs),
    #[command(name = "nuclear_t1_field_sweep", alias = "nuclear-t1-field-sweep")]
    NuclearT1FieldSweep(ScenarioArgs),
    #[command(name = "nuclear_t1_laser_sweep", alias = "nuclear-t1-laser-sweep")]
    NuclearT1LaserSweep(ScenarioArgs),
    #[command(name = "qle_snr_vs_n", alias = "qle-snr-vs-n")]
    QleSnrVsN(ScenarioArgs),
    #[command(name = "correlation_threetone", alias = "correlation-threetone")]
    CorrelationThreetone(ScenarioArgs),
    #[command(name = "sensitivity_vs_duration", alias = "sensitivity-vs-duration")]
    SensitivityVsDuration(ScenarioArgs),
    #[command(name = "eta_map", alias = "eta-map")]
    EtaMap(ScenarioArgs),
    #[command(name = "density_projection", alias = "density-projection")]
    DensityProjection(ScenarioArgs),
}

fn read_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        RunError::Output(qle_cli::output::OutputError::io(path, e))
    })?;
    Ok(parse_config(&text)?)
}

fn load(command: &Command) -> Result<ExperimentConfig, RunError> {
    let (scenario, args) = match command {
        Command::Run { config } => return read_config(config),
        Command::OdmrSwap(a) => (Scenario::OdmrSwap, a),
        Command::NuclearT1FieldSweep(a) => (Scenario::NuclearT1FieldSweep, a),
        Command::NuclearT1LaserSweep(a) => (Scenario::NuclearT1LaserSweep, a),
        Command::QleSnrVsN(a) => (Scenario::QleSnrVsN, a),
        Command::CorrelationThreetone(a) => (Scenario::CorrelationThreetone, a),
        Command::SensitivityVsDuration(a) => (Scenario::SensitivityVsDuration, a),
        Command::EtaMap(a) => (Scenario::EtaMap, a),
        Command::DensityProjection(a) => (Scenario::DensityProjection, a),
    };
    match &args.config {
        None => Ok(ExperimentConfig::defaults(scenario)),
        Some(path) => {
            let config = read_config(path)?;
            if config.scenario != scenario {
                return Err(ConfigError::Invalid(format!(
                    "config file is for scenario {}, not {scenario}",
                    config.scenario
                ))
                .into());
            }
            Ok(config)
        }
    }
}

fn execute(cli: &Cli) -> Result<serde_json::Value, RunError> {
    let mut config = load(&cli.command)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let format = match cli.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => config.output.format,
    };
    let options = RunOptions {
        out_dir: resolve_out_dir(cli.out_dir.as_deref(), &config),
        threads: cli.threads,
        format,
    };
    let manifest = run_scenario(&config, &options)?;
    Ok(json!({
        "status": "ok",
        "out_dir": options.out_dir.display().to_string(),
        "manifest": manifest,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = json!({ "status": "error", "kind": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
