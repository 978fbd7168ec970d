//! Experiment configuration: a TOML document with unit-suffixed quantities.
//!
//! ```toml
//! scenario = "qle_snr_vs_n"
//! seed = 7
//!
//! [sensor]
//! t_qlr = "3 us"
//!
//! [qle_snr_vs_n]
//! n_max = 2000
//! ```
//!
//! Every table is optional and filled from defaults. Unknown keys are rejected.
//! Only the settings table named after the selected scenario may appear.

use qle_core::model::SensorEnsembleParams;
use qle_core::noise::{ElectronCoherenceModel, NuclearT1Model};
use qle_core::sequences::{ACSignal, SequenceFamily, Tone};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{Field, Frequency, Power, Time, UNIT_ERROR_PREFIX};

/// Dialect tag written into run manifests.
pub const CONFIG_FORMAT: &str = "qle-toml/1";

pub const DEFAULT_SEED: u64 = 0x51_4c_45;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key at line {line}: {message}")]
    UnknownKey { line: usize, message: String },
    #[error("{message} (line {line})")]
    UnitMismatch { line: usize, message: String },
    #[error("unknown scenario `{name}`; valid scenarios are {}", valid.join(", "))]
    UnknownScenario { name: String, valid: Vec<String> },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Syntax { .. } => "syntax",
            ConfigError::UnknownKey { .. } => "unknown_key",
            ConfigError::UnitMismatch { .. } => "unit_mismatch",
            ConfigError::UnknownScenario { .. } => "unknown_scenario",
            ConfigError::Invalid(_) => "invalid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    OdmrSwap,
    NuclearT1FieldSweep,
    NuclearT1LaserSweep,
    QleSnrVsN,
    CorrelationThreetone,
    SensitivityVsDuration,
    EtaMap,
    DensityProjection,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::OdmrSwap,
        Scenario::NuclearT1FieldSweep,
        Scenario::NuclearT1LaserSweep,
        Scenario::QleSnrVsN,
        Scenario::CorrelationThreetone,
        Scenario::SensitivityVsDuration,
        Scenario::EtaMap,
        Scenario::DensityProjection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::OdmrSwap => "odmr_swap",
            Scenario::NuclearT1FieldSweep => "nuclear_t1_field_sweep",
            Scenario::NuclearT1LaserSweep => "nuclear_t1_laser_sweep",
            Scenario::QleSnrVsN => "qle_snr_vs_n",
            Scenario::CorrelationThreetone => "correlation_threetone",
            Scenario::SensitivityVsDuration => "sensitivity_vs_duration",
            Scenario::EtaMap => "eta_map",
            Scenario::DensityProjection => "density_projection",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| ConfigError::UnknownScenario {
                name: name.to_string(),
                valid: Self::ALL.iter().map(|s| s.name().to_string()).collect(),
            })
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSection {
    pub bias_field: Field,
    pub laser_power: Power,
    pub contrast_c0: f64,
    pub photons_per_readout: f64,
    pub swap_fidelity: f64,
    pub repolarization_fraction: f64,
    pub t_op: Time,
    pub t_swap: Time,
    pub t_qlr: Time,
    pub t2_star: Time,
    pub t2_hahn: Time,
    pub t2_xy8_sat: Time,
    pub nv_density_ppm: f64,
    pub n_density_ppm: f64,
}

impl Default for SensorSection {
    fn default() -> Self {
        let p = SensorEnsembleParams::default();
        Self {
            bias_field: Field::from_gauss(p.bias_field),
            laser_power: Power::from_milliwatts(p.laser_power),
            contrast_c0: p.contrast_c0,
            photons_per_readout: p.photons_per_readout,
            swap_fidelity: p.swap_fidelity,
            repolarization_fraction: p.repolarization_fraction,
            t_op: Time(p.t_op),
            t_swap: Time(p.t_swap),
            t_qlr: Time(p.t_qlr),
            t2_star: Time(p.t2_star),
            t2_hahn: Time(p.t2_hahn),
            t2_xy8_sat: Time(p.t2_xy8_sat),
            nv_density_ppm: p.nv_density_ppm,
            n_density_ppm: p.n_density_ppm,
        }
    }
}

impl SensorSection {
    pub fn params(&self) -> SensorEnsembleParams {
        SensorEnsembleParams {
            bias_field: self.bias_field.gauss(),
            laser_power: self.laser_power.milliwatts(),
            contrast_c0: self.contrast_c0,
            photons_per_readout: self.photons_per_readout,
            swap_fidelity: self.swap_fidelity,
            repolarization_fraction: self.repolarization_fraction,
            t_op: self.t_op.si(),
            t_swap: self.t_swap.si(),
            t_qlr: self.t_qlr.si(),
            t2_star: self.t2_star.si(),
            t2_hahn: self.t2_hahn.si(),
            t2_xy8_sat: self.t2_xy8_sat.si(),
            nv_density_ppm: self.nv_density_ppm,
            n_density_ppm: self.n_density_ppm,
        }
    }
}

/// Nuclear T₁ model. The laser law a·P^(−b) + c takes P in mW and returns µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NuclearSection {
    pub reference_field: Field,
    pub reference_t1: Time,
    pub field_exponent: f64,
    pub laser_a: f64,
    pub laser_b: f64,
    pub laser_c: f64,
    pub stretch_beta: f64,
}

impl Default for NuclearSection {
    fn default() -> Self {
        let m = NuclearT1Model::default();
        Self {
            reference_field: Field::from_gauss(m.reference_field),
            reference_t1: Time(m.reference_t1),
            field_exponent: m.field_exponent,
            laser_a: m.laser_a,
            laser_b: m.laser_b,
            laser_c: m.laser_c,
            stretch_beta: m.stretch_beta,
        }
    }
}

impl NuclearSection {
    pub fn model(&self) -> NuclearT1Model {
        NuclearT1Model {
            reference_field: self.reference_field.gauss(),
            reference_t1: self.reference_t1.si(),
            field_exponent: self.field_exponent,
            laser_a: self.laser_a,
            laser_b: self.laser_b,
            laser_c: self.laser_c,
            stretch_beta: self.stretch_beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElectronSection {
    pub t2_scaling_exponent: f64,
    pub droid_scaling_exponent: f64,
    pub stretch_beta: f64,
    /// Population lifetime during the correlation delay; absent means no decay.
    pub t_corr_t1: Option<Time>,
}

impl Default for ElectronSection {
    fn default() -> Self {
        let m = ElectronCoherenceModel::default();
        Self {
            t2_scaling_exponent: m.t2_scaling_exponent,
            droid_scaling_exponent: m.droid_scaling_exponent,
            stretch_beta: m.stretch_beta,
            t_corr_t1: m.t_corr_t1.map(Time),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneSpec {
    pub amplitude: Field,
    pub frequency: Frequency,
    /// Phase at t = 0 (rad); ignored by scenarios that randomize it.
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub tones: Vec<ToneSpec>,
}

impl SignalSection {
    /// Equal-amplitude tones at 0.998, 1.000 and 1.002 MHz.
    pub fn three_tone() -> Self {
        let tone = |f: f64| ToneSpec {
            amplitude: Field(0.15e-6),
            frequency: Frequency(f),
            phase: 0.0,
        };
        Self {
            tones: vec![tone(0.998e6), tone(1.0e6), tone(1.002e6)],
        }
    }

    pub fn signal(&self) -> ACSignal {
        ACSignal {
            tones: self
                .tones
                .iter()
                .map(|t| Tone {
                    amplitude: t.amplitude.si(),
                    frequency: t.frequency.si(),
                    phase: t.phase,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory; the CLI flag and environment variable take precedence.
    pub dir: Option<String>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdmrSettings {
    /// Half-width of the detuning sweep around the electron transition.
    pub span: Frequency,
    pub points: usize,
    /// ¹⁵N hyperfine splitting of the electron transition.
    pub hyperfine: Frequency,
    pub rabi_frequency: Frequency,
    pub averages: u64,
}

impl Default for OdmrSettings {
    fn default() -> Self {
        Self {
            span: Frequency(6e6),
            points: 241,
            hyperfine: Frequency(3.03e6),
            rabi_frequency: Frequency(0.5e6),
            averages: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSweepSettings {
    pub field_min: Field,
    pub field_max: Field,
    pub fields: usize,
    pub t_op_min: Time,
    /// Longest optical pulse as a multiple of the model T₁ at each point.
    pub t_op_max_factor: f64,
    pub t_op_points: usize,
    pub averages: u64,
}

impl Default for FieldSweepSettings {
    fn default() -> Self {
        Self {
            field_min: Field::from_gauss(1000.0),
            field_max: Field::from_gauss(4000.0),
            fields: 8,
            t_op_min: Time(30e-6),
            t_op_max_factor: 4.0,
            t_op_points: 40,
            averages: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaserSweepSettings {
    pub power_min: Power,
    pub power_max: Power,
    /// Log-spaced powers between the bounds.
    pub powers: usize,
    pub t_op_min: Time,
    pub t_op_max_factor: f64,
    pub t_op_points: usize,
    pub averages: u64,
}

impl Default for LaserSweepSettings {
    fn default() -> Self {
        Self {
            power_min: Power::from_milliwatts(1.0),
            power_max: Power::from_milliwatts(300.0),
            powers: 24,
            t_op_min: Time(30e-6),
            t_op_max_factor: 4.0,
            t_op_points: 40,
            averages: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeModel {
    /// Aₙ = A_ref·exp(−n·t_qlr/T₁).
    #[default]
    Exponential,
    /// Aₙ from the density-matrix simulation of SWAP and readout cycles.
    DensityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QleSnrSettings {
    pub n_max: usize,
    pub amplitude_model: AmplitudeModel,
    /// Shots averaged into each simulated per-cycle amplitude.
    pub averages: u64,
}

impl Default for QleSnrSettings {
    fn default() -> Self {
        Self {
            n_max: 2000,
            amplitude_model: AmplitudeModel::Exponential,
            averages: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelationSettings {
    pub block: SequenceFamily,
    pub repetitions: usize,
    pub tau: Time,
    pub t_corr_step: Time,
    pub points: usize,
    pub n_readouts: usize,
    pub averages: u64,
}

impl Default for CorrelationSettings {
    fn default() -> Self {
        Self {
            block: SequenceFamily::Xy8,
            repetitions: 6,
            tau: Time(0.5e-6),
            t_corr_step: Time(0.4e-6),
            points: 3750,
            n_readouts: 2000,
            averages: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivitySettings {
    pub tau: Time,
    pub max_duration: Time,
    pub families: Vec<SequenceFamily>,
    pub averages: u64,
}

impl Default for SensitivitySettings {
    fn default() -> Self {
        Self {
            tau: Time(0.5e-6),
            max_duration: Time(400e-6),
            families: vec![SequenceFamily::Xy8, SequenceFamily::Droid60],
            averages: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EtaMapSettings {
    pub n_min: usize,
    pub n_max: usize,
    pub n_points: usize,
    pub t_sense_min: Time,
    pub t_sense_max: Time,
    pub t_sense_points: usize,
}

impl Default for EtaMapSettings {
    fn default() -> Self {
        Self {
            n_min: 1,
            n_max: 2000,
            n_points: 50,
            t_sense_min: Time(5e-6),
            t_sense_max: Time(1500e-6),
            t_sense_points: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityProjectionSettings {
    pub densities_ppm: Vec<f64>,
    pub tau: Time,
    pub max_repetitions: usize,
    pub n_max: usize,
}

impl Default for DensityProjectionSettings {
    fn default() -> Self {
        Self {
            densities_ppm: vec![0.5, 0.8, 1.0, 2.0, 5.0, 10.0, 14.0, 20.0],
            tau: Time(0.5e-6),
            max_repetitions: 5000,
            n_max: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scenario")]
pub enum ScenarioSettings {
    OdmrSwap(OdmrSettings),
    NuclearT1FieldSweep(FieldSweepSettings),
    NuclearT1LaserSweep(LaserSweepSettings),
    QleSnrVsN(QleSnrSettings),
    CorrelationThreetone(CorrelationSettings),
    SensitivityVsDuration(SensitivitySettings),
    EtaMap(EtaMapSettings),
    DensityProjection(DensityProjectionSettings),
}

impl ScenarioSettings {
    pub fn default_for(scenario: Scenario) -> Self {
        match scenario {
            Scenario::OdmrSwap => Self::OdmrSwap(Default::default()),
            Scenario::NuclearT1FieldSweep => Self::NuclearT1FieldSweep(Default::default()),
            Scenario::NuclearT1LaserSweep => Self::NuclearT1LaserSweep(Default::default()),
            Scenario::QleSnrVsN => Self::QleSnrVsN(Default::default()),
            Scenario::CorrelationThreetone => Self::CorrelationThreetone(Default::default()),
            Scenario::SensitivityVsDuration => Self::SensitivityVsDuration(Default::default()),
            Scenario::EtaMap => Self::EtaMap(Default::default()),
            Scenario::DensityProjection => Self::DensityProjection(Default::default()),
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub sensor: SensorSection,
    pub nuclear_t1: NuclearSection,
    pub electron: ElectronSection,
    pub signal: SignalSection,
    pub output: OutputSection,
    pub settings: ScenarioSettings,
}

impl ExperimentConfig {
    /// Defaults for `scenario`.
    pub fn defaults(scenario: Scenario) -> Self {
        Self {
            scenario,
            seed: DEFAULT_SEED,
            sensor: SensorSection::default(),
            nuclear_t1: NuclearSection::default(),
            electron: ElectronSection::default(),
            signal: SignalSection::three_tone(),
            output: OutputSection::default(),
            settings: ScenarioSettings::default_for(scenario),
        }
    }

    pub fn params(&self) -> SensorEnsembleParams {
        self.sensor.params()
    }

    pub fn nuclear_model(&self) -> NuclearT1Model {
        self.nuclear_t1.model()
    }

    /// Coherence model; T₂ values come from the sensor table.
    pub fn coherence_model(&self) -> ElectronCoherenceModel {
        ElectronCoherenceModel {
            t2_hahn: self.sensor.t2_hahn.si(),
            t2_xy8_sat: self.sensor.t2_xy8_sat.si(),
            t2_scaling_exponent: self.electron.t2_scaling_exponent,
            droid_scaling_exponent: self.electron.droid_scaling_exponent,
            stretch_beta: self.electron.stretch_beta,
            n_density_ppm: self.sensor.n_density_ppm,
            t_corr_t1: self.electron.t_corr_t1.map(Time::si),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.params().validate().map_err(|e| invalid(&e))?;
        self.nuclear_model().validate().map_err(|e| invalid(&e))?;
        self.coherence_model().validate().map_err(|e| invalid(&e))?;
        self.signal.signal().validate().map_err(|e| invalid(&e))?;
        self.validate_settings()
    }

    fn validate_settings(&self) -> Result<(), ConfigError> {
        let need = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{}: {msg}", self.scenario)))
            }
        };
        match &self.settings {
            ScenarioSettings::OdmrSwap(s) => {
                need(s.points >= 2, "points must be at least 2")?;
                need(s.span.si() > 0.0, "span must be positive")?;
                need(s.rabi_frequency.si() > 0.0, "rabi_frequency must be positive")?;
                need(s.averages >= 1, "averages must be at least 1")
            }
            ScenarioSettings::NuclearT1FieldSweep(s) => {
                need(s.fields >= 4, "at least 4 fields are needed for the power-law fit")?;
                need(
                    s.field_min.si() > 0.0 && s.field_max.si() > s.field_min.si(),
                    "need 0 < field_min < field_max",
                )?;
                need(s.t_op_points >= 5, "t_op_points must be at least 5")?;
                need(s.t_op_min.si() > 0.0, "t_op_min must be positive")?;
                need(s.t_op_max_factor > 0.0, "t_op_max_factor must be positive")?;
                need(s.averages >= 1, "averages must be at least 1")
            }
            ScenarioSettings::NuclearT1LaserSweep(s) => {
                need(s.powers >= 5, "at least 5 powers are needed for the power-function fit")?;
                need(
                    s.power_min.si() > 0.0 && s.power_max.si() > s.power_min.si(),
                    "need 0 < power_min < power_max",
                )?;
                need(s.t_op_points >= 5, "t_op_points must be at least 5")?;
                need(s.t_op_min.si() > 0.0, "t_op_min must be positive")?;
                need(s.t_op_max_factor > 0.0, "t_op_max_factor must be positive")?;
                need(s.averages >= 1, "averages must be at least 1")
            }
            ScenarioSettings::QleSnrVsN(s) => {
                need(s.n_max >= 1, "n_max must be at least 1")?;
                need(s.averages >= 1, "averages must be at least 1")
            }
            ScenarioSettings::CorrelationThreetone(s) => {
                need(
                    matches!(s.block, SequenceFamily::Xy8 | SequenceFamily::Droid60),
                    "block must be XY8 or DROID60",
                )?;
                need(s.repetitions >= 1, "repetitions must be at least 1")?;
                need(s.tau.si() > 0.0 && s.t_corr_step.si() > 0.0, "tau and t_corr_step must be positive")?;
                need(s.points >= 8, "points must be at least 8")?;
                need(s.n_readouts >= 1, "n_readouts must be at least 1")?;
                need(s.averages >= 1, "averages must be at least 1")?;
                need(!self.signal.tones.is_empty(), "signal needs at least one tone")
            }
            ScenarioSettings::SensitivityVsDuration(s) => {
                need(s.tau.si() > 0.0, "tau must be positive")?;
                need(s.max_duration.si() > 0.0, "max_duration must be positive")?;
                need(!s.families.is_empty(), "families must not be empty")?;
                need(
                    s.families
                        .iter()
                        .all(|f| matches!(f, SequenceFamily::Xy8 | SequenceFamily::Droid60 | SequenceFamily::Hahn)),
                    "families must be XY8, DROID60 or HAHN",
                )?;
                need(s.averages >= 2, "averages must be at least 2")
            }
            ScenarioSettings::EtaMap(s) => {
                need(s.n_min >= 1 && s.n_max >= s.n_min, "need 1 <= n_min <= n_max")?;
                need(s.n_points >= 1 && s.t_sense_points >= 1, "axes must be nonempty")?;
                need(
                    s.t_sense_min.si() > 0.0 && s.t_sense_max.si() >= s.t_sense_min.si(),
                    "need 0 < t_sense_min <= t_sense_max",
                )
            }
            ScenarioSettings::DensityProjection(s) => {
                need(!s.densities_ppm.is_empty(), "densities_ppm must not be empty")?;
                need(s.densities_ppm.iter().all(|&d| d > 0.0), "densities must be positive")?;
                need(s.tau.si() > 0.0, "tau must be positive")?;
                need(s.max_repetitions >= 1 && s.n_max >= 1, "max_repetitions and n_max must be at least 1")
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: String,
    seed: Option<u64>,
    #[serde(default)]
    sensor: SensorSection,
    #[serde(default)]
    nuclear_t1: NuclearSection,
    #[serde(default)]
    electron: ElectronSection,
    signal: Option<SignalSection>,
    #[serde(default)]
    output: OutputSection,
    odmr_swap: Option<OdmrSettings>,
    nuclear_t1_field_sweep: Option<FieldSweepSettings>,
    nuclear_t1_laser_sweep: Option<LaserSweepSettings>,
    qle_snr_vs_n: Option<QleSnrSettings>,
    correlation_threetone: Option<CorrelationSettings>,
    sensitivity_vs_duration: Option<SensitivitySettings>,
    eta_map: Option<EtaMapSettings>,
    density_projection: Option<DensityProjectionSettings>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn classify(text: &str, err: toml::de::Error) -> ConfigError {
    let line = err.span().map_or(1, |s| line_of(text, s.start));
    let message = err.message().to_string();
    if message.starts_with("unknown field") {
        ConfigError::UnknownKey { line, message }
    } else if message.starts_with(UNIT_ERROR_PREFIX) {
        ConfigError::UnitMismatch { line, message }
    } else {
        ConfigError::Syntax { line, message }
    }
}

/// Parses and validates a config document, applying defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| classify(text, e))?;
    let scenario = Scenario::from_name(&raw.scenario)?;

    let tables: [(Scenario, bool); 8] = [
        (Scenario::OdmrSwap, raw.odmr_swap.is_some()),
        (Scenario::NuclearT1FieldSweep, raw.nuclear_t1_field_sweep.is_some()),
        (Scenario::NuclearT1LaserSweep, raw.nuclear_t1_laser_sweep.is_some()),
        (Scenario::QleSnrVsN, raw.qle_snr_vs_n.is_some()),
        (Scenario::CorrelationThreetone, raw.correlation_threetone.is_some()),
        (Scenario::SensitivityVsDuration, raw.sensitivity_vs_duration.is_some()),
        (Scenario::EtaMap, raw.eta_map.is_some()),
        (Scenario::DensityProjection, raw.density_projection.is_some()),
    ];
    if let Some((other, _)) = tables.iter().find(|(s, present)| *present && *s != scenario) {
        return Err(ConfigError::Invalid(format!(
            "table [{other}] does not apply to scenario {scenario}"
        )));
    }

    let settings = match scenario {
        Scenario::OdmrSwap => ScenarioSettings::OdmrSwap(raw.odmr_swap.unwrap_or_default()),
        Scenario::NuclearT1FieldSweep => {
            ScenarioSettings::NuclearT1FieldSweep(raw.nuclear_t1_field_sweep.unwrap_or_default())
        }
        Scenario::NuclearT1LaserSweep => {
            ScenarioSettings::NuclearT1LaserSweep(raw.nuclear_t1_laser_sweep.unwrap_or_default())
        }
        Scenario::QleSnrVsN => ScenarioSettings::QleSnrVsN(raw.qle_snr_vs_n.unwrap_or_default()),
        Scenario::CorrelationThreetone => {
            ScenarioSettings::CorrelationThreetone(raw.correlation_threetone.unwrap_or_default())
        }
        Scenario::SensitivityVsDuration => {
            ScenarioSettings::SensitivityVsDuration(raw.sensitivity_vs_duration.unwrap_or_default())
        }
        Scenario::EtaMap => ScenarioSettings::EtaMap(raw.eta_map.unwrap_or_default()),
        Scenario::DensityProjection => {
            ScenarioSettings::DensityProjection(raw.density_projection.unwrap_or_default())
        }
    };

    let config = ExperimentConfig {
        scenario,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        sensor: raw.sensor,
        nuclear_t1: raw.nuclear_t1,
        electron: raw.electron,
        signal: raw.signal.unwrap_or_else(SignalSection::three_tone),
        output: raw.output,
        settings,
    };
    config.validate()?;
    Ok(config)
}
