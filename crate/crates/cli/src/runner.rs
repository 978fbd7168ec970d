use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, OutputFormat, ScenarioSettings, CONFIG_FORMAT};
use crate::output::{write_atomic, OutputError, Table};
use crate::scenarios::{self, ScenarioError};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const OUT_DIR_ENV: &str = "QLE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "qle-out";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(e) => e.kind(),
            RunError::Scenario(_) => "scenario",
            RunError::Output(_) => "io",
            RunError::Pool(_) => "thread_pool",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_format: String,
    pub config_hash: String,
    pub seed: u64,
    pub toolkit_version: String,
    pub threads: usize,
    pub format: OutputFormat,
    pub files: Vec<OutputFile>,
    pub wall_clock_seconds: f64,
    pub settings: ScenarioSettings,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// SHA-256 of the resolved configuration serialized as JSON.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    sha256_hex(json.as_bytes())
}

/// Output directory: explicit flag, then the config file, then `QLE_OUT_DIR`, then `qle-out`.
pub fn resolve_out_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(d) = &config.output.dir {
        return PathBuf::from(d);
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT_DIR),
    }
}

/// Computes every table of the scenario on a pool of `threads` workers.
pub fn compute(config: &ExperimentConfig, threads: usize) -> Result<Vec<Table>, RunError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    Ok(pool.install(|| scenarios::run(config))?)
}

fn write_tables(
    tables: &[Table],
    dir: &Path,
    format: OutputFormat,
    written: &mut Vec<PathBuf>,
) -> Result<Vec<OutputFile>, RunError> {
    let mut files = Vec::with_capacity(tables.len());
    for t in tables {
        let (name, body) = match format {
            OutputFormat::Csv => (format!("{}.csv", t.name), t.to_csv()?),
            OutputFormat::Json => (format!("{}.json", t.name), t.to_json()?),
        };
        let path = dir.join(&name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
        files.push(OutputFile {
            path: name,
            rows: t.rows.len(),
            sha256: sha256_hex(body.as_bytes()),
        });
    }
    Ok(files)
}

/// Runs the scenario, writes one file per table and then `manifest.json`.
/// On failure every file written by this run is removed.
pub fn run_scenario(config: &ExperimentConfig, options: &RunOptions) -> Result<RunManifest, RunError> {
    let start = Instant::now();
    let tables = compute(config, options.threads)?;

    let dir = &options.out_dir;
    fs::create_dir_all(dir).map_err(|e| OutputError::io(dir, e))?;
    let mut written = Vec::new();
    let result = (|| {
        let files = write_tables(&tables, dir, options.format, &mut written)?;
        let manifest = RunManifest {
            scenario: config.scenario.name().to_string(),
            config_format: CONFIG_FORMAT.to_string(),
            config_hash: config_hash(config),
            seed: config.seed,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            threads: options.threads,
            format: options.format,
            files,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
            settings: config.settings.clone(),
        };
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        write_atomic(&dir.join(MANIFEST_FILE), body.as_bytes())?;
        Ok(manifest)
    })();
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;

    #[test]
    fn manifest_lists_exactly_the_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::defaults(Scenario::EtaMap);
        let opts = RunOptions {
            out_dir: dir.path().to_path_buf(),
            threads: 2,
            format: OutputFormat::Csv,
        };
        let m = run_scenario(&config, &opts).unwrap();
        let mut on_disk: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n != MANIFEST_FILE)
            .collect();
        on_disk.sort();
        let mut listed: Vec<String> = m.files.iter().map(|f| f.path.clone()).collect();
        listed.sort();
        assert_eq!(on_disk, listed);
        for f in &m.files {
            let body = fs::read(dir.path().join(&f.path)).unwrap();
            assert_eq!(sha256_hex(&body), f.sha256);
        }
    }

    #[test]
    fn failed_write_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::defaults(Scenario::QleSnrVsN);
        // A directory squatting on the manifest name makes the final rename fail.
        fs::create_dir(dir.path().join(MANIFEST_FILE)).unwrap();
        let opts = RunOptions {
            out_dir: dir.path().to_path_buf(),
            threads: 1,
            format: OutputFormat::Csv,
        };
        let err = run_scenario(&config, &opts).unwrap_err();
        assert_eq!(err.kind(), "io");
        let left: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(left, vec![MANIFEST_FILE.to_string()]);
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = ExperimentConfig::defaults(Scenario::EtaMap);
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.seed += 1;
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
