//! Scenario runner for quantum-logic-enhanced NV-ensemble sensing experiments.
//!
//! A TOML config ([`config`]) selects one scenario; [`runner::run_scenario`]
//! computes its tables ([`scenarios`]) and writes them as CSV or JSON together
//! with a `manifest.json`.

pub mod config;
pub mod output;
pub mod runner;
pub mod scenarios;
pub mod units;
