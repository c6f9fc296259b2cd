//! Verification harness: configuration, the suites and JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use std::time::Instant;

pub use config::SuiteConfig;
pub use error::{HarnessError, Result};
pub use report::{emit_report, CaseRecord, Role, RunReport, SuiteReport};

/// Whether a suite runs in `all` under this config.
pub fn enabled(cfg: &SuiteConfig, name: &str) -> bool {
    match name {
        "kernel-oracle" => cfg.kernel_oracle.enabled,
        "main-theorem" => cfg.main_theorem.enabled,
        "lemmas" => cfg.lemmas.enabled,
        "commutators" => cfg.commutators.enabled,
        "lie-action" => cfg.lie_action.enabled,
        "intertwiner" => cfg.intertwiner.enabled,
        "densities" => cfg.densities.enabled,
        "complex-spot" => cfg.complex_spot.enabled,
        _ => false,
    }
}

pub fn run_suite(cfg: &SuiteConfig, name: &str) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut report = match name {
        "kernel-oracle" => suites::kernel_oracle::run(cfg),
        "main-theorem" => suites::main_theorem::run(cfg),
        "lemmas" => suites::lemmas::run(cfg),
        "commutators" => suites::commutators::run(),
        "lie-action" => suites::lie_action::run(cfg),
        "intertwiner" => suites::intertwiner::run(cfg),
        "densities" => suites::densities::run(cfg),
        "complex-spot" => suites::complex_spot::run(cfg),
        other => Err(HarnessError::UnknownSuite(other.to_string())),
    }?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Runs the named suites in order; `fast` is recorded, not applied.
pub fn run(cfg: &SuiteConfig, names: &[&str], fast: bool) -> Result<RunReport> {
    let suites = names.iter().map(|n| run_suite(cfg, n)).collect::<Result<Vec<_>>>()?;
    Ok(RunReport::new(cfg.seed, fast, suites))
}

/// Every enabled suite, in canonical order.
pub fn enabled_suites(cfg: &SuiteConfig) -> Vec<&'static str> {
    suites::NAMES.into_iter().filter(|n| enabled(cfg, n)).collect()
}
