//! Scenario configs, Monte-Carlo runs and their output files.

pub mod config;
pub mod linksim;
pub mod output;
pub mod scenarios;
pub mod stats;

use std::time::Instant;

pub use config::{ScenarioConfig, ScenarioKind, OUTPUT_DIR_ENV};
pub use output::{emit_outputs, OutputFormat, ScenarioOutput};
pub use stats::{Summary, SweepResult};

use crate::error::Result;
use crate::seed::{derive_seed, stream};

/// Validate `cfg`, run its scenario and record the runtime.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let mut out = scenarios::run_kind(cfg)?;
    out.sweep.runtime = start.elapsed();
    out.config_text = cfg.to_flat_string()?;
    Ok(out)
}

/// Run and write every output file; returns the written paths.
pub fn run_and_emit(cfg: &ScenarioConfig) -> Result<(ScenarioOutput, Vec<std::path::PathBuf>)> {
    let out = run_scenario(cfg)?;
    let mut formats = vec![OutputFormat::Csv];
    if cfg.scenario.svg {
        formats.push(OutputFormat::Svg);
    }
    let files = emit_outputs(&out, &cfg.scenario.output_dir, &formats)?;
    Ok((out, files))
}

/// One derived seed of the counter scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedEntry {
    pub stream: &'static str,
    pub index: u64,
    pub seed: u64,
}

/// The first `count` derived seeds of every stream for `master`.
pub fn seed_report(master: u64, count: u64) -> Vec<SeedEntry> {
    let streams = [
        ("geometry", stream::GEOMETRY),
        ("pairing", stream::PAIRING),
        ("antennas", stream::ANTENNAS),
        ("activation", stream::ACTIVATION),
        ("phases", stream::PHASES),
        ("routing", stream::ROUTING),
    ];
    streams
        .iter()
        .flat_map(|&(name, id)| {
            (0..count).map(move |index| SeedEntry {
                stream: name,
                index,
                seed: derive_seed(master, id, index),
            })
        })
        .collect()
}
