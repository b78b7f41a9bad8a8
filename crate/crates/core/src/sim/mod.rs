//! Scenario orchestration: configuration, seeded replications and CSV output.
//!
//! Every scenario takes a [`ModelConfig`] and a 64-bit seed. Replication `r`
//! draws all of its randomness from substreams of `(seed, r)`, so results do
//! not depend on thread scheduling.

pub mod config;
pub mod limited;
pub mod metrics;
pub mod paths;
pub mod probe;
pub mod rng;
pub mod upload;

use std::io::Write;

pub use config::{ModelConfig, ScenarioKind};
pub use limited::{run_limited_duration, LimitedDurationReport};
pub use metrics::distance_trace;
pub use probe::{run_stability_probe, StabilityProbeReport};
pub use upload::{run_file_upload, FileUploadReport};

use crate::error::{runtime, Error, Result};

/// Policy label of the channel-state-only allocation.
pub const GREEDY: &str = "greedy";

/// Policy label of the queue-based allocation with controller gain `k`.
pub fn policy_name(k: f64) -> String {
    format!("queue_k{k}")
}

/// Bundled channel configurations.
pub mod bundled {
    /// Two users, three-state chain with an outage state; variation ratio 1.22.
    pub const HIGH_VARIATION: &str = include_str!("../../configs/high_variation.toml");
    /// Two users, two-state chain with variation ratio 0.13.
    pub const LOW_VARIATION: &str = include_str!("../../configs/low_variation.toml");
    /// The low-variation chain at moderate SNR with `K = 1`, for file uploads.
    pub const FILE_UPLOAD: &str = include_str!("../../configs/file_upload.toml");
    /// Moderate-SNR two-state chain with Bernoulli arrivals.
    pub const STABILITY_PROBE: &str = include_str!("../../configs/stability_probe.toml");
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioReport {
    LimitedDuration(LimitedDurationReport),
    FileUpload(FileUploadReport),
    StabilityProbe(StabilityProbeReport),
}

impl ScenarioReport {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioReport::LimitedDuration(_) => ScenarioKind::LimitedDuration,
            ScenarioReport::FileUpload(_) => ScenarioKind::FileUpload,
            ScenarioReport::StabilityProbe(_) => ScenarioKind::StabilityProbe,
        }
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        match self {
            ScenarioReport::LimitedDuration(r) => r.write_csv(w),
            ScenarioReport::FileUpload(r) => r.write_csv(w),
            ScenarioReport::StabilityProbe(r) => r.write_csv(w),
        }
    }
}

/// Validates `cfg` for `kind` and runs it.
pub fn run_scenario(kind: ScenarioKind, cfg: &ModelConfig, seed: u64) -> Result<ScenarioReport> {
    cfg.validate_for(kind)?;
    Ok(match kind {
        ScenarioKind::LimitedDuration => ScenarioReport::LimitedDuration(run_limited_duration(cfg, seed)?),
        ScenarioKind::FileUpload => ScenarioReport::FileUpload(run_file_upload(cfg, seed)?),
        ScenarioKind::StabilityProbe => ScenarioReport::StabilityProbe(run_stability_probe(cfg, seed)?),
    })
}

pub(crate) fn io_error(e: std::io::Error) -> Error {
    runtime(format!("writing CSV: {e}"))
}
