//! End-to-end orchestration, evaluation and export.
//!
//! A run is fully described by a [`PipelineConfig`] TOML document; the same
//! document and seed always yield the same exported files.

mod config;
mod export;
mod metrics;
mod run;

pub use config::{
    apply_overrides, load_config, parse_overrides, CpiParams, DiagnosticsParams, FaultParams, MtiParams,
    PipelineConfig, OUTPUT_DIR_ENV,
};
pub use export::{
    cdf_csv, detections_csv, export_report, ground_truth_csv, metrics_toml, timings_toml, tracks_csv, ExportedFiles,
};
pub use metrics::{compute_metrics, empirical_cdf, percentile, EpochTruth, Metrics};
pub use run::{run_pipeline, EpochDiagnostics, EpochRecord, PipelineReport, StageTimings};
