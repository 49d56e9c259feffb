//! Full pipeline on the shipped crossing configuration, with exports.
//!
//! Usage: `cargo run --release --example end_to_end [config] [output-dir]`

use std::path::PathBuf;

use isac_track::pipeline::{export_report, load_config, run_pipeline};

fn main() -> isac_track::Result<()> {
    let mut args = std::env::args().skip(1);
    let config_path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/crossing.toml"));
    let config = load_config(&config_path, &[])?;
    let report = run_pipeline(&config)?;
    let m = &report.metrics;
    println!("config {}", report.config_hash);
    println!(
        "{} epochs, {} confirmed tracks, median {:.3} m, p90 {:.3} m, {} swaps",
        report.epochs.len(),
        m.confirmed_tracks,
        m.median_m.unwrap_or(f64::NAN),
        m.p90_m.unwrap_or(f64::NAN),
        m.swaps
    );
    println!(
        "steering evaluations: {} of {} ({:.1}%)",
        report.steering_evaluations,
        report.full_grid_evaluations,
        100.0 * report.steering_evaluations as f64 / report.full_grid_evaluations.max(1) as f64
    );
    for (stage, ms) in report.timings.per_frame() {
        println!("  {stage:<12} {ms:.4} ms/frame");
    }
    if let Some(dir) = args.next() {
        let files = export_report(&report, &PathBuf::from(dir))?;
        println!("wrote {}", files.tracks.parent().unwrap_or(&files.tracks).display());
    }
    Ok(())
}
