//! Plain-text export of a [`PipelineReport`].
//!
//! Every file starts with a `config_sha256` header. Run timings go to their
//! own file so that all other outputs are byte-identical across repeated
//! runs of the same configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::run::PipelineReport;
use crate::error::{Error, Result};

/// Paths written by [`export_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExportedFiles {
    pub tracks: PathBuf,
    pub detections: PathBuf,
    pub ground_truth: PathBuf,
    pub metrics: PathBuf,
    pub cdf: PathBuf,
    pub timings: PathBuf,
    pub diagnostics: Vec<PathBuf>,
}

impl ExportedFiles {
    /// Files covered by the reproducibility guarantee.
    pub fn deterministic(&self) -> Vec<&Path> {
        let mut out: Vec<&Path> = vec![&self.tracks, &self.detections, &self.ground_truth, &self.metrics, &self.cdf];
        out.extend(self.diagnostics.iter().map(PathBuf::as_path));
        out
    }
}

fn csv_header(hash: &str, columns: &str) -> String {
    format!("# config_sha256={hash}\n{columns}\n")
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| format!("{x:.6}"))
}

pub fn tracks_csv(report: &PipelineReport) -> String {
    let mut s = csv_header(&report.config_hash, "track_id,frame,t_s,x_m,y_m,coasted");
    for t in &report.tracks {
        for h in &t.history {
            let _ = writeln!(
                s,
                "{},{},{:.6},{:.6},{:.6},{}",
                t.id, h.frame, h.time, h.position.x, h.position.y, h.coasted as u8
            );
        }
    }
    s
}

pub fn detections_csv(report: &PipelineReport) -> String {
    let mut s = csv_header(&report.config_hash, "frame,t_s,stage,x_m,y_m,delay_ns,aoa_deg");
    for e in &report.epochs {
        let stages = [("raw", &e.raw), ("injected", &e.injected), ("centroid", &e.centroids)];
        for (stage, dets) in stages {
            for d in dets {
                let (delay, aoa) = d.estimate.map_or((String::new(), String::new()), |est| {
                    (format!("{:.4}", est.delay * 1e9), format!("{:.4}", est.aoa.to_degrees()))
                });
                let _ = writeln!(
                    s,
                    "{},{:.6},{stage},{:.6},{:.6},{delay},{aoa}",
                    e.epoch, e.time, d.position.x, d.position.y
                );
            }
        }
    }
    s
}

pub fn ground_truth_csv(report: &PipelineReport) -> String {
    let mut s = csv_header(&report.config_hash, "frame,t_s,target_id,x_m,y_m");
    for e in &report.truth {
        for (id, p) in &e.targets {
            let _ = writeln!(s, "{},{:.6},{id},{:.6},{:.6}", e.epoch, e.time, p.x, p.y);
        }
    }
    s
}

pub fn metrics_toml(report: &PipelineReport) -> String {
    let m = &report.metrics;
    let fraction = if report.full_grid_evaluations > 0 {
        report.steering_evaluations as f64 / report.full_grid_evaluations as f64
    } else {
        0.0
    };
    let mut s = String::new();
    let _ = writeln!(s, "config_sha256 = \"{}\"", report.config_hash);
    let _ = writeln!(s, "evaluated = {}", m.evaluated);
    let _ = writeln!(s, "median_m = {}", opt(m.median_m));
    let _ = writeln!(s, "p90_m = {}", opt(m.p90_m));
    let _ = writeln!(s, "swaps = {}", m.swaps);
    let _ = writeln!(s, "error_samples = {}", m.errors.len());
    let _ = writeln!(s, "ground_truth_samples = {}", m.truth_samples);
    let _ = writeln!(s, "confirmed_tracks = {}", m.confirmed_tracks);
    let _ = writeln!(s, "epochs = {}", report.epochs.len());
    let _ = writeln!(s, "epoch_interval_s = {:.6}", report.epoch_interval);
    let _ = writeln!(s, "raw_detections = {}", report.raw_detections);
    let _ = writeln!(s, "false_detections = {}", report.false_detections);
    let _ = writeln!(s, "steering_evaluations = {}", report.steering_evaluations);
    let _ = writeln!(s, "full_grid_evaluations = {}", report.full_grid_evaluations);
    let _ = writeln!(s, "steering_fraction = {fraction:.6}");
    s
}

pub fn cdf_csv(report: &PipelineReport) -> String {
    let mut s = csv_header(&report.config_hash, "error_m,cumulative_fraction");
    for (e, f) in &report.metrics.cdf {
        let _ = writeln!(s, "{e:.6},{f:.6}");
    }
    s
}

pub fn timings_toml(report: &PipelineReport) -> String {
    let t = &report.timings;
    let mut s = String::new();
    let _ = writeln!(s, "config_sha256 = \"{}\"", report.config_hash);
    let _ = writeln!(s, "frames = {}", t.frames);
    let _ = writeln!(s, "epochs = {}", t.epochs);
    let _ = writeln!(s, "total_ms = {:.3}", t.total_ms());
    let _ = writeln!(s, "\n[ms_per_frame]");
    for (stage, ms) in t.per_frame() {
        let _ = writeln!(s, "{stage} = {ms:.6}");
    }
    s
}

/// Writes every export into `dir`, creating it if needed.
pub fn export_report(report: &PipelineReport, dir: &Path) -> Result<ExportedFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut diagnostics = Vec::new();
    for d in &report.diagnostics {
        let mut s = csv_header(&report.config_hash, "bin,delay_s,power");
        for (k, p) in d.cir.power.iter().enumerate() {
            let _ = writeln!(s, "{k},{:.6e},{p:.6e}", d.cir.delay_of(k));
        }
        diagnostics.push(write(dir.join(format!("cir_epoch{}.csv", d.epoch)), &s)?);
        if let Some(g) = &d.spectrum {
            let mut s = csv_header(&report.config_hash, "delay_bin,delay_s,angle_rad,value");
            for (r, (&bin, &delay)) in g.delay_bins.iter().zip(&g.delays).enumerate() {
                for (c, angle) in g.angles.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{bin},{delay:.6e},{angle:.6},{:.6e}",
                        g.values[(r, c)]
                    );
                }
            }
            diagnostics.push(write(dir.join(format!("spectrum_epoch{}.csv", d.epoch)), &s)?);
        }
    }
    Ok(ExportedFiles {
        tracks: write(dir.join("tracks.csv"), &tracks_csv(report))?,
        detections: write(dir.join("detections.csv"), &detections_csv(report))?,
        ground_truth: write(dir.join("ground_truth.csv"), &ground_truth_csv(report))?,
        metrics: write(dir.join("metrics.toml"), &metrics_toml(report))?,
        cdf: write(dir.join("cdf.csv"), &cdf_csv(report))?,
        timings: write(dir.join("timings.toml"), &timings_toml(report))?,
        diagnostics,
    })
}
