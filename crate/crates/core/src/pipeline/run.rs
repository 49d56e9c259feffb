//! Stage orchestration: synthesis, MTI, per-CPI localization, clustering,
//! tracking.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::PipelineConfig;
use super::metrics::{compute_metrics, EpochTruth, Metrics};
use crate::clustering::{extract_targets, DetectionWindow};
use crate::error::Result;
use crate::geometry::Vec2;
use crate::localization::{localize_cpi, ArrayModel, BistaticGeometry, CirProfile, CpiResult, Detection, SpectrumGrid};
use crate::mti::MtiState;
use crate::scenario::{ground_truth_at, CsiFrame, Scenario};
use crate::tracking::{Track, Tracker};

/// Upper bound on the metric matching gate when the tracker runs ungated.
const MAX_MATCH_GATE: f64 = 1.0;

/// Everything observed at one sensing epoch.
#[derive(Debug, Clone)]
pub struct EpochRecord {
    pub epoch: usize,
    pub time: f64,
    /// Localizer output.
    pub raw: Vec<Detection>,
    /// Injected one-epoch fake detections.
    pub injected: Vec<Detection>,
    /// DBSCAN centroids handed to the tracker.
    pub centroids: Vec<Detection>,
    pub source_count: usize,
    pub rejected: usize,
    pub steering_evaluations: usize,
    pub full_grid_evaluations: usize,
}

/// Wall-clock time per stage (ms).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimings {
    pub frames: usize,
    pub epochs: usize,
    pub synthesis_ms: f64,
    pub mti_ms: f64,
    pub localization_ms: f64,
    pub clustering_ms: f64,
    pub tracking_ms: f64,
}

impl StageTimings {
    pub fn total_ms(&self) -> f64 {
        self.synthesis_ms + self.mti_ms + self.localization_ms + self.clustering_ms + self.tracking_ms
    }

    /// `(stage, ms per CSI frame)` rows.
    pub fn per_frame(&self) -> Vec<(&'static str, f64)> {
        let n = self.frames.max(1) as f64;
        vec![
            ("synthesis", self.synthesis_ms / n),
            ("mti", self.mti_ms / n),
            ("localization", self.localization_ms / n),
            ("clustering", self.clustering_ms / n),
            ("tracking", self.tracking_ms / n),
        ]
    }
}

/// CIR and spectrum kept for plotting.
#[derive(Debug, Clone)]
pub struct EpochDiagnostics {
    pub epoch: usize,
    pub cir: CirProfile,
    pub spectrum: Option<SpectrumGrid>,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub config_hash: String,
    pub epoch_interval: f64,
    pub epochs: Vec<EpochRecord>,
    pub truth: Vec<EpochTruth>,
    /// Confirmed tracks, ordered by id.
    pub tracks: Vec<Track>,
    pub metrics: Metrics,
    /// Localizer detections farther than the association gate from every
    /// ground-truth target.
    pub false_detections: usize,
    pub raw_detections: usize,
    pub steering_evaluations: usize,
    pub full_grid_evaluations: usize,
    pub timings: StageTimings,
    pub diagnostics: Vec<EpochDiagnostics>,
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs every stage and evaluates against the scenario's ground truth.
/// Output is a pure function of the configuration.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport> {
    let config = config.clone().validate().map_err(|e| e.at_stage("config"))?;
    let config_hash = config.hash()?;
    let scenario = Scenario::new(config.scenario.clone()).map_err(|e| e.at_stage("scenario"))?;
    let cfg = scenario.config();
    let mut timings = StageTimings::default();

    // Synthesis and MTI are sequential: one noise stream, one running mean.
    let mut mti = MtiState::new(config.mti.window);
    let mut filtered: Vec<CsiFrame> = Vec::new();
    let mut frames = scenario.frames(config.seed);
    loop {
        let t0 = Instant::now();
        let Some(frame) = frames.next() else { break };
        timings.synthesis_ms += elapsed_ms(t0);
        timings.frames += 1;
        let t0 = Instant::now();
        if let Some(out) = mti.filter(&frame).map_err(|e| e.at_stage("mti"))? {
            filtered.push(out);
        }
        timings.mti_ms += elapsed_ms(t0);
    }

    let len = config.cpi_len();
    let stride = config.cpi_stride();
    let epoch_count = if filtered.len() >= len { (filtered.len() - len) / stride + 1 } else { 0 };
    timings.epochs = epoch_count;
    let model = ArrayModel::from(cfg);
    let geom = BistaticGeometry::from(cfg);
    let dumps = &config.diagnostics.dump_epochs;

    let t0 = Instant::now();
    let cpis: Vec<(f64, CpiResult)> = (0..epoch_count)
        .into_par_iter()
        .map(|e| {
            let block = &filtered[e * stride..e * stride + len];
            let time = block.iter().map(|f| f.timestamp).sum::<f64>() / len as f64;
            let mut res = localize_cpi(block, &model, &geom, &config.localization, e, time)
                .map_err(|err| err.at_stage("localization"))?;
            if !dumps.contains(&e) {
                res.cir.power = Vec::new();
                res.spectrum = None;
            }
            Ok((time, res))
        })
        .collect::<Result<_>>()?;
    timings.localization_ms = elapsed_ms(t0);
    drop(filtered);

    let mut flash_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let faults = &config.faults;
    let mut window = DetectionWindow::new(config.clustering.window_frames);
    let mut tracker = Tracker::new(config.tracker_params()).map_err(|e| e.at_stage("tracking"))?;
    let mut epochs = Vec::with_capacity(epoch_count);
    let mut truth = Vec::with_capacity(epoch_count);
    let mut diagnostics = Vec::new();
    let gate = config.tracking.distance_threshold_m;
    let (mut false_detections, mut raw_detections) = (0, 0);
    let (mut steering_evaluations, mut full_grid_evaluations) = (0, 0);

    for (e, (time, res)) in cpis.into_iter().enumerate() {
        let targets = ground_truth_at(cfg, time);
        raw_detections += res.detections.len();
        false_detections += res
            .detections
            .iter()
            .filter(|d| targets.iter().all(|(_, p)| (d.position - p).norm() > gate))
            .count();
        steering_evaluations += res.steering_evaluations;
        full_grid_evaluations += res.full_grid_evaluations;

        let mut injected = Vec::new();
        if faults.flash_probability > 0.0 && flash_rng.random::<f64>() < faults.flash_probability {
            let (lo, hi) = (faults.flash_area_min_m, faults.flash_area_max_m);
            let p = Vec2::new(flash_rng.random_range(lo[0]..=hi[0]), flash_rng.random_range(lo[1]..=hi[1]));
            injected.push(Detection::at(p, e, time));
        }

        let t0 = Instant::now();
        let mut batch = res.detections.clone();
        batch.extend(injected.iter().copied());
        window.push(e, time, batch);
        let centroids = extract_targets(&window, config.clustering.eps_m, config.clustering.min_points);
        timings.clustering_ms += elapsed_ms(t0);

        let t0 = Instant::now();
        let positions: Vec<Vec2> = centroids.iter().map(|d| d.position).collect();
        tracker.step(&positions, e).map_err(|err| err.at_stage("tracking"))?;
        timings.tracking_ms += elapsed_ms(t0);

        if dumps.contains(&e) {
            diagnostics.push(EpochDiagnostics {
                epoch: e,
                cir: res.cir,
                spectrum: res.spectrum,
            });
        }
        truth.push(EpochTruth {
            epoch: e,
            time,
            targets,
        });
        epochs.push(EpochRecord {
            epoch: e,
            time,
            raw: res.detections,
            injected,
            centroids,
            source_count: res.source_count,
            rejected: res.rejected,
            steering_evaluations: res.steering_evaluations,
            full_grid_evaluations: res.full_grid_evaluations,
        });
    }

    let tracks = tracker.into_confirmed_tracks();
    let metrics = compute_metrics(&tracks, &truth, config.tracking.distance_threshold_m.min(MAX_MATCH_GATE));
    Ok(PipelineReport {
        config_hash,
        epoch_interval: config.epoch_interval(),
        epochs,
        truth,
        tracks,
        metrics,
        false_detections,
        raw_detections,
        steering_evaluations,
        full_grid_evaluations,
        timings,
        diagnostics,
    })
}
