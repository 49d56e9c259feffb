//! Track lifecycle: predict, associate, update, coast, confirm, terminate.

use serde::{Deserialize, Serialize};

use super::assignment::{build_cost_matrix, solve_assignment};
use super::kalman::TrackState;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerParams {
    /// Association gate `d_th` (m). `inf` disables the penalty.
    pub distance_threshold_m: f64,
    /// Penalty cost `d_p` (m).
    pub penalty_m: f64,
    /// White-acceleration spectral density `q` (m²/s³).
    pub process_noise: f64,
    pub measurement_std_m: f64,
    pub initial_velocity_std_mps: f64,
    /// Consecutive hits needed to confirm a tentative track.
    pub confirm_hits: usize,
    /// Consecutive misses that terminate a track.
    pub max_misses: usize,
    /// Terminated tracks shorter than this many frames are discarded.
    pub min_lifetime: usize,
    /// Time between consecutive tracker frames (s). Set by the caller, not
    /// read from configuration files.
    #[serde(skip)]
    pub frame_interval_s: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            distance_threshold_m: 1.0,
            penalty_m: 1000.0,
            process_noise: 0.5,
            measurement_std_m: 0.15,
            initial_velocity_std_mps: 10.0,
            confirm_hits: 3,
            max_misses: 25,
            min_lifetime: 50,
            frame_interval_s: 0.004,
        }
    }
}

impl TrackerParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("tracking: {msg}")));
        if self.distance_threshold_m.is_nan() || self.distance_threshold_m <= 0.0 {
            return bad(format!("distance_threshold_m must be > 0, got {}", self.distance_threshold_m));
        }
        if !(self.penalty_m.is_finite() && self.penalty_m > 0.0) {
            return bad(format!("penalty_m must be finite and > 0, got {}", self.penalty_m));
        }
        if self.distance_threshold_m.is_finite() && self.penalty_m < 100.0 * self.distance_threshold_m {
            return bad(format!(
                "penalty_m {} must be >= 100 x distance_threshold_m {}",
                self.penalty_m, self.distance_threshold_m
            ));
        }
        for (name, v) in [
            ("process_noise", self.process_noise),
            ("measurement_std_m", self.measurement_std_m),
            ("initial_velocity_std_mps", self.initial_velocity_std_mps),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if self.measurement_std_m.is_nan() || self.measurement_std_m <= 0.0 {
            return bad("measurement_std_m must be > 0".into());
        }
        if !(self.frame_interval_s.is_finite() && self.frame_interval_s > 0.0) {
            return bad(format!("frame_interval_s must be > 0, got {}", self.frame_interval_s));
        }
        if self.confirm_hits == 0 || self.max_misses == 0 {
            return bad("confirm_hits and max_misses must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Terminated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub frame: usize,
    pub time: f64,
    pub position: Vec2,
    pub coasted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    pub state: TrackState,
    /// Consecutive associated frames.
    pub hits: usize,
    /// Consecutive coasted frames.
    pub misses: usize,
    pub status: TrackStatus,
    /// Whether the track was ever confirmed.
    pub confirmed: bool,
    pub history: Vec<HistoryEntry>,
}

impl Track {
    fn new(id: u64, position: Vec2, frame: usize, time: f64, params: &TrackerParams) -> Self {
        Self {
            id,
            state: TrackState::new(position, params.measurement_std_m, params.initial_velocity_std_mps),
            hits: 1,
            misses: 0,
            status: TrackStatus::Tentative,
            confirmed: false,
            history: vec![HistoryEntry {
                frame,
                time,
                position,
                coasted: false,
            }],
        }
    }

    pub fn last_frame(&self) -> usize {
        self.history.last().map_or(0, |h| h.frame)
    }

    /// Frames from birth to the last associated update, inclusive.
    pub fn lifetime(&self) -> usize {
        let first = self.history.first().map_or(0, |h| h.frame);
        self.history
            .iter()
            .rev()
            .find(|h| !h.coasted)
            .map_or(0, |h| h.frame - first + 1)
    }

    pub fn position(&self) -> Vec2 {
        self.state.position()
    }

    /// Position at `frame` if the history covers it.
    pub fn position_at(&self, frame: usize) -> Option<Vec2> {
        self.history
            .binary_search_by_key(&frame, |h| h.frame)
            .ok()
            .map(|k| self.history[k].position)
    }

    /// Prediction step; returns the predicted position.
    pub fn predict(&mut self, dt: f64, params: &TrackerParams) -> Vec2 {
        self.state.predict(dt, params.process_noise)
    }

    /// Measurement step for an associated detection.
    pub fn update(&mut self, detection: Vec2, frame: usize, time: f64, params: &TrackerParams) {
        self.state.update(detection, params.measurement_std_m);
        self.hits += 1;
        self.misses = 0;
        self.history.push(HistoryEntry {
            frame,
            time,
            position: self.state.position(),
            coasted: false,
        });
    }

    fn coast(&mut self, frame: usize, time: f64) {
        self.hits = 0;
        self.misses += 1;
        self.history.push(HistoryEntry {
            frame,
            time,
            position: self.state.position(),
            coasted: true,
        });
    }
}

/// What happened in one tracker step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    /// `(track id, detection index)` associations.
    pub associations: Vec<(u64, usize)>,
    pub coasted: Vec<u64>,
    pub spawned: Vec<u64>,
    pub confirmed: Vec<u64>,
    pub terminated: Vec<u64>,
}

/// Multi-target tracker state machine.
#[derive(Debug, Clone)]
pub struct Tracker {
    params: TrackerParams,
    active: Vec<Track>,
    finished: Vec<Track>,
    next_id: u64,
    last_frame: Option<usize>,
}

impl Tracker {
    pub fn new(params: TrackerParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            active: Vec::new(),
            finished: Vec::new(),
            next_id: 1,
            last_frame: None,
        })
    }

    pub fn params(&self) -> &TrackerParams {
        &self.params
    }

    /// Live tracks, tentative and confirmed.
    pub fn active(&self) -> &[Track] {
        &self.active
    }

    /// Terminated tracks that met the minimum lifetime.
    pub fn finished(&self) -> &[Track] {
        &self.finished
    }

    /// Processes the detections of `frame`. Frames must strictly increase.
    pub fn step(&mut self, detections: &[Vec2], frame: usize) -> Result<StepReport> {
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(Error::OutOfOrderFrame { frame, last });
            }
        }
        if let Some(d) = detections.iter().find(|d| !(d.x.is_finite() && d.y.is_finite())) {
            return Err(Error::InvalidScenario(format!("non-finite detection ({}, {})", d.x, d.y)));
        }
        let time = frame as f64 * self.params.frame_interval_s;
        let params = self.params.clone();
        let mut report = StepReport::default();

        let predictions: Vec<Vec2> = self
            .active
            .iter_mut()
            .map(|t| {
                let dt = (frame - t.last_frame()) as f64 * params.frame_interval_s;
                t.predict(dt, &params)
            })
            .collect();

        let problem = build_cost_matrix(&predictions, detections, params.distance_threshold_m, params.penalty_m)?;
        let assignment = solve_assignment(&problem);

        let mut detection_used = vec![false; detections.len()];
        for (i, track) in self.active.iter_mut().enumerate() {
            match assignment.detection_for(i) {
                Some(j) => {
                    detection_used[j] = true;
                    track.update(detections[j], frame, time, &params);
                    report.associations.push((track.id, j));
                    if track.status == TrackStatus::Tentative && track.hits >= params.confirm_hits {
                        track.status = TrackStatus::Confirmed;
                        track.confirmed = true;
                        report.confirmed.push(track.id);
                    }
                }
                None => {
                    track.coast(frame, time);
                    report.coasted.push(track.id);
                    let expired = match track.status {
                        TrackStatus::Tentative => true,
                        _ => track.misses >= params.max_misses,
                    };
                    if expired {
                        track.status = TrackStatus::Terminated;
                        report.terminated.push(track.id);
                    }
                }
            }
        }

        let (ended, live): (Vec<Track>, Vec<Track>) =
            self.active.drain(..).partition(|t| t.status == TrackStatus::Terminated);
        self.active = live;
        self.finished
            .extend(ended.into_iter().filter(|t| t.confirmed && t.lifetime() >= params.min_lifetime));

        for (j, &d) in detections.iter().enumerate() {
            if !detection_used[j] {
                let track = Track::new(self.next_id, d, frame, time, &params);
                report.spawned.push(track.id);
                self.next_id += 1;
                if track.hits >= params.confirm_hits {
                    let mut track = track;
                    track.status = TrackStatus::Confirmed;
                    track.confirmed = true;
                    report.confirmed.push(track.id);
                    self.active.push(track);
                } else {
                    self.active.push(track);
                }
            }
        }

        self.last_frame = Some(frame);
        Ok(report)
    }

    /// Every confirmed track: finished ones that met the minimum lifetime
    /// plus those still live, ordered by id.
    pub fn confirmed_tracks(&self) -> Vec<Track> {
        let mut out: Vec<Track> = self
            .finished
            .iter()
            .chain(self.active.iter().filter(|t| t.confirmed))
            .cloned()
            .collect();
        out.sort_by_key(|t| t.id);
        out
    }

    pub fn into_confirmed_tracks(self) -> Vec<Track> {
        self.confirmed_tracks()
    }
}
