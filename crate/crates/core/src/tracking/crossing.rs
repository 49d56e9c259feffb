//! Synthetic two-target crossing at the detection level.
//!
//! Two targets move at constant velocity along straight lines that meet at
//! the origin. Detections vanish for `dropout` frames at the intersection,
//! and during exactly those frames a transient ghost appears ahead of each
//! target on the *other* target's outgoing path (a multipath reflection
//! that lasts fewer frames than track confirmation needs). Ghosts sit beyond
//! the association gate of tracks that coast through the gap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::Vec2;
use crate::pipeline::{compute_metrics, EpochTruth, Metrics};
use crate::tracking::{Track, Tracker, TrackerParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSpec {
    pub frames_before: usize,
    pub frames_after: usize,
    pub dropout: usize,
    pub frame_interval_s: f64,
    /// Speeds are drawn uniformly from this range (m/s).
    pub speed_mps: (f64, f64),
    /// Angle between the two headings, drawn uniformly (degrees).
    pub crossing_angle_deg: (f64, f64),
    pub noise_std_m: f64,
    /// Ghost distance from the intersection, drawn uniformly (m).
    pub ghost_distance_m: (f64, f64),
    pub ghosts: bool,
}

impl Default for CrossingSpec {
    fn default() -> Self {
        Self {
            frames_before: 40,
            frames_after: 40,
            dropout: 2,
            frame_interval_s: 0.1,
            speed_mps: (0.8, 1.2),
            crossing_angle_deg: (75.0, 105.0),
            noise_std_m: 0.03,
            ghost_distance_m: (1.3, 1.5),
            ghosts: true,
        }
    }
}

/// Frame-by-frame detections and ground truth of one crossing.
#[derive(Debug, Clone)]
pub struct CrossingCase {
    pub detections: Vec<Vec<Vec2>>,
    pub truth: Vec<EpochTruth>,
    /// First frame of the dropout; the targets meet at its last frame.
    pub dropout_start: usize,
}

impl CrossingCase {
    pub fn frames(&self) -> usize {
        self.detections.len()
    }
}

pub fn crossing_case(seed: u64, spec: &CrossingSpec) -> CrossingCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..hi) } else { lo };
    let heading = rng.random_range(0.0..std::f64::consts::TAU);
    let angle = uniform(&mut rng, spec.crossing_angle_deg).to_radians();
    let dirs = [heading, heading + angle].map(|a| Vec2::new(a.cos(), a.sin()));
    let speeds = [uniform(&mut rng, spec.speed_mps), uniform(&mut rng, spec.speed_mps)];
    let ghost_r = uniform(&mut rng, spec.ghost_distance_m);
    let noise = Normal::new(0.0, spec.noise_std_m.max(0.0)).expect("finite noise std");

    let meet = spec.frames_before + spec.dropout.saturating_sub(1);
    let dropout = spec.frames_before..spec.frames_before + spec.dropout;
    let total = meet + 1 + spec.frames_after;
    let mut detections = Vec::with_capacity(total);
    let mut truth = Vec::with_capacity(total);
    for k in 0..total {
        let t = (k as f64 - meet as f64) * spec.frame_interval_s;
        let pos = [0, 1].map(|i| dirs[i] * speeds[i] * t);
        let mut dets = Vec::new();
        if dropout.contains(&k) {
            if spec.ghosts {
                dets.push(dirs[1] * ghost_r);
                dets.push(dirs[0] * ghost_r);
            }
        } else {
            for p in pos {
                dets.push(p + Vec2::new(noise.sample(&mut rng), noise.sample(&mut rng)));
            }
        }
        detections.push(dets);
        truth.push(EpochTruth {
            epoch: k,
            time: k as f64 * spec.frame_interval_s,
            targets: vec![(1, pos[0]), (2, pos[1])],
        });
    }
    CrossingCase {
        detections,
        truth,
        dropout_start: spec.frames_before,
    }
}

/// Tracks `case` frame by frame and scores the confirmed tracks against its
/// truth with a matching gate of `min(d_th, 1 m)`.
///
/// `params.frame_interval_s` is overridden with the case's frame interval.
pub fn track_crossing(case: &CrossingCase, spec: &CrossingSpec, params: &TrackerParams) -> (Vec<Track>, Metrics) {
    let params = TrackerParams {
        frame_interval_s: spec.frame_interval_s,
        ..params.clone()
    };
    let gate = params.distance_threshold_m.min(1.0);
    let mut tracker = Tracker::new(params).expect("valid tracker parameters");
    for (k, dets) in case.detections.iter().enumerate() {
        tracker.step(dets, k).expect("frames are in order and finite");
    }
    let tracks = tracker.into_confirmed_tracks();
    let metrics = compute_metrics(&tracks, &case.truth, gate);
    (tracks, metrics)
}
