//! Density clustering of recent detections to reject transient fake targets.
//!
//! Fake reflections persist for only a few sensing frames, so clustering
//! runs over a sliding window of the last `W` frames: a real target leaves a
//! dense trail, a flash leaves isolated points that DBSCAN labels as noise.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::localization::Detection;

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Indices into the clustered point list, ascending.
    pub members: Vec<usize>,
    pub centroid: Vec2,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterResult {
    pub clusters: Vec<Cluster>,
    pub noise: Vec<usize>,
}

/// DBSCAN with inclusive `ε`-neighbourhoods that count the point itself.
///
/// Points are visited in input order. A new cluster is seeded by the first
/// unvisited core point and fully expanded before the next seed; a border
/// point reachable from several clusters joins the earliest one.
pub fn dbscan(points: &[Vec2], eps: f64, min_points: usize) -> ClusterResult {
    assert!(eps > 0.0 && min_points >= 1, "dbscan needs eps > 0 and min_points >= 1");
    let n = points.len();
    let eps2 = eps * eps;
    let neighbours = |i: usize| -> Vec<usize> {
        (0..n).filter(|&j| (points[i] - points[j]).norm_squared() <= eps2).collect()
    };

    const UNSEEN: usize = usize::MAX;
    const NOISE: usize = usize::MAX - 1;
    let mut label = vec![UNSEEN; n];
    let mut cluster_count = 0;
    for i in 0..n {
        if label[i] != UNSEEN {
            continue;
        }
        let seeds = neighbours(i);
        if seeds.len() < min_points {
            label[i] = NOISE;
            continue;
        }
        let c = cluster_count;
        cluster_count += 1;
        label[i] = c;
        let mut queue: VecDeque<usize> = seeds.into_iter().filter(|&j| j != i).collect();
        while let Some(j) = queue.pop_front() {
            if label[j] == NOISE {
                label[j] = c;
                continue;
            }
            if label[j] != UNSEEN {
                continue;
            }
            label[j] = c;
            let nb = neighbours(j);
            if nb.len() >= min_points {
                queue.extend(nb.into_iter().filter(|&k| label[k] == UNSEEN || label[k] == NOISE));
            }
        }
    }

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); cluster_count];
    let mut noise = Vec::new();
    for (i, &l) in label.iter().enumerate() {
        if l == NOISE {
            noise.push(i);
        } else {
            clusters[l].push(i);
        }
    }
    ClusterResult {
        clusters: clusters
            .into_iter()
            .map(|members| {
                let sum = members.iter().fold(Vec2::zeros(), |acc, &i| acc + points[i]);
                Cluster {
                    centroid: sum / members.len() as f64,
                    members,
                }
            })
            .collect(),
        noise,
    }
}

/// DBSCAN parameters and window length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterParams {
    pub eps_m: f64,
    pub min_points: usize,
    /// Number of most recent sensing frames kept in the window.
    pub window_frames: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            eps_m: 0.5,
            min_points: 4,
            window_frames: 10,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if self.eps_m.is_nan() || self.eps_m <= 0.0 || self.min_points < 1 || self.window_frames < 1 {
            return Err(Error::InvalidConfig(
                "clustering: eps_m > 0, min_points >= 1 and window_frames >= 1 required".into(),
            ));
        }
        Ok(())
    }
}

/// Detections from the last `W` sensing frames.
#[derive(Debug, Clone)]
pub struct DetectionWindow {
    window: usize,
    frames: VecDeque<(usize, f64, Vec<Detection>)>,
}

impl DetectionWindow {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            frames: VecDeque::new(),
        }
    }

    /// Appends one frame's detections and evicts frames older than `W`.
    pub fn push(&mut self, frame: usize, time: f64, detections: Vec<Detection>) {
        self.frames.push_back((frame, time, detections));
        while let Some(&(oldest, _, _)) = self.frames.front() {
            if oldest + self.window <= frame {
                self.frames.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn newest(&self) -> Option<(usize, f64)> {
        self.frames.back().map(|(f, t, _)| (*f, *t))
    }

    pub fn detections(&self) -> impl Iterator<Item = &Detection> {
        self.frames.iter().flat_map(|(_, _, d)| d.iter())
    }

    pub fn len(&self) -> usize {
        self.detections().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One centroid per DBSCAN cluster of the windowed detections, stamped with
/// the newest frame; noise points are dropped.
pub fn extract_targets(window: &DetectionWindow, eps: f64, min_points: usize) -> Vec<Detection> {
    let Some((frame, time)) = window.newest() else {
        return Vec::new();
    };
    let points: Vec<Vec2> = window.detections().map(|d| d.position).collect();
    if points.is_empty() {
        return Vec::new();
    }
    dbscan(&points, eps, min_points)
        .clusters
        .into_iter()
        .map(|c| Detection::at(c.centroid, frame, time))
        .collect()
}
