//! Tracking accuracy against ground truth.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::geometry::Vec2;
use crate::tracking::{min_cost_assignment, Track};

/// Ground-truth target positions at one sensing epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTruth {
    pub epoch: usize,
    pub time: f64,
    pub targets: Vec<(u32, Vec2)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    /// False when no track/truth pair was ever matched.
    pub evaluated: bool,
    /// Per-sample Euclidean errors (m), in epoch order.
    pub errors: Vec<f64>,
    pub median_m: Option<f64>,
    pub p90_m: Option<f64>,
    /// `(error, cumulative fraction)` over the sorted errors.
    pub cdf: Vec<(f64, f64)>,
    pub swaps: usize,
    pub truth_samples: usize,
    pub confirmed_tracks: usize,
}

/// Linear-interpolated percentile of an ascending sample, `q ∈ [0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

/// Empirical CDF: the `k`-th smallest error maps to `k/n`.
pub fn empirical_cdf(errors: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.into_iter().enumerate().map(|(k, e)| (e, (k + 1) as f64 / n)).collect()
}

/// Matches tracks to ground truth at every epoch, pools the errors and
/// counts identity swaps.
///
/// A track keeps last epoch's target while it stays within `match_gate`;
/// the remaining tracks and targets are paired by minimum total distance.
/// A swap is a track being paired with a different target than at its
/// previous matched epoch.
pub fn compute_metrics(tracks: &[Track], truth: &[EpochTruth], match_gate: f64) -> Metrics {
    let mut errors = Vec::new();
    let mut last_match: HashMap<u64, u32> = HashMap::new();
    let mut swaps = 0;
    let mut truth_samples = 0;
    for epoch in truth {
        truth_samples += epoch.targets.len();
        let live: Vec<(u64, Vec2)> = tracks
            .iter()
            .filter_map(|t| t.position_at(epoch.epoch).map(|p| (t.id, p)))
            .collect();
        if live.is_empty() || epoch.targets.is_empty() {
            continue;
        }
        let dist = |i: usize, j: usize| (live[i].1 - epoch.targets[j].1).norm();
        let mut pairs = Vec::new();
        let mut track_free = vec![true; live.len()];
        let mut target_free = vec![true; epoch.targets.len()];
        for (i, (id, _)) in live.iter().enumerate() {
            let kept = last_match
                .get(id)
                .and_then(|target| epoch.targets.iter().position(|(t, _)| t == target))
                .filter(|&j| target_free[j] && dist(i, j) <= match_gate);
            if let Some(j) = kept {
                pairs.push((i, j));
                track_free[i] = false;
                target_free[j] = false;
            }
        }
        let rows: Vec<usize> = (0..live.len()).filter(|&i| track_free[i]).collect();
        let cols: Vec<usize> = (0..epoch.targets.len()).filter(|&j| target_free[j]).collect();
        let costs = DMatrix::from_fn(rows.len(), cols.len(), |a, b| dist(rows[a], cols[b]));
        pairs.extend(min_cost_assignment(&costs, 0.0).into_iter().map(|(a, b)| (rows[a], cols[b])));
        pairs.sort_unstable();
        for (i, j) in pairs {
            errors.push(dist(i, j));
            let target = epoch.targets[j].0;
            if let Some(prev) = last_match.insert(live[i].0, target) {
                if prev != target {
                    swaps += 1;
                }
            }
        }
    }
    let mut sorted = errors.clone();
    sorted.sort_by(f64::total_cmp);
    Metrics {
        evaluated: !errors.is_empty(),
        median_m: percentile(&sorted, 0.5),
        p90_m: percentile(&sorted, 0.9),
        cdf: empirical_cdf(&errors),
        errors,
        swaps,
        truth_samples,
        confirmed_tracks: tracks.len(),
    }
}
