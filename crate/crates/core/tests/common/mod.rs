#![allow(dead_code)]

use isac_track::localization::{ArrayModel, LocalizationParams};
use isac_track::scenario::{synthesize_frame, CsiFrame, PathKind, PropagationPath, ScenarioConfig};
use num_complex::Complex64;

/// Prototype sensing grid with the array facing +y.
pub fn grid() -> ScenarioConfig {
    ScenarioConfig::prototype_grid()
}

/// Delay of CIR bin `u` at the default IFFT oversampling.
pub fn bin_delay(cfg: &ScenarioConfig, u: usize) -> f64 {
    let n_ifft = LocalizationParams::default().ifft_factor * cfg.rs_subcarrier_count;
    u as f64 / (n_ifft as f64 * cfg.rs_frequency_step())
}

/// A dynamic path at broadside-relative angle `rel_deg`.
pub fn path(cfg: &ScenarioConfig, delay: f64, rel_deg: f64, doppler: f64, gain: Complex64) -> PropagationPath {
    PropagationPath {
        delay,
        aoa: cfg.rx_array_normal() + rel_deg.to_radians(),
        doppler,
        gain,
        kind: PathKind::Target(0),
    }
}

/// `count` noiseless frames of fixed paths.
pub fn frames(cfg: &ScenarioConfig, paths: &[PropagationPath], count: usize) -> Vec<CsiFrame> {
    (0..count).map(|m| synthesize_frame(paths, m, cfg)).collect()
}

pub fn model(cfg: &ScenarioConfig) -> ArrayModel {
    ArrayModel::from(cfg)
}

use std::path::PathBuf;

use isac_track::pipeline::{load_config, PipelineConfig, PipelineReport};

/// A shipped configuration with optional `--key value` style overrides.
pub fn shipped(name: &str, overrides: &[(&str, &str)]) -> PipelineConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let overrides: Vec<(String, String)> = overrides.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    load_config(&path, &overrides).expect("shipped config loads")
}

/// Largest distance between a non-coasted track point and the nearest
/// ground-truth target at the same epoch (`inf` if none is present).
pub fn worst_truth_distance(report: &PipelineReport) -> f64 {
    let mut worst: f64 = 0.0;
    for track in &report.tracks {
        for h in track.history.iter().filter(|h| !h.coasted) {
            let d = report
                .truth
                .iter()
                .find(|t| t.epoch == h.frame)
                .map(|t| t.targets.iter().map(|(_, p)| (p - h.position).norm()).fold(f64::INFINITY, f64::min))
                .unwrap_or(f64::INFINITY);
            worst = worst.max(d);
        }
    }
    worst
}

use isac_track::Vec2;
use nalgebra::DMatrix;

/// Minimum over all one-sided assignments, by plain permutation enumeration.
pub fn brute_force_min(costs: &DMatrix<f64>) -> f64 {
    let (m, n) = costs.shape();
    if m == 0 || n == 0 {
        return 0.0;
    }
    let (rows, cols, transposed) = if m <= n { (m, n, false) } else { (n, m, true) };
    let at = |r: usize, c: usize| if transposed { costs[(c, r)] } else { costs[(r, c)] };
    fn rec(r: usize, rows: usize, cols: usize, used: &mut [bool], acc: f64, at: &dyn Fn(usize, usize) -> f64) -> f64 {
        if r == rows {
            return acc;
        }
        let mut best = f64::INFINITY;
        for c in 0..cols {
            if !used[c] {
                used[c] = true;
                best = best.min(rec(r + 1, rows, cols, used, acc + at(r, c), at));
                used[c] = false;
            }
        }
        best
    }
    rec(0, rows, cols, &mut vec![false; cols], 0.0, &at)
}

/// Density-connectivity reference clustering.
///
/// Core points are those with at least `min_points` points (itself included)
/// within `eps`. Clusters are the connected components of the core graph,
/// ordered by their lowest core index. A non-core point within `eps` of a
/// core point joins the earliest such cluster; all others are noise.
/// Returns `(clusters as sorted member lists, noise)`.
pub fn dbscan_reference(points: &[Vec2], eps: f64, min_points: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = points.len();
    let near = |i: usize, j: usize| (points[i] - points[j]).norm_squared() <= eps * eps;
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_points).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut roots: Vec<usize> = (0..n).filter(|&i| core[i]).map(|i| find(&mut parent, i)).collect();
    roots.sort();
    roots.dedup();
    let cluster_of = |root: usize| roots.iter().position(|&r| r == root).unwrap();

    let mut clusters = vec![Vec::new(); roots.len()];
    let mut noise = Vec::new();
    for i in 0..n {
        if core[i] {
            let c = cluster_of(find(&mut parent, i));
            clusters[c].push(i);
        } else {
            let owner = (0..n)
                .filter(|&j| core[j] && near(i, j))
                .map(|j| cluster_of(find(&mut parent, j)))
                .min();
            match owner {
                Some(c) => clusters[c].push(i),
                None => noise.push(i),
            }
        }
    }
    (clusters, noise)
}

/// `|(1/K) Σ_{k=1..K} e^{-jkΔΦ}|` by direct summation.
pub fn mti_average_direct(window: usize, phase_step: f64) -> f64 {
    let sum: num_complex::Complex64 = (1..=window)
        .map(|k| num_complex::Complex64::from_polar(1.0, -(k as f64) * phase_step))
        .sum();
    sum.norm() / window as f64
}
