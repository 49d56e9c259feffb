//! Delay–AoA estimation and bistatic positioning.
//!
//! Per coherent processing interval (CPI):
//!
//! 1. [`stack_snapshots`] vectorizes `T_s` filtered frames.
//! 2. [`split_snapshots`] separates signal and noise subspaces.
//! 3. [`compute_cir`] and [`detect_cir_peaks`] select candidate delay windows.
//! 4. [`music_spectrum`] evaluates the pseudo-spectrum only inside them, and
//!    [`find_spectrum_peaks`] extracts `(τ̂, φ̂)` pairs.
//! 5. [`solve_bistatic_position`] converts each pair into a position.
//!
//! AoA estimates are relative to the array broadside and live in
//! `[-π/2, π/2]`; a ULA cannot tell front from back.

mod bistatic;
mod cir;
mod music;
mod snapshots;
mod subspace;

pub use bistatic::{solve_bistatic_position, BistaticGeometry, BistaticSolution, GeometryRejection, GEOMETRY_EPS};
pub use cir::{compute_cir, detect_cir_peaks, CirProfile, DelayWindow};
pub use music::{
    angle_grid, find_spectrum_peaks, music_spectrum, steering_vector, ArrayModel, PathEstimate, SpectrumGrid,
    SPECTRUM_CEILING,
};
pub use snapshots::{estimate_covariance, stack_snapshots, SnapshotBlock};
pub use subspace::{estimate_source_count, split_snapshots, split_subspace, SubspaceSplit, ZERO_FLOOR};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scenario::CsiFrame;

/// A localized target candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub position: Vec2,
    pub estimate: Option<PathEstimate>,
    /// Sensing epoch (localization frame) index.
    pub frame: usize,
    pub time: f64,
}

impl Detection {
    pub fn at(position: Vec2, frame: usize, time: f64) -> Self {
        Self {
            position,
            estimate: None,
            frame,
            time,
        }
    }
}

/// Tunables of the per-CPI localizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizationParams {
    /// `N_ifft = ifft_factor · N`.
    pub ifft_factor: usize,
    pub guard_bins: usize,
    pub cir_threshold_db: f64,
    pub angle_step_deg: f64,
    pub max_targets: usize,
    /// Fixed `L̂`; estimated from the eigenvalues when absent.
    pub source_count: Option<usize>,
    /// Search every delay bin instead of the CIR-pruned windows.
    pub full_search: bool,
}

impl Default for LocalizationParams {
    fn default() -> Self {
        Self {
            ifft_factor: 4,
            guard_bins: 3,
            cir_threshold_db: 6.0,
            angle_step_deg: 1.0,
            max_targets: 4,
            source_count: None,
            full_search: false,
        }
    }
}

impl LocalizationParams {
    pub fn validate(&self) -> Result<()> {
        if self.ifft_factor < 1 || self.max_targets < 1 || !(self.angle_step_deg > 0.0 && self.angle_step_deg <= 90.0) {
            return Err(Error::InvalidConfig(
                "localization: ifft_factor >= 1, max_targets >= 1 and 0 < angle_step_deg <= 90 required".into(),
            ));
        }
        if !self.cir_threshold_db.is_finite() {
            return Err(Error::InvalidConfig("localization: cir_threshold_db must be finite".into()));
        }
        Ok(())
    }
}

/// Output of one CPI.
#[derive(Debug, Clone)]
pub struct CpiResult {
    pub estimates: Vec<PathEstimate>,
    pub detections: Vec<Detection>,
    /// Estimates discarded by the geometric inversion.
    pub rejected: usize,
    pub source_count: usize,
    pub steering_evaluations: usize,
    pub full_grid_evaluations: usize,
    pub cir: CirProfile,
    pub spectrum: Option<SpectrumGrid>,
}

/// Runs the CPI localization chain over `frames` (already clutter-filtered).
///
/// An empty scene yields an empty result rather than an error.
pub fn localize_cpi(
    frames: &[CsiFrame],
    model: &ArrayModel,
    geom: &BistaticGeometry,
    params: &LocalizationParams,
    epoch: usize,
    time: f64,
) -> Result<CpiResult> {
    let n_ifft = params.ifft_factor * model.subcarriers;
    let angles = angle_grid(params.angle_step_deg);
    let cir = compute_cir(frames, n_ifft, model.rs_frequency_step);
    let full_grid_evaluations = n_ifft * angles.len();
    let empty = |cir: CirProfile| CpiResult {
        estimates: Vec::new(),
        detections: Vec::new(),
        rejected: 0,
        source_count: 0,
        steering_evaluations: 0,
        full_grid_evaluations,
        cir,
        spectrum: None,
    };

    let block = stack_snapshots(frames)?;
    let split = match split_snapshots(&block, params.source_count, params.max_targets) {
        Ok(s) => s,
        Err(Error::EmptyScene) => return Ok(empty(cir)),
        Err(e) => return Err(e),
    };
    let windows = if params.full_search {
        vec![DelayWindow { start: 0, end: n_ifft - 1 }]
    } else {
        detect_cir_peaks(&cir, params.guard_bins, params.cir_threshold_db)
    };
    if windows.is_empty() {
        return Ok(CpiResult {
            source_count: split.source_count(),
            ..empty(cir)
        });
    }
    let grid = music_spectrum(&split, &windows, &angles, model, cir.bin_delay);
    let estimates = find_spectrum_peaks(&grid, split.source_count().min(params.max_targets));
    let mut detections = Vec::with_capacity(estimates.len());
    let mut rejected = 0;
    for est in &estimates {
        match solve_bistatic_position(est.delay, est.aoa, geom) {
            Ok(sol) => detections.push(Detection {
                position: sol.position,
                estimate: Some(*est),
                frame: epoch,
                time,
            }),
            Err(_) => rejected += 1,
        }
    }
    Ok(CpiResult {
        estimates,
        detections,
        rejected,
        source_count: split.source_count(),
        steering_evaluations: grid.steering_evaluations,
        full_grid_evaluations,
        cir,
        spectrum: Some(grid),
    })
}
