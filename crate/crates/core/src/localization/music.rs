//! Joint delay–angle 2D-MUSIC over a pruned delay grid.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cir::DelayWindow;
use super::subspace::SubspaceSplit;
use crate::scenario::ScenarioConfig;

/// Upper bound on pseudo-spectrum values; denominators below its inverse
/// (exact orthogonality) are clamped.
pub const SPECTRUM_CEILING: f64 = 1e12;

/// Receive-array and RS-grid parameters that shape the steering vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayModel {
    pub antennas: usize,
    pub subcarriers: usize,
    pub spacing_wavelengths: f64,
    /// δ_f·Δf (Hz).
    pub rs_frequency_step: f64,
}

impl From<&ScenarioConfig> for ArrayModel {
    fn from(cfg: &ScenarioConfig) -> Self {
        Self {
            antennas: cfg.antenna_count,
            subcarriers: cfg.rs_subcarrier_count,
            spacing_wavelengths: cfg.antenna_spacing_wavelengths,
            rs_frequency_step: cfg.rs_frequency_step(),
        }
    }
}

impl ArrayModel {
    pub fn dim(&self) -> usize {
        self.antennas * self.subcarriers
    }

    fn antenna_phases(&self, angle: f64) -> Vec<Complex64> {
        let step = TAU * self.spacing_wavelengths * angle.sin();
        (0..self.antennas).map(|p| Complex64::from_polar(1.0, step * p as f64)).collect()
    }

    fn subcarrier_phases(&self, delay: f64) -> Vec<Complex64> {
        let step = -TAU * self.rs_frequency_step * delay;
        (0..self.subcarriers).map(|n| Complex64::from_polar(1.0, step * n as f64)).collect()
    }
}

/// `s[p·N + n] = exp(j2π p (d/λ) sin φ) · exp(-j2π n δ_f Δf τ)`, with `φ`
/// measured from array broadside.
pub fn steering_vector(model: &ArrayModel, delay: f64, angle: f64) -> DVector<Complex64> {
    let a = model.antenna_phases(angle);
    let g = model.subcarrier_phases(delay);
    DVector::from_fn(model.dim(), |i, _| a[i / model.subcarriers] * g[i % model.subcarriers])
}

/// Uniform angle grid over `[-π/2, π/2]` with the given step in degrees.
pub fn angle_grid(step_deg: f64) -> Vec<f64> {
    assert!(step_deg > 0.0);
    let count = (180.0 / step_deg).round() as usize;
    (0..=count)
        .map(|i| (-90.0 + i as f64 * step_deg).to_radians().clamp(-FRAC_PI_2, FRAC_PI_2))
        .collect()
}

/// Pseudo-spectrum sampled on (pruned delay bins) × (angle grid).
#[derive(Debug, Clone)]
pub struct SpectrumGrid {
    pub delay_bins: Vec<usize>,
    pub delays: Vec<f64>,
    pub angles: Vec<f64>,
    /// Rows follow `delay_bins`, columns follow `angles`.
    pub values: DMatrix<f64>,
    /// Window index of each row; rows are delay-adjacent only within a window.
    pub row_window: Vec<usize>,
    pub windows: Vec<DelayWindow>,
    /// Number of steering vectors evaluated, `G_τ,pruned · G_φ`.
    pub steering_evaluations: usize,
}

/// A spectrum peak: estimated delay and broadside-relative AoA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEstimate {
    pub delay: f64,
    pub aoa: f64,
    pub value: f64,
    pub delay_bin: usize,
    pub angle_index: usize,
}

/// Evaluates `P(τ,φ) = 1/(sᴴ E_n E_nᴴ s)` on every bin of `windows` and
/// every angle.
///
/// The steering vector factors into antenna and subcarrier terms, so the
/// projection onto the subspace basis is contracted over subcarriers once
/// per delay and over antennas once per angle.
pub fn music_spectrum(
    split: &SubspaceSplit,
    windows: &[DelayWindow],
    angles: &[f64],
    model: &ArrayModel,
    bin_delay: f64,
) -> SpectrumGrid {
    let (basis, complement) = match split.explicit_noise_subspace() {
        Some(en) => (en, false),
        None => (split.signal_subspace(), true),
    };
    let cols = basis.ncols();
    let (p_count, n_count) = (model.antennas, model.subcarriers);
    let norm_sq = model.dim() as f64;
    let antenna: Vec<Vec<Complex64>> = angles.iter().map(|&a| model.antenna_phases(a)).collect();

    let mut delay_bins = Vec::new();
    let mut row_window = Vec::new();
    for (wi, w) in windows.iter().enumerate() {
        for b in w.bins() {
            delay_bins.push(b);
            row_window.push(wi);
        }
    }
    let delays: Vec<f64> = delay_bins.iter().map(|&b| b as f64 * bin_delay).collect();
    let mut values = DMatrix::zeros(delay_bins.len(), angles.len());
    let mut reduced = vec![Complex64::new(0.0, 0.0); p_count * cols];
    for (row, &delay) in delays.iter().enumerate() {
        let g = model.subcarrier_phases(delay);
        for p in 0..p_count {
            for k in 0..cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for (n, gn) in g.iter().enumerate() {
                    acc += gn.conj() * basis[(p * n_count + n, k)];
                }
                reduced[p * cols + k] = acc;
            }
        }
        for (col, a) in antenna.iter().enumerate() {
            let mut q = 0.0;
            for k in 0..cols {
                let mut c = Complex64::new(0.0, 0.0);
                for (p, ap) in a.iter().enumerate() {
                    c += ap.conj() * reduced[p * cols + k];
                }
                q += c.norm_sqr();
            }
            let den = if complement { norm_sq - q } else { q };
            values[(row, col)] = 1.0 / den.max(1.0 / SPECTRUM_CEILING);
        }
    }
    SpectrumGrid {
        steering_evaluations: delay_bins.len() * angles.len(),
        delay_bins,
        delays,
        angles: angles.to_vec(),
        values,
        row_window,
        windows: windows.to_vec(),
    }
}

/// 2D local maxima (8-neighbourhood, within each delay window), strongest
/// first, at most `max_targets`.
///
/// Ties between equal neighbours go to the lower flat index
/// `row · G_φ + col`, so a plateau reports its lowest-index cell. The angle
/// of each peak is refined by a parabola through the log-spectrum at the
/// peak and its two angular neighbours.
pub fn find_spectrum_peaks(grid: &SpectrumGrid, max_targets: usize) -> Vec<PathEstimate> {
    let (rows, cols) = grid.values.shape();
    let v = &grid.values;
    let idx = |r: usize, c: usize| r * cols + c;
    let mut peaks: Vec<(usize, usize)> = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let here = v[(r, c)];
            let mut is_peak = true;
            'scan: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nr >= rows as i64 || nc >= cols as i64 {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    if grid.row_window[nr] != grid.row_window[r] {
                        continue;
                    }
                    let other = v[(nr, nc)];
                    if other > here || (other == here && idx(nr, nc) < idx(r, c)) {
                        is_peak = false;
                        break 'scan;
                    }
                }
            }
            if is_peak {
                peaks.push((r, c));
            }
        }
    }
    peaks.sort_by(|a, b| v[*b].total_cmp(&v[*a]).then(idx(a.0, a.1).cmp(&idx(b.0, b.1))));
    peaks.truncate(max_targets);
    peaks
        .into_iter()
        .map(|(r, c)| PathEstimate {
            delay: grid.delays[r],
            aoa: refine_angle(grid, r, c),
            value: v[(r, c)],
            delay_bin: grid.delay_bins[r],
            angle_index: c,
        })
        .collect()
}

fn refine_angle(grid: &SpectrumGrid, r: usize, c: usize) -> f64 {
    let a = &grid.angles;
    if c == 0 || c + 1 >= a.len() {
        return a[c];
    }
    let y = |k: usize| grid.values[(r, k)].ln();
    let (ym, y0, yp) = (y(c - 1), y(c), y(c + 1));
    let den = ym - 2.0 * y0 + yp;
    if den >= 0.0 || !den.is_finite() {
        return a[c];
    }
    let offset = (0.5 * (ym - yp) / den).clamp(-0.5, 0.5);
    let step = if offset >= 0.0 { a[c + 1] - a[c] } else { a[c] - a[c - 1] };
    (a[c] + offset * step).clamp(-FRAC_PI_2, FRAC_PI_2)
}
