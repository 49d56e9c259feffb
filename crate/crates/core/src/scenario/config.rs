//! Scenario description and validation.
//!
//! Field names carry their units so that config files are self-describing.
//! Accessors such as [`ScenarioConfig::wavelength`] return SI values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{vec2, Vec2};
use crate::SPEED_OF_LIGHT;

/// A static scatterer (wall, furniture) producing one clutter path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticPath {
    pub position_m: [f64; 2],
    /// Complex gain as `[re, im]`.
    pub gain: [f64; 2],
}

/// Piecewise constant-velocity motion through timed waypoints.
///
/// A target is present only while `t` lies inside its waypoint time span. A
/// single waypoint denotes a stationary target present for the whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetTrajectory {
    pub id: u32,
    /// `[t_s, x_m, y_m]` triples, strictly increasing in time.
    pub waypoints: Vec<[f64; 3]>,
    /// Complex reflectivity as `[re, im]`.
    #[serde(default = "default_reflectivity")]
    pub reflectivity: [f64; 2],
    /// Whether this target counts as ground truth in accuracy metrics.
    /// Injected fake reflections set this to `false`.
    #[serde(default = "default_true")]
    pub ground_truth: bool,
}

fn default_reflectivity() -> [f64; 2] {
    [0.1, 0.0]
}

fn default_true() -> bool {
    true
}

impl TargetTrajectory {
    pub fn reflectivity(&self) -> Complex64 {
        Complex64::new(self.reflectivity[0], self.reflectivity[1])
    }

    /// `(start, end)` of the time span during which the target exists.
    pub fn span(&self) -> (f64, f64) {
        match self.waypoints.len() {
            0 | 1 => (f64::NEG_INFINITY, f64::INFINITY),
            n => (self.waypoints[0][0], self.waypoints[n - 1][0]),
        }
    }

    pub fn is_active(&self, t: f64) -> bool {
        let (a, b) = self.span();
        t >= a && t <= b
    }

    /// Position at `t`, clamping to the end points outside the span.
    pub fn position_at(&self, t: f64) -> Vec2 {
        let w = &self.waypoints;
        if w.len() == 1 || t <= w[0][0] {
            return Vec2::new(w[0][1], w[0][2]);
        }
        for seg in w.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if t <= b[0] {
                let u = (t - a[0]) / (b[0] - a[0]);
                return Vec2::new(a[1] + u * (b[1] - a[1]), a[2] + u * (b[2] - a[2]));
            }
        }
        let last = w[w.len() - 1];
        Vec2::new(last[1], last[2])
    }
}

/// Geometry, RS grid, carrier, noise and scene content of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub carrier_ghz: f64,
    /// N: number of RS subcarriers.
    pub rs_subcarrier_count: usize,
    /// δ_f: RS spacing in subcarriers.
    pub rs_frequency_spacing: usize,
    pub subcarrier_spacing_khz: f64,
    /// δ_t: RS spacing in OFDM symbols.
    pub rs_time_spacing: usize,
    pub symbol_duration_us: f64,
    /// P: receive ULA size.
    #[serde(default = "default_antennas")]
    pub antenna_count: usize,
    #[serde(default = "default_spacing")]
    pub antenna_spacing_wavelengths: f64,
    pub tx_position_m: [f64; 2],
    pub rx_position_m: [f64; 2],
    /// Broadside direction of the receive array in the global frame.
    pub rx_array_normal_deg: f64,
    /// Per-frame SNR; `inf` disables noise.
    pub snr_db: f64,
    /// Noise power reference used when a frame carries no signal.
    #[serde(default = "default_reference_power")]
    pub noise_reference_power: f64,
    #[serde(default = "default_direct_gain")]
    pub direct_path_gain: [f64; 2],
    #[serde(default)]
    pub clutter_paths: Vec<StaticPath>,
    #[serde(default)]
    pub targets: Vec<TargetTrajectory>,
    pub frame_count: usize,
    #[serde(default = "default_snapshots")]
    pub snapshots_per_cpi: usize,
}

fn default_antennas() -> usize {
    8
}
fn default_spacing() -> f64 {
    0.5
}
fn default_reference_power() -> f64 {
    1.0
}
fn default_direct_gain() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_snapshots() -> usize {
    16
}

impl ScenarioConfig {
    /// Grid matching the 26 GHz prototype: N=76, δ_f=24, Δf=270 kHz,
    /// δ_t=864 symbols per 4 ms block. Scene content is left empty.
    pub fn prototype_grid() -> Self {
        Self {
            carrier_ghz: 26.0,
            rs_subcarrier_count: 76,
            rs_frequency_spacing: 24,
            subcarrier_spacing_khz: 270.0,
            rs_time_spacing: 864,
            symbol_duration_us: 4000.0 / 864.0,
            antenna_count: 8,
            antenna_spacing_wavelengths: 0.5,
            tx_position_m: [5.0, 0.0],
            rx_position_m: [0.0, 0.0],
            rx_array_normal_deg: 90.0,
            snr_db: f64::INFINITY,
            noise_reference_power: 1.0,
            direct_path_gain: [1.0, 0.0],
            clutter_paths: Vec::new(),
            targets: Vec::new(),
            frame_count: 1000,
            snapshots_per_cpi: 16,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)
    }

    pub fn antenna_spacing(&self) -> f64 {
        self.antenna_spacing_wavelengths * self.wavelength()
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.subcarrier_spacing_khz * 1e3
    }

    pub fn symbol_duration(&self) -> f64 {
        self.symbol_duration_us * 1e-6
    }

    /// Frequency step between adjacent RS subcarriers, δ_f·Δf (Hz).
    pub fn rs_frequency_step(&self) -> f64 {
        self.rs_frequency_spacing as f64 * self.subcarrier_spacing()
    }

    /// Time between consecutive RS observations, δ_t·T (s).
    pub fn frame_period(&self) -> f64 {
        self.rs_time_spacing as f64 * self.symbol_duration()
    }

    /// Largest delay observable without aliasing, 1/(δ_f·Δf).
    pub fn max_unambiguous_delay(&self) -> f64 {
        1.0 / self.rs_frequency_step()
    }

    pub fn frame_time(&self, m: usize) -> f64 {
        m as f64 * self.frame_period()
    }

    pub fn tx(&self) -> Vec2 {
        vec2(self.tx_position_m)
    }

    pub fn rx(&self) -> Vec2 {
        vec2(self.rx_position_m)
    }

    pub fn rx_array_normal(&self) -> f64 {
        self.rx_array_normal_deg.to_radians()
    }

    pub fn direct_gain(&self) -> Complex64 {
        Complex64::new(self.direct_path_gain[0], self.direct_path_gain[1])
    }

    /// P·N, the length of one vectorized snapshot.
    pub fn snapshot_len(&self) -> usize {
        self.antenna_count * self.rs_subcarrier_count
    }

    pub fn bistatic_range(&self, p: &Vec2) -> f64 {
        (self.tx() - p).norm() + (p - self.rx()).norm()
    }

    /// Longest bistatic path length (m) among all scatterers and waypoints.
    ///
    /// Bistatic range is convex in position, so the maximum over a
    /// straight segment is attained at a waypoint.
    pub fn max_bistatic_range(&self) -> f64 {
        let baseline = (self.tx() - self.rx()).norm();
        let clutter = self.clutter_paths.iter().map(|c| self.bistatic_range(&vec2(c.position_m)));
        let targets = self
            .targets
            .iter()
            .flat_map(|t| t.waypoints.iter())
            .map(|w| self.bistatic_range(&Vec2::new(w[1], w[2])));
        clutter.chain(targets).fold(baseline, f64::max)
    }

    /// Checks every scenario invariant and returns the config unchanged.
    pub fn validate(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.rs_subcarrier_count < 2 {
            return bad(format!("rs_subcarrier_count must be >= 2, got {}", self.rs_subcarrier_count));
        }
        if self.antenna_count < 2 {
            return bad(format!("antenna_count must be >= 2, got {}", self.antenna_count));
        }
        if self.rs_frequency_spacing < 1 || self.rs_time_spacing < 1 {
            return bad("rs_frequency_spacing and rs_time_spacing must be >= 1".into());
        }
        for (name, v) in [
            ("carrier_ghz", self.carrier_ghz),
            ("subcarrier_spacing_khz", self.subcarrier_spacing_khz),
            ("symbol_duration_us", self.symbol_duration_us),
            ("antenna_spacing_wavelengths", self.antenna_spacing_wavelengths),
            ("noise_reference_power", self.noise_reference_power),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return bad(format!("snr_db must be finite or +inf, got {}", self.snr_db));
        }
        if !self.rx_array_normal_deg.is_finite() {
            return bad("rx_array_normal_deg must be finite".into());
        }
        let all_xy = self
            .tx_position_m
            .iter()
            .chain(self.rx_position_m.iter())
            .chain(self.clutter_paths.iter().flat_map(|c| c.position_m.iter().chain(c.gain.iter())))
            .chain(self.direct_path_gain.iter());
        if all_xy.into_iter().any(|v| !v.is_finite()) {
            return bad("positions and gains must be finite".into());
        }
        if (self.tx() - self.rx()).norm() <= 1e-9 {
            return bad("tx_position_m coincides with rx_position_m".into());
        }
        if self.snapshots_per_cpi < 1 {
            return bad("snapshots_per_cpi must be >= 1".into());
        }
        let mut ids = std::collections::HashSet::new();
        for t in &self.targets {
            if !ids.insert(t.id) {
                return bad(format!("duplicate target id {}", t.id));
            }
            if t.waypoints.is_empty() {
                return bad(format!("target {} has no waypoints", t.id));
            }
            if t.waypoints.iter().flatten().chain(t.reflectivity.iter()).any(|v| !v.is_finite()) {
                return bad(format!("target {} has non-finite waypoint or reflectivity", t.id));
            }
            if t.waypoints.windows(2).any(|w| w[1][0] <= w[0][0]) {
                return bad(format!("target {} waypoint times are not strictly increasing", t.id));
            }
        }
        let max_delay = self.max_bistatic_range() / SPEED_OF_LIGHT;
        let limit = self.max_unambiguous_delay();
        if max_delay >= limit {
            return bad(format!(
                "delay ambiguity: max bistatic delay {:.3e} s >= 1/(δ_f·Δf) = {:.3e} s",
                max_delay, limit
            ));
        }
        Ok(self)
    }
}

/// Fraction of resource elements occupied by sensing RS, 1/(δ_f·δ_t).
pub fn rs_overhead(freq_spacing: usize, time_spacing: usize) -> f64 {
    assert!(freq_spacing >= 1 && time_spacing >= 1, "RS spacings must be >= 1");
    1.0 / (freq_spacing as f64 * time_spacing as f64)
}

/// Formats a fraction as a percentage rounded to `sig` significant figures.
pub fn format_percent(fraction: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant figure");
    let pct = fraction * 100.0;
    if pct == 0.0 || !pct.is_finite() {
        return format!("{pct}%");
    }
    let magnitude = pct.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).max(0) as usize;
    format!("{pct:.decimals$}%")
}
