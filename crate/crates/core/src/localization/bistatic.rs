//! Bistatic inversion from (delay, AoA) to a floor-plane position.
//!
//! The target lies on the ellipse with foci Tx and Rx whose path sum is
//! `L_Tar = c·τ`. Along the receive bearing `φ_g` the law of cosines gives
//!
//! `L_Tar,1 = (L_Tar² − L_Tx²) / (2 L_Tar − 2 L_Tx cos(θ_Tar + θ_Tx))`
//!
//! with `θ_Tar = π − φ_g`. Here `φ_g = normal + φ̂` is the global receive
//! bearing and `θ_Tx = α_Tx − π`, where `α_Tx` is the global bearing of the
//! transmitter seen from the receiver, so that `cos(θ_Tar + θ_Tx)` is the
//! cosine of the angle between the target and transmitter bearings.

use std::f64::consts::PI;

use crate::geometry::{bearing, Vec2};
use crate::scenario::ScenarioConfig;
use crate::SPEED_OF_LIGHT;

/// Minimum relative denominator accepted by the inversion.
pub const GEOMETRY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticGeometry {
    /// Tx–Rx baseline length `L_Tx` (m).
    pub baseline: f64,
    /// Global bearing of the transmitter seen from the receiver (rad).
    pub tx_aoa: f64,
    pub rx_position: Vec2,
    /// Receive array broadside, global frame (rad).
    pub rx_array_normal: f64,
}

impl From<&ScenarioConfig> for BistaticGeometry {
    fn from(cfg: &ScenarioConfig) -> Self {
        let d = cfg.tx() - cfg.rx();
        Self {
            baseline: d.norm(),
            tx_aoa: bearing(&d),
            rx_position: cfg.rx(),
            rx_array_normal: cfg.rx_array_normal(),
        }
    }
}

/// Why a (delay, AoA) pair could not be inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryRejection {
    /// Path length at or below the direct path: degenerate ellipse.
    BelowBaseline,
    /// Denominator of the range equation vanishes.
    DegenerateDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticSolution {
    pub position: Vec2,
    /// Receiver-to-target range `L_Tar,1`.
    pub rx_range: f64,
    /// Target-to-transmitter range `L_Tar,2`.
    pub tx_range: f64,
}

/// Inverts a delay and a broadside-relative AoA into a position.
pub fn solve_bistatic_position(
    delay: f64,
    aoa: f64,
    geom: &BistaticGeometry,
) -> Result<BistaticSolution, GeometryRejection> {
    let path = SPEED_OF_LIGHT * delay;
    let base = geom.baseline;
    if path <= base * (1.0 + GEOMETRY_EPS) {
        return Err(GeometryRejection::BelowBaseline);
    }
    let global = geom.rx_array_normal + aoa;
    let theta_tar = PI - global;
    let theta_tx = geom.tx_aoa - PI;
    let den = 2.0 * path - 2.0 * base * (theta_tar + theta_tx).cos();
    if den <= GEOMETRY_EPS * path {
        return Err(GeometryRejection::DegenerateDenominator);
    }
    let rx_range = (path * path - base * base) / den;
    Ok(BistaticSolution {
        position: geom.rx_position + rx_range * Vec2::new(global.cos(), global.sin()),
        rx_range,
        tx_range: path - rx_range,
    })
}
