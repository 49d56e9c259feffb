//! Planar (floor-plane) coordinates.

use nalgebra::Vector2;

/// A 2D position or displacement in metres, global frame.
pub type Vec2 = Vector2<f64>;

/// Builds a [`Vec2`] from an `[x, y]` pair as stored in config files.
pub fn vec2(xy: [f64; 2]) -> Vec2 {
    Vec2::new(xy[0], xy[1])
}

/// Direction angle of `v` in the global frame (rad, counter-clockwise from +x).
pub fn bearing(v: &Vec2) -> f64 {
    v.y.atan2(v.x)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}
