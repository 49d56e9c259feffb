//! Constant-velocity Kalman filter on the floor plane.
//!
//! State `[x, y, v_x, v_y]`, position-only measurements `H = [I₂ 0]`.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2, Vector4};

use crate::geometry::Vec2;

/// CV transition `F(dt)`.
pub fn cv_transition(dt: f64) -> Matrix4<f64> {
    let mut f = Matrix4::identity();
    f[(0, 2)] = dt;
    f[(1, 3)] = dt;
    f
}

/// Continuous white-acceleration process noise discretized over `dt`,
/// scaled by spectral density `q` (m²/s³).
pub fn cv_process_noise(dt: f64, q: f64) -> Matrix4<f64> {
    let (a, b, c) = (dt.powi(3) / 3.0, dt.powi(2) / 2.0, dt);
    q * Matrix4::new(
        a, 0.0, b, 0.0, //
        0.0, a, 0.0, b, //
        b, 0.0, c, 0.0, //
        0.0, b, 0.0, c,
    )
}

fn observation() -> Matrix2x4<f64> {
    Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub mean: Vector4<f64>,
    pub covariance: Matrix4<f64>,
}

impl TrackState {
    /// New state at `position` with zero velocity.
    pub fn new(position: Vec2, position_std: f64, velocity_std: f64) -> Self {
        let (p, v) = (position_std.powi(2), velocity_std.powi(2));
        Self {
            mean: Vector4::new(position.x, position.y, 0.0, 0.0),
            covariance: Matrix4::from_diagonal(&Vector4::new(p, p, v, v)),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.mean[0], self.mean[1])
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::new(self.mean[2], self.mean[3])
    }

    /// Propagates mean and covariance by `dt` and returns the predicted
    /// position.
    pub fn predict(&mut self, dt: f64, q: f64) -> Vec2 {
        assert!(dt > 0.0, "predict needs dt > 0");
        let f = cv_transition(dt);
        self.mean = f * self.mean;
        self.covariance = f * self.covariance * f.transpose() + cv_process_noise(dt, q);
        self.symmetrize();
        self.position()
    }

    /// Linear measurement update with isotropic noise `measurement_std`,
    /// in Joseph form.
    pub fn update(&mut self, z: Vec2, measurement_std: f64) {
        let h = observation();
        let r = Matrix2::identity() * measurement_std.powi(2);
        let innovation: Vector2<f64> = z - h * self.mean;
        let s = h * self.covariance * h.transpose() + r;
        let Some(s_inv) = s.try_inverse() else {
            return;
        };
        let k = self.covariance * h.transpose() * s_inv;
        self.mean += k * innovation;
        let i_kh = Matrix4::identity() - k * h;
        self.covariance = i_kh * self.covariance * i_kh.transpose() + k * r * k.transpose();
        self.symmetrize();
    }

    fn symmetrize(&mut self) {
        self.covariance = 0.5 * (self.covariance + self.covariance.transpose());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv_prediction() {
        let mut s = TrackState::new(Vec2::zeros(), 0.1, 1.0);
        s.mean[2] = 1.0;
        let p = s.predict(0.1, 0.5);
        assert!((p - Vec2::new(0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn static_state_grows_covariance_by_q() {
        let mut s = TrackState::new(Vec2::new(1.0, 2.0), 0.1, 0.0);
        let before = s.covariance;
        s.predict(0.2, 0.5);
        assert_eq!(s.position(), Vec2::new(1.0, 2.0));
        // Zero velocity variance: F Σ Fᵀ = Σ, so the increment is exactly Q.
        assert!((s.covariance - before - cv_process_noise(0.2, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn split_prediction_matches_single_step_mean() {
        let mut a = TrackState::new(Vec2::new(0.5, -1.0), 0.1, 1.0);
        a.mean[2] = 0.7;
        a.mean[3] = -0.2;
        let mut b = a;
        a.predict(0.05, 0.5);
        a.predict(0.05, 0.5);
        b.predict(0.1, 0.5);
        assert!((a.mean - b.mean).norm() < 1e-15);
        // Covariances differ only through Q composition.
        assert!((a.covariance - b.covariance).norm() > 0.0);
    }

    #[test]
    fn perfect_measurement_pins_position() {
        let mut s = TrackState::new(Vec2::zeros(), 1.0, 1.0);
        s.update(Vec2::new(0.3, -0.4), 1e-9);
        assert!((s.position() - Vec2::new(0.3, -0.4)).norm() < 1e-9);
    }

    #[test]
    fn uninformative_measurement_keeps_prior() {
        let mut s = TrackState::new(Vec2::new(1.0, 1.0), 0.2, 1.0);
        let prior = s;
        s.update(Vec2::new(5.0, 5.0), 1e9);
        assert!((s.mean - prior.mean).norm() < 1e-12);
    }
}
