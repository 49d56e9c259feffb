//! Propagation paths of the bistatic channel at a given instant.

use num_complex::Complex64;

use super::config::ScenarioConfig;
use crate::geometry::{bearing, vec2, Vec2};
use crate::SPEED_OF_LIGHT;

/// Origin of a propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Direct,
    Clutter(usize),
    Target(u32),
}

/// One term of the multipath CSI sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationPath {
    /// Bistatic delay τ (s).
    pub delay: f64,
    /// Angle of arrival at the receiver, global frame (rad).
    pub aoa: f64,
    /// Doppler shift f_D (Hz).
    pub doppler: f64,
    /// Complex gain b.
    pub gain: Complex64,
    pub kind: PathKind,
}

impl PropagationPath {
    pub fn is_static(&self) -> bool {
        self.doppler == 0.0
    }
}

fn path_to(cfg: &ScenarioConfig, p: &Vec2) -> (f64, f64) {
    (cfg.bistatic_range(p) / SPEED_OF_LIGHT, bearing(&(p - cfg.rx())))
}

/// All paths present at time `t`: the direct Tx→Rx path, every clutter
/// path and one path per active target.
///
/// Target Doppler is `-(1/λ)·dR/dt` of the bistatic range `R`, taken as a
/// central difference over one RS period and clamped to the target's
/// time span at its ends.
pub fn paths_at(cfg: &ScenarioConfig, t: f64) -> Vec<PropagationPath> {
    let baseline = (cfg.tx() - cfg.rx()).norm();
    let mut paths = Vec::with_capacity(1 + cfg.clutter_paths.len() + cfg.targets.len());
    paths.push(PropagationPath {
        delay: baseline / SPEED_OF_LIGHT,
        aoa: bearing(&(cfg.tx() - cfg.rx())),
        doppler: 0.0,
        gain: cfg.direct_gain(),
        kind: PathKind::Direct,
    });
    for (i, c) in cfg.clutter_paths.iter().enumerate() {
        let (delay, aoa) = path_to(cfg, &vec2(c.position_m));
        paths.push(PropagationPath {
            delay,
            aoa,
            doppler: 0.0,
            gain: Complex64::new(c.gain[0], c.gain[1]),
            kind: PathKind::Clutter(i),
        });
    }
    let half = 0.5 * cfg.frame_period();
    let lambda = cfg.wavelength();
    for target in cfg.targets.iter().filter(|tr| tr.is_active(t)) {
        let pos = target.position_at(t);
        let (delay, aoa) = path_to(cfg, &pos);
        let (start, end) = target.span();
        let (t0, t1) = ((t - half).max(start), (t + half).min(end));
        let doppler = if t1 > t0 {
            let r0 = cfg.bistatic_range(&target.position_at(t0));
            let r1 = cfg.bistatic_range(&target.position_at(t1));
            -(r1 - r0) / (t1 - t0) / lambda
        } else {
            0.0
        };
        paths.push(PropagationPath {
            delay,
            aoa,
            doppler,
            gain: target.reflectivity(),
            kind: PathKind::Target(target.id),
        });
    }
    paths
}

/// Ground-truth positions of the evaluated targets active at `t`.
pub fn ground_truth_at(cfg: &ScenarioConfig, t: f64) -> Vec<(u32, Vec2)> {
    cfg.targets
        .iter()
        .filter(|tr| tr.ground_truth && tr.is_active(t))
        .map(|tr| (tr.id, tr.position_at(t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::TargetTrajectory;

    fn cfg_with(target: TargetTrajectory) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::prototype_grid();
        cfg.tx_position_m = [10.0, 0.0];
        cfg.rx_position_m = [0.0, 0.0];
        cfg.targets.push(target);
        cfg
    }

    #[test]
    fn target_delay_and_aoa() {
        let cfg = cfg_with(TargetTrajectory {
            id: 7,
            waypoints: vec![[0.0, 0.0, 5.0]],
            reflectivity: [0.1, 0.0],
            ground_truth: true,
        });
        let paths = paths_at(&cfg, 0.0);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].kind, PathKind::Direct);
        assert!((paths[0].delay - 10.0 / SPEED_OF_LIGHT).abs() < 1e-20);
        let tp = paths[1];
        assert_eq!(tp.kind, PathKind::Target(7));
        let expected = (125f64.sqrt() + 5.0) / SPEED_OF_LIGHT;
        assert!((tp.delay - expected).abs() < 1e-20);
        assert!((tp.aoa - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // Stationary target: zero Doppler.
        assert_eq!(tp.doppler, 0.0);
    }

    #[test]
    fn radial_motion_doppler_matches_analytic_rate() {
        // Target receding from Rx along the y-axis at 1 m/s with Tx on x.
        let cfg = cfg_with(TargetTrajectory {
            id: 1,
            waypoints: vec![[0.0, 0.0, 4.0], [2.0, 0.0, 6.0]],
            reflectivity: [0.1, 0.0],
            ground_truth: true,
        });
        let t = 1.0;
        let y: f64 = 5.0;
        let rate = 1.0 + y / (100.0 + y * y).sqrt();
        let tp = paths_at(&cfg, t)[1];
        let expected = -rate / cfg.wavelength();
        assert!((tp.doppler - expected).abs() < 1e-3 * expected.abs(), "{} vs {}", tp.doppler, expected);
    }

    #[test]
    fn tangential_motion_on_ellipse_has_near_zero_doppler() {
        // At (5, 5) the iso-range ellipse with foci (0,0),(10,0) has a
        // horizontal tangent, so motion along x keeps the bistatic range
        // stationary to first order.
        let cfg = cfg_with(TargetTrajectory {
            id: 1,
            waypoints: vec![[0.0, 4.0, 5.0], [1.0, 6.0, 5.0]],
            reflectivity: [0.1, 0.0],
            ground_truth: true,
        });
        let tp = paths_at(&cfg, 0.5)[1];
        // Finite-difference oracle: bistatic range sampled ±0.5 ms around t.
        let h = 5e-4;
        let r = |t: f64| cfg.bistatic_range(&cfg.targets[0].position_at(t));
        let fd = -(r(0.5 + h) - r(0.5 - h)) / (2.0 * h) / cfg.wavelength();
        assert!(fd.abs() < 0.1);
        assert!(tp.doppler.abs() < 0.1, "{}", tp.doppler);
    }

    #[test]
    fn inactive_targets_are_absent() {
        let cfg = cfg_with(TargetTrajectory {
            id: 1,
            waypoints: vec![[1.0, 4.0, 5.0], [1.001, 4.0, 5.0]],
            reflectivity: [0.1, 0.0],
            ground_truth: false,
        });
        assert_eq!(paths_at(&cfg, 0.5).len(), 1);
        assert_eq!(paths_at(&cfg, 1.0005).len(), 2);
        assert!(ground_truth_at(&cfg, 1.0005).is_empty());
    }
}
