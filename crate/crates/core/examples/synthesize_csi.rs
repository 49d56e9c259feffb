//! Synthesizes noisy CSI for a walker in a cluttered room and prints the
//! propagation paths and per-frame power.

use isac_track::scenario::{paths_at, Scenario, ScenarioConfig, StaticPath, TargetTrajectory};

fn main() -> isac_track::Result<()> {
    let mut cfg = ScenarioConfig::prototype_grid();
    cfg.snr_db = 25.0;
    cfg.frame_count = 8;
    cfg.clutter_paths.push(StaticPath { position_m: [-1.0, 4.0], gain: [0.3, 0.0] });
    cfg.targets.push(TargetTrajectory {
        id: 1,
        waypoints: vec![[0.0, 1.0, 2.0], [4.0, 4.0, 5.0]],
        reflectivity: [0.1, 0.0],
        ground_truth: true,
    });
    let scenario = Scenario::new(cfg)?;
    let cfg = scenario.config();
    println!("frame period {:.2} ms, max delay {:.1} ns", 1e3 * cfg.frame_period(), 1e9 * cfg.max_unambiguous_delay());
    for p in paths_at(cfg, 0.0) {
        println!(
            "{:?}: delay {:.2} ns, aoa {:.1} deg, doppler {:.2} Hz, |gain| {:.3}",
            p.kind,
            1e9 * p.delay,
            p.aoa.to_degrees(),
            p.doppler,
            p.gain.norm()
        );
    }
    for frame in scenario.frames(1) {
        println!("frame {} at {:.3} s: power {:.4}", frame.index, frame.timestamp, frame.power());
    }
    Ok(())
}
