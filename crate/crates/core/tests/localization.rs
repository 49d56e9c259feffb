mod common;

use common::{bin_delay, frames, grid, model, path};
use isac_track::localization::*;
use isac_track::scenario::{paths_at, synthesize_frame, NoiseSource, ScenarioConfig, TargetTrajectory};
use isac_track::Vec2;
use num_complex::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[test]
fn matched_filter_identity() {
    let cfg = grid();
    let p = path(&cfg, 31.7e-9, 23.0, 0.0, ONE);
    let block = stack_snapshots(&frames(&cfg, &[p], 1)).unwrap();
    let s = steering_vector(&model(&cfg), p.delay, 23f64.to_radians());
    let x = block.snapshots.column(0);
    let ip = s.dotc(&x);
    assert!((ip - Complex64::from(cfg.snapshot_len() as f64)).norm() < 1e-9);
}

#[test]
fn two_path_covariance_has_rank_two() {
    let cfg = grid();
    let paths = [
        path(&cfg, bin_delay(&cfg, 20), -10.0, 40.0, ONE),
        path(&cfg, bin_delay(&cfg, 33), 25.0, -65.0, Complex64::new(0.0, 0.7)),
    ];
    let r = estimate_covariance(&stack_snapshots(&frames(&cfg, &paths, 16)).unwrap());
    let split = split_subspace(&r, None, 4).unwrap();
    let ev = split.eigenvalues();
    assert!(ev[1] > 1e-3 * ev[0]);
    assert!(ev[2] < 1e-9 * ev[0]);
    assert_eq!(split.source_count(), 2);
}

#[test]
fn noiseless_paths_are_orthogonal_to_the_noise_subspace() {
    let cfg = grid();
    let m = model(&cfg);
    let truth = [(bin_delay(&cfg, 20), -10.0), (bin_delay(&cfg, 33), 25.0), (41.3e-9, 3.3)];
    let paths: Vec<_> = truth
        .iter()
        .zip([30.0, -55.0, 90.0])
        .map(|(&(d, a), f)| path(&cfg, d, a, f, ONE))
        .collect();
    let block = stack_snapshots(&frames(&cfg, &paths, 16)).unwrap();
    for split in [
        split_snapshots(&block, None, 4).unwrap(),
        split_subspace(&estimate_covariance(&block), None, 4).unwrap(),
    ] {
        assert_eq!(split.source_count(), 3);
        for &(d, a) in &truth {
            let s = steering_vector(&m, d, f64::to_radians(a));
            assert!(split.noise_power(&s).sqrt() < 1e-6);
        }
    }
}

#[test]
fn two_off_grid_paths_give_two_cir_maxima_at_nearest_bins() {
    let cfg = grid();
    let (u1, u2) = (12.3, 27.6);
    let d = |u: f64| u / (304.0 * cfg.rs_frequency_step());
    let paths = [path(&cfg, d(u1), 0.0, 0.0, ONE), path(&cfg, d(u2), 0.0, 0.0, ONE)];
    let cir = compute_cir(&frames(&cfg, &paths, 4), 304, cfg.rs_frequency_step());
    let p = &cir.power;
    let maxima: Vec<usize> = (1..p.len() - 1)
        .filter(|&k| p[k] > p[k - 1] && p[k] > p[k + 1] && p[k] > 0.1 * p[12])
        .collect();
    assert_eq!(maxima, vec![12, 28]);
}

fn on_grid_case(cfg: &ScenarioConfig) -> (Vec<isac_track::scenario::CsiFrame>, usize, usize) {
    let (u0, a0) = (24, 17.0);
    let f = frames(cfg, &[path(cfg, bin_delay(cfg, u0), a0, 25.0, ONE)], 16);
    (f, u0, (a0 + 90.0) as usize)
}

#[test]
fn single_on_grid_path_peaks_at_its_cell() {
    let cfg = grid();
    let m = model(&cfg);
    let (f, u0, k0) = on_grid_case(&cfg);
    let split = split_snapshots(&stack_snapshots(&f).unwrap(), None, 4).unwrap();
    let cir = compute_cir(&f, 304, m.rs_frequency_step);
    let angles = angle_grid(1.0);
    let full = music_spectrum(&split, &[DelayWindow { start: 0, end: 303 }], &angles, &m, cir.bin_delay);
    let peaks = find_spectrum_peaks(&full, 1);
    assert_eq!((peaks[0].delay_bin, peaks[0].angle_index), (u0, k0));
    assert!((peaks[0].aoa - 17f64.to_radians()).abs() < 0.5f64.to_radians());

    let windows = detect_cir_peaks(&cir, 3, 6.0);
    assert!(windows.iter().any(|w| w.contains(u0)));
    let pruned = find_spectrum_peaks(&music_spectrum(&split, &windows, &angles, &m, cir.bin_delay), 1);
    assert_eq!((pruned[0].delay_bin, pruned[0].angle_index), (u0, k0));
}

#[test]
fn equal_delay_paths_twenty_degrees_apart_are_resolved() {
    let cfg = grid();
    let m = model(&cfg);
    let d = bin_delay(&cfg, 30);
    let paths = [path(&cfg, d, 5.0, 35.0, ONE), path(&cfg, d, 25.0, -60.0, ONE)];
    let f = frames(&cfg, &paths, 16);
    let split = split_snapshots(&stack_snapshots(&f).unwrap(), None, 4).unwrap();
    assert_eq!(split.source_count(), 2);
    let cir = compute_cir(&f, 304, m.rs_frequency_step);
    let windows = detect_cir_peaks(&cir, 3, 6.0);
    let peaks = find_spectrum_peaks(&music_spectrum(&split, &windows, &angle_grid(1.0), &m, cir.bin_delay), 2);
    let mut found: Vec<(usize, usize)> = peaks.iter().map(|p| (p.delay_bin, p.angle_index)).collect();
    found.sort();
    assert_eq!(found, vec![(30, 95), (30, 115)]);
}

#[test]
fn steering_evaluations_follow_the_pruned_grid() {
    let cfg = grid();
    let m = model(&cfg);
    let (f, _, _) = on_grid_case(&cfg);
    let split = split_snapshots(&stack_snapshots(&f).unwrap(), None, 4).unwrap();
    let cir = compute_cir(&f, 304, m.rs_frequency_step);
    let windows = detect_cir_peaks(&cir, 3, 6.0);
    let angles = angle_grid(1.0);
    let g = music_spectrum(&split, &windows, &angles, &m, cir.bin_delay);
    let pruned_bins: usize = windows.iter().map(DelayWindow::len).sum();
    assert_eq!(g.steering_evaluations, pruned_bins * angles.len());
    assert!(g.steering_evaluations <= 304 * angles.len());
    assert!(g.values.iter().all(|&v| v > 0.0 && v <= SPECTRUM_CEILING));
}

#[test]
fn localize_cpi_recovers_a_target_position() {
    let mut cfg = grid();
    cfg.targets.push(TargetTrajectory {
        id: 1,
        waypoints: vec![[0.0, 1.5, 3.0], [1.0, 2.3, 3.6]],
        reflectivity: [0.1, 0.0],
        ground_truth: true,
    });
    // Only the target path plus receiver noise: the clutter-free post-MTI view.
    let mut noise = NoiseSource::new(5, 1.0);
    let f: Vec<_> = (0..16)
        .map(|m| {
            let t = cfg.frame_time(m);
            let paths: Vec<_> = paths_at(&cfg, t).into_iter().filter(|p| !p.is_static()).collect();
            noise.add_noise(&synthesize_frame(&paths, m, &cfg), 20.0)
        })
        .collect();
    let res = localize_cpi(&f, &model(&cfg), &BistaticGeometry::from(&cfg), &LocalizationParams::default(), 0, 0.0)
        .unwrap();
    assert_eq!(res.detections.len(), 1);
    let truth = cfg.targets[0].position_at(cfg.frame_time(8));
    assert!((res.detections[0].position - truth).norm() < 0.1);
    assert!(res.steering_evaluations < res.full_grid_evaluations / 4);
}

#[test]
fn law_of_cosines_holds_for_solved_ranges() {
    let cfg = ScenarioConfig {
        tx_position_m: [10.0, 0.0],
        ..grid()
    };
    let geom = BistaticGeometry::from(&cfg);
    for (x, y) in [(0.0, 5.0), (3.0, 2.0), (12.0, 4.0), (-2.0, 7.5)] {
        let p = Vec2::new(x, y);
        let l1 = p.norm();
        let l2 = (p - cfg.tx()).norm();
        let delay = (l1 + l2) / isac_track::SPEED_OF_LIGHT;
        let rel = y.atan2(x) - cfg.rx_array_normal();
        let sol = solve_bistatic_position(delay, rel, &geom).unwrap();
        let l_tx = geom.baseline;
        let angle = (sol.position.y).atan2(sol.position.x);
        let lhs = sol.tx_range.powi(2);
        let rhs = sol.rx_range.powi(2) + l_tx.powi(2) - 2.0 * sol.rx_range * l_tx * angle.cos();
        assert!((lhs - rhs).abs() <= 1e-9 * lhs);
        assert!((sol.position - p).norm() < 1e-9);
    }
}
