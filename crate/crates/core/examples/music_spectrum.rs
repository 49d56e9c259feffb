//! CIR-guided 2D-MUSIC on two paths that share a delay bin, compared with
//! the full-grid search.

use isac_track::localization::*;
use isac_track::scenario::{synthesize_frame, NoiseSource, PathKind, PropagationPath, ScenarioConfig};
use num_complex::Complex64;

fn main() -> isac_track::Result<()> {
    let cfg = ScenarioConfig::prototype_grid();
    let model = ArrayModel::from(&cfg);
    let n_ifft = 4 * cfg.rs_subcarrier_count;
    let path = |delay: f64, rel_deg: f64, doppler: f64| PropagationPath {
        delay,
        aoa: cfg.rx_array_normal() + rel_deg.to_radians(),
        doppler,
        gain: Complex64::new(1.0, 0.0),
        kind: PathKind::Target(0),
    };
    let paths = [path(30e-9, 5.0, 35.0), path(30e-9, 25.0, -60.0), path(52e-9, -30.0, 80.0)];
    let mut noise = NoiseSource::new(1, 1.0);
    let frames: Vec<_> = (0..16).map(|m| noise.add_noise(&synthesize_frame(&paths, m, &cfg), 25.0)).collect();

    let cir = compute_cir(&frames, n_ifft, cfg.rs_frequency_step());
    let windows = detect_cir_peaks(&cir, 3, 6.0);
    let split = split_snapshots(&stack_snapshots(&frames)?, None, 4)?;
    println!("estimated sources: {}", split.source_count());
    println!("CIR windows: {:?}", windows.iter().map(|w| (w.start, w.end)).collect::<Vec<_>>());

    let angles = angle_grid(1.0);
    let full = [DelayWindow { start: 0, end: n_ifft - 1 }];
    for (name, w) in [("pruned", &windows[..]), ("full", &full[..])] {
        let grid = music_spectrum(&split, w, &angles, &model, cir.bin_delay);
        println!("{name}: {} steering evaluations", grid.steering_evaluations);
        for p in find_spectrum_peaks(&grid, split.source_count()) {
            println!("  delay {:.2} ns, aoa {:+.2} deg, value {:.3e}", 1e9 * p.delay, p.aoa.to_degrees(), p.value);
        }
    }
    Ok(())
}
