//! Sliding-window DBSCAN keeps a persistent target and drops one-frame flashes.

use isac_track::clustering::{extract_targets, DetectionWindow};
use isac_track::localization::Detection;
use isac_track::Vec2;

fn main() {
    let mut window = DetectionWindow::new(5);
    for frame in 0..12 {
        let t = frame as f64 * 0.032;
        let mut dets = vec![Detection::at(Vec2::new(1.0 + 0.03 * frame as f64, 2.0), frame, t)];
        if frame % 4 == 1 {
            dets.push(Detection::at(Vec2::new(4.0, 1.0 + frame as f64 * 0.5), frame, t));
        }
        window.push(frame, t, dets);
        let centroids = extract_targets(&window, 0.5, 4);
        let shown: Vec<String> = centroids
            .iter()
            .map(|c| format!("({:.2}, {:.2})", c.position.x, c.position.y))
            .collect();
        println!("frame {frame:>2}: {} windowed points -> [{}]", window.len(), shown.join(", "));
    }
}
