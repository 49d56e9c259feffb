//! Two targets cross with a detection dropout at the intersection: penalty
//! gating against an ungated baseline.

use isac_track::tracking::{crossing_case, track_crossing, CrossingSpec, TrackerParams};

fn main() {
    let spec = CrossingSpec::default();
    let penalty = TrackerParams::default();
    let baseline = TrackerParams {
        distance_threshold_m: f64::INFINITY,
        ..penalty.clone()
    };
    let (mut p_swaps, mut b_swaps) = (0, 0);
    for seed in 0..10 {
        let case = crossing_case(seed, &spec);
        let (_, p) = track_crossing(&case, &spec, &penalty);
        let (_, b) = track_crossing(&case, &spec, &baseline);
        println!(
            "seed {seed}: penalty {} swaps (median {:.3} m), baseline {} swaps (median {:.3} m)",
            p.swaps,
            p.median_m.unwrap_or(f64::NAN),
            b.swaps,
            b.median_m.unwrap_or(f64::NAN)
        );
        p_swaps += p.swaps;
        b_swaps += b.swaps;
    }
    println!("total: penalty {p_swaps}, baseline {b_swaps}");
}
