//! Round trip from target positions to (delay, AoA) and back through the
//! bistatic ellipse.

use isac_track::geometry::bearing;
use isac_track::localization::{solve_bistatic_position, BistaticGeometry};
use isac_track::scenario::ScenarioConfig;
use isac_track::{Vec2, SPEED_OF_LIGHT};

fn main() {
    let cfg = ScenarioConfig::prototype_grid();
    let geom = BistaticGeometry::from(&cfg);
    println!("baseline {:.2} m, transmitter bearing {:.1} deg", geom.baseline, geom.tx_aoa.to_degrees());
    for target in [Vec2::new(1.0, 2.0), Vec2::new(4.0, 5.0), Vec2::new(-2.0, 6.0), Vec2::new(2.5, 0.3)] {
        let delay = cfg.bistatic_range(&target) / SPEED_OF_LIGHT;
        let rel = bearing(&(target - cfg.rx())) - cfg.rx_array_normal();
        match solve_bistatic_position(delay, rel, &geom) {
            Ok(sol) => println!(
                "target ({:+.2}, {:+.2}): delay {:.3} ns, aoa {:+.1} deg -> ({:+.6}, {:+.6}), ranges {:.3} / {:.3} m",
                target.x,
                target.y,
                1e9 * delay,
                rel.to_degrees(),
                sol.position.x,
                sol.position.y,
                sol.rx_range,
                sol.tx_range
            ),
            Err(why) => println!("target ({:+.2}, {:+.2}): rejected, {why:?}", target.x, target.y),
        }
    }
    let direct = geom.baseline / SPEED_OF_LIGHT;
    println!("direct-path delay: {:?}", solve_bistatic_position(direct, 0.0, &geom).err());
}
