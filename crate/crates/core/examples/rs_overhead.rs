//! Sensing reference-signal overhead for a few grid spacings.

use isac_track::scenario::{format_percent, rs_overhead};

fn main() {
    for (df, dt) in [(24, 864), (12, 432), (4, 14), (1, 1)] {
        println!("delta_f = {df:>3}, delta_t = {dt:>4}: {}", format_percent(rs_overhead(df, dt), 2));
    }
}
