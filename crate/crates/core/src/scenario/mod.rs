//! Scenario definition and CSI synthesis.
//!
//! The simulated receiver observes calibrated CSI on RS resource elements
//! only: no OFDM modulation, LS estimation or synchronization impairments
//! are modelled. Angles are 2D (floor plane); the array resolves AoA only
//! within ±90° of its broadside.

mod config;
mod paths;
mod synth;

pub use config::{format_percent, rs_overhead, ScenarioConfig, StaticPath, TargetTrajectory};
pub use paths::{ground_truth_at, paths_at, PathKind, PropagationPath};
pub use synth::{array_response, delay_response, synthesize_frame, CsiFrame, NoiseSource};

/// A validated scenario with convenience accessors for frame generation.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> crate::Result<Self> {
        Ok(Self {
            config: config.validate()?,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Noiseless CSI at RS time index `m`.
    pub fn clean_frame(&self, m: usize) -> CsiFrame {
        let t = self.config.frame_time(m);
        synthesize_frame(&paths_at(&self.config, t), m, &self.config)
    }

    /// Noisy frames `0..frame_count`, drawn from a single noise stream.
    pub fn frames(&self, seed: u64) -> impl Iterator<Item = CsiFrame> + '_ {
        let mut noise = NoiseSource::new(seed, self.config.noise_reference_power);
        (0..self.config.frame_count).map(move |m| noise.add_noise(&self.clean_frame(m), self.config.snr_db))
    }
}
