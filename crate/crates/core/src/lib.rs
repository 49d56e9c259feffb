//! Bistatic OFDM sensing simulator and multi-person tracking pipeline.
//!
//! The crate synthesizes channel state information (CSI) observed on a sparse
//! grid of sensing reference signals, then reconstructs target trajectories:
//!
//! 1. [`mti`]: temporal-average moving target indication removes static clutter.
//! 2. [`localization`]: CIR-guided, search-pruned 2D-MUSIC estimates joint
//!    delay/AoA, and bistatic geometry converts each peak into a position.
//! 3. [`clustering`]: DBSCAN over a sliding window of detections rejects
//!    short-lived fake targets.
//! 4. [`tracking`]: constant-velocity Kalman filters with penalty-cost
//!    assignment keep identities through path crossings.
//! 5. [`pipeline`]: orchestration, metrics and file export.
//!
//! [`scenario`] holds the channel model used to generate ground-truth-labelled
//! CSI for every stage above.

pub mod clustering;
pub mod error;
pub mod geometry;
pub mod localization;
pub mod mti;
pub mod pipeline;
pub mod scenario;
pub mod tracking;

pub use error::{Error, Result};
pub use geometry::Vec2;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
