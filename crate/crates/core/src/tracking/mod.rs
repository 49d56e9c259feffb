//! Multi-target tracking with a constant-velocity Kalman filter and
//! penalty-cost Hungarian association.

pub mod assignment;
pub mod crossing;
pub mod kalman;
pub mod tracker;

pub use assignment::{
    build_cost_matrix, hungarian, min_cost_assignment, solve_assignment, solve_exhaustive, Assignment,
    AssignmentProblem,
};
pub use crossing::{crossing_case, track_crossing, CrossingCase, CrossingSpec};
pub use kalman::{cv_process_noise, cv_transition, TrackState};
pub use tracker::{HistoryEntry, StepReport, Track, TrackStatus, Tracker, TrackerParams};
