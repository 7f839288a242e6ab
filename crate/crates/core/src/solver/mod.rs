//! Explicit finite-volume solver for the original and rescaled equations.

mod field;
mod grid;
mod run;
mod scheme;
pub mod snapshot;

use thiserror::Error;

pub use field::{Field, Frame};
pub use grid::Grid;
pub use run::{run, run_lockstep, RunRecord, SeriesRow};
pub use scheme::{Scheme, StepOutcome, EPS_FLOOR, SAFETY};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("time {0} must be finite and nonnegative")]
    NegativeTime(f64),
    #[error("value {value} at node {index} is negative or not finite")]
    NegativeValue { index: usize, value: f64 },
    #[error("step {dt} exceeds the stable limit {limit}")]
    Unstable { dt: f64, limit: f64 },
    #[error("field is in the {got} frame, expected {expected}")]
    WrongFrame { expected: Frame, got: Frame },
    #[error("snapshot times: {0}")]
    SnapshotTimes(String),
    #[error("end time {end} precedes start time {start}")]
    EndBeforeStart { start: f64, end: f64 },
    #[error("no fields to evolve")]
    Empty,
}
