//! Benchmark harness for the planner: seeded fixtures and problem sampling,
//! named baseline presets, the trial matrix with CSV and JSON-lines output,
//! an exact Dijkstra oracle, and property suites that check the planner's
//! guarantees against it.

pub mod fixtures;
pub mod matrix;
pub mod oracle;
pub mod results;
pub mod sampling;
pub mod scenario;
pub mod verify;

pub use matrix::{monotonicity_violations, run_matrix, run_trial, MapEntry, MatrixSpec};
pub use oracle::{oracle_opt, reachable, OracleError};
pub use results::{read_csv, read_curves, summarize, write_csv, write_curves, CurvePoint, Curves, TrialResult, TrialRow};
pub use scenario::{
    run_grid, run_grid_with, run_task, run_uav, run_uav_with, BenchError, BenchPreset, GridScenario, Level, Scenario, Task,
    UavScenario,
};
