//! Anytime multi-resolution, multi-heuristic best-first search.
//!
//! The planner in [`search`] runs a weighted anchor search over the union of
//! several action spaces while any number of (possibly inadmissible)
//! heuristics, each tied to one resolution, drive their own queues. Every
//! iteration publishes a path whose cost is within `w1 * w2` of the optimum on
//! the union graph; the weights are tightened until `(1, 1)`.
//!
//! Two concrete domains are provided:
//!
//! * [`grid2d`]: costed occupancy grids with 4- or 8-connected moves at a set
//!   of resolution factors (MovingAI map ingestion included).
//! * [`uav4d`]: a `(x, y, heading, speed)` state lattice driven by motion
//!   primitives at a 3 m and a 9 m position resolution, with Euclidean, Dubins
//!   and backward-Dijkstra heuristics.

pub mod grid2d;
pub mod search;
pub mod uav4d;

pub use search::{
    plan, Domain, HeuristicFn, HeuristicSpec, Heuristics, PlanError, PlanOutcome, PlanStatus, Planner, PlannerConfig,
    ProblemInstance, ResolutionSet, SolutionRecord, Successor,
};
