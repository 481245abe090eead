//! The anytime multi-resolution multi-heuristic search.
//!
//! [`Planner`] holds the `M + 1` queues (anchor plus one per inadmissible
//! heuristic), per-state `g`/back-pointer bookkeeping with per-resolution
//! closed flags, and the INCONS list carried between anytime iterations.
//! [`presets`] reduces it to the classic special cases (weighted A*, ARA*,
//! MHA*, A-MHA*, MRA*).

mod config;
mod domain;
mod planner;
pub mod presets;
mod problem;
mod queue;
mod solution;
#[cfg(test)]
pub(crate) mod testgraph;

use std::fmt;

pub use config::{PlannerConfig, QueuePolicy, WeightSchedule, SNAP_EPSILON};
pub use domain::{ActionId, Domain, ResolutionSet, SingleResolution, Successor, MAX_RESOLUTIONS};
pub use planner::{plan, Improve, PlanOutcome, PlanStatus, Planner, PopEvent};
pub use presets::{plan_succession, PresetKind};
pub use problem::{HeuristicFn, HeuristicSpec, Heuristics, ProblemInstance};
pub use queue::{IndexedHeap, NodeId, QueueEntry, TieBreak};
pub use solution::{validate_path, IterationStats, PathDefect, SolutionHeader, SolutionRecord, Waypoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("anchor heuristic is not consistent: {0}")]
    InconsistentAnchor(String),
    #[error("state {0} has not been discovered")]
    Undiscovered(String),
    #[error("search invariant violated: {0}")]
    InvariantViolated(String),
}

/// An anchor edge on which `h(from) > h(to) + cost`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyViolation<S> {
    pub from: S,
    pub to: S,
    pub h_from: f64,
    pub h_to: f64,
    pub cost: f64,
}

impl<S: fmt::Debug> fmt::Display for ConsistencyViolation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h({:?}) = {} > h({:?}) + c = {} + {}", self.from, self.h_from, self.to, self.h_to, self.cost)
    }
}

/// Checks `h(x) <= h(y) + c(x, y)` on every anchor edge leaving the sampled
/// states. A relative slack of `1e-9` absorbs floating-point rounding.
pub fn anchor_consistency_violations<D: Domain>(
    domain: &D,
    h: &dyn Fn(&D::State) -> f64,
    states: impl IntoIterator<Item = D::State>,
) -> Vec<ConsistencyViolation<D::State>> {
    let mut out = Vec::new();
    let mut succs = Vec::new();
    for x in states {
        succs.clear();
        domain.anchor_successors(&x, &mut succs);
        let hx = h(&x);
        for s in &succs {
            let hy = h(&s.state);
            if hy.is_infinite() {
                continue;
            }
            let rhs = hy + s.cost;
            if hx > rhs + 1e-9 * rhs.abs().max(1.0) {
                out.push(ConsistencyViolation { from: x, to: s.state, h_from: hx, h_to: hy, cost: s.cost });
            }
        }
    }
    out
}
