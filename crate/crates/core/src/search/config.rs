use std::time::Duration;

use super::queue::TieBreak;
use super::PlanError;

/// Weights at or below `1 + SNAP_EPSILON` on both components snap to `(1, 1)`.
pub const SNAP_EPSILON: f64 = 1e-9;

/// Rule producing the next `(w1, w2)` pair after an iteration.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSchedule {
    /// Multiply both weights by `decay`, clamping each at 1.
    Geometric { decay: f64 },
    /// Walk an explicit list of pairs (after the initial one), then `(1, 1)`.
    Explicit(Vec<(f64, f64)>),
}

impl Default for WeightSchedule {
    fn default() -> Self {
        WeightSchedule::Geometric { decay: 0.5 }
    }
}

impl WeightSchedule {
    /// `step` is the number of updates already applied.
    pub fn next(&self, w1: f64, w2: f64, step: usize) -> (f64, f64) {
        if w1 <= 1.0 + SNAP_EPSILON && w2 <= 1.0 + SNAP_EPSILON {
            return (1.0, 1.0);
        }
        let (n1, n2) = match self {
            WeightSchedule::Geometric { decay } => (w1 * decay, w2 * decay),
            WeightSchedule::Explicit(pairs) => pairs.get(step).copied().unwrap_or((1.0, 1.0)),
        };
        // never increase, never drop below 1
        (n1.min(w1).max(1.0), n2.min(w2).max(1.0))
    }

    fn validate(&self) -> Result<(), PlanError> {
        match self {
            WeightSchedule::Geometric { decay } => {
                if !(*decay > 0.0 && *decay < 1.0) {
                    return Err(PlanError::InvalidConfig(format!("decay {decay} must lie in (0, 1)")));
                }
            }
            WeightSchedule::Explicit(pairs) => {
                if let Some(bad) = pairs.iter().find(|(a, b)| !(a.is_finite() && b.is_finite() && *a >= 1.0 && *b >= 1.0)) {
                    return Err(PlanError::InvalidConfig(format!("schedule entry {bad:?} has a weight below 1")));
                }
            }
        }
        Ok(())
    }
}

/// Scheduling rule over the inadmissible queues.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueuePolicy {
    #[default]
    RoundRobin,
}

#[derive(Clone, Debug)]
pub struct PlannerConfig {
    pub w1_init: f64,
    pub w2_init: f64,
    pub schedule: WeightSchedule,
    /// `false` runs a single iteration at the initial weights.
    pub anytime: bool,
    /// Wall-clock cap, checked between expansions.
    pub time_budget: Option<Duration>,
    /// Deterministic alternative to `time_budget`: cap on total expansions.
    pub expansion_budget: Option<u64>,
    pub queue_policy: QueuePolicy,
    pub tie_break: TieBreak,
    /// Record every pop in [`Planner::trace`](super::Planner::trace).
    pub record_trace: bool,
    /// Check queue and node invariants after every expansion.
    pub check_invariants: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            w1_init: 3.0,
            w2_init: 2.0,
            schedule: WeightSchedule::default(),
            anytime: true,
            time_budget: None,
            expansion_budget: None,
            queue_policy: QueuePolicy::RoundRobin,
            tie_break: TieBreak::LowHLifo,
            record_trace: false,
            check_invariants: false,
        }
    }
}

impl PlannerConfig {
    pub fn with_weights(mut self, w1: f64, w2: f64) -> Self {
        self.w1_init = w1;
        self.w2_init = w2;
        self
    }

    pub fn single_iteration(mut self) -> Self {
        self.anytime = false;
        self
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        for (name, w) in [("w1", self.w1_init), ("w2", self.w2_init)] {
            if !(w.is_finite() && w >= 1.0) {
                return Err(PlanError::InvalidConfig(format!("{name} = {w} must be finite and >= 1")));
            }
        }
        self.schedule.validate()
    }

    /// The `(w1, w2)` pairs an anytime run visits, ending with `(1, 1)`.
    pub fn weight_sequence(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(self.w1_init, self.w2_init)];
        if !self.anytime {
            return out;
        }
        let (mut w1, mut w2) = (self.w1_init, self.w2_init);
        let mut step = 0;
        while !(w1 == 1.0 && w2 == 1.0) {
            (w1, w2) = self.schedule.next(w1, w2, step);
            step += 1;
            out.push((w1, w2));
            if step > 10_000 {
                break;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_halves_and_clamps() {
        let s = WeightSchedule::default();
        assert_eq!(s.next(3.0, 2.0, 0), (1.5, 1.0));
        assert_eq!(s.next(1.5, 1.0, 1), (1.0, 1.0));
        assert_eq!(s.next(1.0 + 1e-12, 1.0, 2), (1.0, 1.0));
    }

    #[test]
    fn default_sequence_reaches_one_in_three_iterations() {
        let cfg = PlannerConfig::default();
        assert_eq!(cfg.weight_sequence(), vec![(3.0, 2.0), (1.5, 1.0), (1.0, 1.0)]);
        assert_eq!(cfg.clone().single_iteration().weight_sequence(), vec![(3.0, 2.0)]);
    }

    #[test]
    fn explicit_schedule_never_increases() {
        let s = WeightSchedule::Explicit(vec![(2.0, 1.5), (5.0, 1.0)]);
        assert_eq!(s.next(3.0, 2.0, 0), (2.0, 1.5));
        assert_eq!(s.next(2.0, 1.5, 1), (2.0, 1.0));
        assert_eq!(s.next(2.0, 1.0, 2), (1.0, 1.0));
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(PlannerConfig::default().with_weights(0.5, 1.0).validate().is_err());
        assert!(PlannerConfig::default().with_weights(1.0, f64::NAN).validate().is_err());
        let cfg = PlannerConfig { schedule: WeightSchedule::Geometric { decay: 1.0 }, ..PlannerConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(PlannerConfig::default().validate().is_ok());
    }
}
