use super::domain::Domain;
use super::PlanError;

/// Heuristic evaluation. Must be reentrant; `f64::INFINITY` marks a state
/// from which the goal is known to be unreachable.
pub type HeuristicFn<'a, S> = Box<dyn Fn(&S) -> f64 + Send + Sync + 'a>;

/// One inadmissible heuristic and the resolution its queue searches.
pub struct HeuristicSpec<'a, S> {
    pub name: String,
    /// `Res(i)`, in `1..=N`.
    pub res: usize,
    pub eval: HeuristicFn<'a, S>,
}

impl<'a, S> HeuristicSpec<'a, S> {
    pub fn new(name: impl Into<String>, res: usize, eval: impl Fn(&S) -> f64 + Send + Sync + 'a) -> Self {
        HeuristicSpec { name: name.into(), res, eval: Box::new(eval) }
    }
}

impl<S> std::fmt::Debug for HeuristicSpec<'_, S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeuristicSpec").field("name", &self.name).field("res", &self.res).finish()
    }
}

/// The consistent anchor heuristic `h_0` plus the queue heuristics
/// `h_1..h_M`.
pub struct Heuristics<'a, S> {
    pub anchor: HeuristicFn<'a, S>,
    pub queues: Vec<HeuristicSpec<'a, S>>,
}

impl<'a, S> Heuristics<'a, S> {
    pub fn new(anchor: impl Fn(&S) -> f64 + Send + Sync + 'a) -> Self {
        Heuristics { anchor: Box::new(anchor), queues: Vec::new() }
    }

    pub fn with_queue(mut self, spec: HeuristicSpec<'a, S>) -> Self {
        self.queues.push(spec);
        self
    }

    /// Number of inadmissible queues (`M`).
    pub fn len(&self) -> usize {
        self.queues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queues.is_empty()
    }

    /// `h_i(state)` with `i = 0` the anchor.
    pub fn eval(&self, i: usize, state: &S) -> f64 {
        if i == 0 {
            (self.anchor)(state)
        } else {
            (self.queues[i - 1].eval)(state)
        }
    }

    /// `Res(i)`; the anchor maps to resolution 0.
    pub fn res(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.queues[i - 1].res
        }
    }

    /// Every resolution `1..=n` has a queue, and no queue names a resolution
    /// outside that range.
    pub fn validate(&self, n: usize) -> Result<(), PlanError> {
        if let Some(bad) = self.queues.iter().find(|q| q.res == 0 || q.res > n) {
            return Err(PlanError::InvalidConfig(format!(
                "heuristic {:?} targets resolution {} outside 1..={n}",
                bad.name, bad.res
            )));
        }
        for r in 1..=n {
            if !self.queues.iter().any(|q| q.res == r) {
                return Err(PlanError::InvalidConfig(format!("resolution {r} has no heuristic queue")));
            }
        }
        Ok(())
    }
}

/// Start state, goal set and the graph to search.
pub struct ProblemInstance<'a, D: Domain> {
    pub domain: &'a D,
    pub start: D::State,
    goals: Vec<D::State>,
}

impl<'a, D: Domain> ProblemInstance<'a, D> {
    pub fn new(domain: &'a D, start: D::State, goals: impl IntoIterator<Item = D::State>) -> Self {
        let mut goals: Vec<_> = goals.into_iter().collect();
        goals.sort();
        goals.dedup();
        ProblemInstance { domain, start, goals }
    }

    pub fn goals(&self) -> &[D::State] {
        &self.goals
    }

    pub fn is_goal(&self, state: &D::State) -> bool {
        self.goals.binary_search(state).is_ok()
    }

    /// The start must be valid and lie on every resolution.
    pub fn validate(&self) -> Result<(), PlanError> {
        let n = self.domain.num_resolutions();
        if n == 0 || n > super::domain::MAX_RESOLUTIONS {
            return Err(PlanError::InvalidConfig(format!("domain declares {n} resolutions")));
        }
        if self.goals.is_empty() {
            return Err(PlanError::InvalidProblem("empty goal set".into()));
        }
        if !self.domain.is_valid(&self.start) {
            return Err(PlanError::InvalidProblem(format!("start {:?} is not a valid state", self.start)));
        }
        let all = super::domain::ResolutionSet::all_up_to(n);
        if !all.is_subset(self.domain.resolutions_of(&self.start)) {
            return Err(PlanError::InvalidProblem(format!(
                "start {:?} lies on {:?}, not on every resolution",
                self.start,
                self.domain.resolutions_of(&self.start)
            )));
        }
        Ok(())
    }
}
