use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;

use super::config::{PlannerConfig, QueuePolicy};
use super::domain::{ActionId, Domain, ResolutionSet, Successor};
use super::problem::{Heuristics, ProblemInstance};
use super::queue::{IndexedHeap, NodeId, QueueEntry};
use super::solution::{IterationStats, SolutionRecord, Waypoint};
use super::PlanError;

/// Per-state search bookkeeping.
#[derive(Clone, Debug)]
struct Node<S> {
    state: S,
    g: f64,
    /// predecessor, action, edge cost
    bp: Option<(NodeId, ActionId, f64)>,
    resolutions: ResolutionSet,
    closed: ResolutionSet,
    closed_iter: u32,
    in_incons: bool,
    expansions: u32,
    expansions_iter: u32,
}

/// One pop from a queue, as recorded when `record_trace` is on.
#[derive(Clone, Debug, PartialEq)]
pub struct PopEvent<S> {
    pub iteration: u32,
    pub queue: usize,
    pub resolution: usize,
    pub state: S,
    pub key: f64,
    /// Successors whose `g` improved during this expansion.
    pub improved: u32,
}

/// Result of one `improve_path` call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Improve {
    SolutionFound(NodeId),
    Exhausted,
    /// Time or expansion budget ran out between expansions.
    Interrupted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanStatus {
    /// The last scheduled iteration completed (the `(1, 1)` iteration for
    /// anytime runs).
    Finished,
    /// No path exists in the union graph.
    NoPath,
    /// The budget ran out; `best` holds the last published solution, if any.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct PlanOutcome<S> {
    pub status: PlanStatus,
    pub best: Option<SolutionRecord<S>>,
    /// Every solution published during the run, in order.
    pub published: Vec<SolutionRecord<S>>,
    /// One entry per started iteration (including an interrupted last one).
    pub iterations: Vec<IterationStats>,
    pub expansions_total: u64,
    pub elapsed: Duration,
}

/// Anytime multi-resolution multi-heuristic planner over a [`Domain`].
///
/// Queue 0 is the anchor (consistent `h_0`, union action space). Queues
/// `1..=M` each carry one heuristic and search the action space of the
/// resolution that heuristic is tied to.
pub struct Planner<'p, D: Domain> {
    problem: &'p ProblemInstance<'p, D>,
    heuristics: &'p Heuristics<'p, D::State>,
    config: PlannerConfig,
    num_res: usize,
    queue_res: Vec<usize>,
    nodes: Vec<Node<D::State>>,
    index: FxHashMap<D::State, NodeId>,
    /// `nodes.len() * (M + 1)` cached heuristic values, NaN until evaluated.
    hcache: Vec<f64>,
    queues: Vec<IndexedHeap>,
    incons: Vec<NodeId>,
    w1: f64,
    w2: f64,
    iteration: u32,
    seq: u64,
    rr_next: usize,
    started: Instant,
    expansions_total: u64,
    current: IterationStats,
    history: Vec<IterationStats>,
    trace: Vec<PopEvent<D::State>>,
    succ_buf: Vec<Successor<D::State>>,
    best: Option<SolutionRecord<D::State>>,
    published: Vec<SolutionRecord<D::State>>,
}

impl<'p, D: Domain> Planner<'p, D> {
    pub fn new(
        problem: &'p ProblemInstance<'p, D>,
        heuristics: &'p Heuristics<'p, D::State>,
        config: PlannerConfig,
    ) -> Result<Self, PlanError> {
        config.validate()?;
        problem.validate()?;
        let num_res = problem.domain.num_resolutions();
        heuristics.validate(num_res)?;
        check_anchor_locally(problem, heuristics)?;

        let m = heuristics.len();
        let queue_res = (0..=m).map(|i| heuristics.res(i)).collect();
        let queues = (0..=m).map(|_| IndexedHeap::new(config.tie_break)).collect();
        let (w1, w2) = (config.w1_init, config.w2_init);
        Ok(Planner {
            problem,
            heuristics,
            config,
            num_res,
            queue_res,
            nodes: Vec::new(),
            index: FxHashMap::default(),
            hcache: Vec::new(),
            queues,
            incons: Vec::new(),
            w1,
            w2,
            iteration: 0,
            seq: 0,
            rr_next: 0,
            started: Instant::now(),
            expansions_total: 0,
            current: IterationStats::default(),
            history: Vec::new(),
            trace: Vec::new(),
            succ_buf: Vec::new(),
            best: None,
            published: Vec::new(),
        })
    }

    /// Number of inadmissible queues.
    pub fn num_queues(&self) -> usize {
        self.queue_res.len() - 1
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.w1, self.w2)
    }

    pub fn trace(&self) -> &[PopEvent<D::State>] {
        &self.trace
    }

    pub fn history(&self) -> &[IterationStats] {
        &self.history
    }

    pub fn num_discovered(&self) -> usize {
        self.nodes.len()
    }

    /// Cost-to-come of `state`, `None` if never discovered.
    pub fn g(&self, state: &D::State) -> Option<f64> {
        self.index.get(state).map(|&n| self.nodes[n as usize].g)
    }

    /// `g(x) + w1 * h_i(x)`.
    pub fn key(&mut self, state: &D::State, queue: usize) -> Result<f64, PlanError> {
        if queue >= self.queue_res.len() {
            return Err(PlanError::InvalidConfig(format!("queue {queue} out of range")));
        }
        match self.index.get(state) {
            Some(&n) if self.nodes[n as usize].g.is_finite() => Ok(self.key_of(n, queue)),
            _ => Err(PlanError::Undiscovered(format!("{state:?}"))),
        }
    }

    /// Round-robin over the inadmissible queues, skipping empty ones. `None`
    /// means every inadmissible queue is empty and the caller falls through to
    /// the anchor.
    pub fn choose_queue(&mut self) -> Option<usize> {
        match self.config.queue_policy {
            QueuePolicy::RoundRobin => {
                let m = self.num_queues();
                for k in 0..m {
                    let i = (self.rr_next + k) % m + 1;
                    if !self.queues[i].is_empty() {
                        self.rr_next = i % m;
                        return Some(i);
                    }
                }
                None
            }
        }
    }

    /// Runs the anytime loop, calling `on_solution` for every published
    /// solution. Published costs never increase.
    pub fn plan(&mut self, mut on_solution: impl FnMut(&SolutionRecord<D::State>)) -> Result<PlanOutcome<D::State>, PlanError> {
        self.reset();
        let start = self.discover(self.problem.start);
        self.nodes[start as usize].g = 0.0;
        self.push_incons(start);

        let mut step = 0;
        let status = loop {
            self.begin_iteration();
            let result = self.improve_path()?;
            self.finish_iteration();
            match result {
                Improve::SolutionFound(goal) => {
                    let record = self.publish(goal)?;
                    on_solution(&record);
                    // the goal has to be popped again to terminate the next
                    // iteration, so it re-enters as inconsistent
                    if self.closed(goal).contains(0) {
                        self.push_incons(goal);
                    }
                }
                Improve::Exhausted => {
                    if self.best.is_none() {
                        break PlanStatus::NoPath;
                    }
                }
                Improve::Interrupted => break PlanStatus::BudgetExhausted,
            }
            if !self.config.anytime || (self.w1 == 1.0 && self.w2 == 1.0) {
                break PlanStatus::Finished;
            }
            (self.w1, self.w2) = self.config.schedule.next(self.w1, self.w2, step);
            step += 1;
        };

        Ok(PlanOutcome {
            status,
            best: self.best.clone(),
            published: std::mem::take(&mut self.published),
            iterations: self.history.clone(),
            expansions_total: self.expansions_total,
            elapsed: self.started.elapsed(),
        })
    }

    fn reset(&mut self) {
        self.nodes.clear();
        self.index.clear();
        self.hcache.clear();
        for q in &mut self.queues {
            *q = IndexedHeap::new(self.config.tie_break);
        }
        self.incons.clear();
        (self.w1, self.w2) = (self.config.w1_init, self.config.w2_init);
        self.iteration = 0;
        self.seq = 0;
        self.rr_next = 0;
        self.started = Instant::now();
        self.expansions_total = 0;
        self.history.clear();
        self.trace.clear();
        self.best = None;
        self.published.clear();
    }

    /// INCONS joins the anchor queue, anchor keys are recomputed for the
    /// current `w1`, closed sets are cleared and the inadmissible queues are
    /// reseeded from the anchor queue under the `w2` filter.
    fn begin_iteration(&mut self) {
        self.iteration += 1;
        self.current = IterationStats {
            iteration: self.iteration,
            w1: self.w1,
            w2: self.w2,
            expansions_per_queue: vec![0; self.queue_res.len()],
            expansions_per_resolution: vec![0; self.num_res + 1],
            ..Default::default()
        };

        let mut anchor: Vec<QueueEntry> = self.queues[0].entries().to_vec();
        for e in &mut anchor {
            e.key = self.key_of(e.node, 0);
        }
        for x in std::mem::take(&mut self.incons) {
            self.nodes[x as usize].in_incons = false;
            if self.queues[0].contains(x) {
                continue;
            }
            let key = self.key_of(x, 0);
            if key.is_finite() {
                let h = self.h(x, 0);
                let seq = self.next_seq();
                anchor.push(QueueEntry { key, h, seq, node: x });
            }
        }

        for j in 1..self.queue_res.len() {
            let res = self.queue_res[j];
            let mut seeded = Vec::new();
            for e in &anchor {
                if !self.nodes[e.node as usize].resolutions.contains(res) {
                    continue;
                }
                let key = self.key_of(e.node, j);
                if key.is_finite() && key <= self.w2 * e.key {
                    seeded.push(QueueEntry { key, h: self.h(e.node, j), seq: e.seq, node: e.node });
                }
            }
            self.queues[j].rebuild(seeded);
        }
        self.queues[0].rebuild(anchor);
    }

    fn finish_iteration(&mut self) {
        self.current.expansions_total = self.expansions_total;
        self.current.elapsed = self.started.elapsed();
        self.current.open_sizes = self.queues.iter().map(IndexedHeap::len).collect();
        self.history.push(self.current.clone());
    }

    fn budget_exceeded(&self) -> bool {
        if let Some(cap) = self.config.expansion_budget {
            if self.expansions_total >= cap {
                return true;
            }
        }
        if let Some(limit) = self.config.time_budget {
            if self.started.elapsed() >= limit {
                return true;
            }
        }
        false
    }

    pub(crate) fn improve_path(&mut self) -> Result<Improve, PlanError> {
        loop {
            let Some(anchor_min) = self.queues[0].min_key() else {
                return Ok(Improve::Exhausted);
            };
            if self.budget_exceeded() {
                return Ok(Improve::Interrupted);
            }
            let queue = match self.choose_queue() {
                Some(i) if self.queues[i].min_key().is_some_and(|k| k <= self.w2 * anchor_min) => i,
                _ => 0,
            };
            let entry = self.queues[queue].pop().expect("chosen queue is non-empty");
            let x = entry.node;
            let res = self.queue_res[queue];

            let improved = self.expand(x, queue);
            self.close(x, res);
            self.count_expansion(x, queue, res);
            if self.config.record_trace {
                self.trace.push(PopEvent {
                    iteration: self.iteration,
                    queue,
                    resolution: res,
                    state: self.nodes[x as usize].state,
                    key: entry.key,
                    improved,
                });
            }
            if self.config.check_invariants {
                self.check_invariants()?;
            }
            if self.problem.is_goal(&self.nodes[x as usize].state) {
                return Ok(Improve::SolutionFound(x));
            }
        }
    }

    /// Generates the successors of `x` under the action space of
    /// `Res(queue)` and relaxes them. Returns how many improved.
    pub(crate) fn expand(&mut self, x: NodeId, queue: usize) -> u32 {
        let res = self.queue_res[queue];
        if queue != 0 {
            for j in 1..self.queue_res.len() {
                if j != queue && self.queue_res[j] == res {
                    self.queues[j].remove(x);
                }
            }
        }

        let mut succs = std::mem::take(&mut self.succ_buf);
        succs.clear();
        let state = self.nodes[x as usize].state;
        if res == 0 {
            self.problem.domain.anchor_successors(&state, &mut succs);
        } else {
            self.problem.domain.successors(&state, res, &mut succs);
        }

        let gx = self.nodes[x as usize].g;
        let mut improved = 0;
        for s in &succs {
            debug_assert!(s.cost >= 0.0 && s.cost.is_finite(), "edge cost {}", s.cost);
            let y = self.discover(s.state);
            let g_new = gx + s.cost;
            if g_new >= self.nodes[y as usize].g {
                continue;
            }
            improved += 1;
            let node = &mut self.nodes[y as usize];
            node.g = g_new;
            node.bp = Some((x, s.action, s.cost));
            if self.closed(y).contains(0) {
                self.push_incons(y);
                continue;
            }
            let key0 = self.key_of(y, 0);
            if !key0.is_finite() {
                continue;
            }
            let h0 = self.h(y, 0);
            self.update_queue(0, y, key0, h0);
            let resolutions = self.nodes[y as usize].resolutions;
            let closed = self.closed(y);
            for j in 1..self.queue_res.len() {
                let l = self.queue_res[j];
                if !resolutions.contains(l) || closed.contains(l) {
                    continue;
                }
                let key = self.key_of(y, j);
                if key <= self.w2 * key0 {
                    let h = self.h(y, j);
                    self.update_queue(j, y, key, h);
                }
            }
        }
        self.succ_buf = succs;
        improved
    }

    fn update_queue(&mut self, queue: usize, node: NodeId, key: f64, h: f64) {
        let seq = self.next_seq();
        self.queues[queue].push_or_update(QueueEntry { key, h, seq, node });
    }

    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    fn discover(&mut self, state: D::State) -> NodeId {
        if let Some(&n) = self.index.get(&state) {
            return n;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            state,
            g: f64::INFINITY,
            bp: None,
            resolutions: self.problem.domain.resolutions_of(&state),
            closed: ResolutionSet::EMPTY,
            closed_iter: 0,
            in_incons: false,
            expansions: 0,
            expansions_iter: 0,
        });
        self.index.insert(state, id);
        self.hcache.extend(std::iter::repeat_n(f64::NAN, self.queue_res.len()));
        id
    }

    fn h(&mut self, node: NodeId, queue: usize) -> f64 {
        let slot = node as usize * self.queue_res.len() + queue;
        let cached = self.hcache[slot];
        if !cached.is_nan() {
            return cached;
        }
        let v = self.heuristics.eval(queue, &self.nodes[node as usize].state);
        debug_assert!(v >= 0.0, "negative heuristic value {v}");
        self.hcache[slot] = v;
        v
    }

    fn key_of(&mut self, node: NodeId, queue: usize) -> f64 {
        let h = self.h(node, queue);
        if h.is_infinite() {
            return f64::INFINITY;
        }
        self.nodes[node as usize].g + self.w1 * h
    }

    fn closed(&self, node: NodeId) -> ResolutionSet {
        let n = &self.nodes[node as usize];
        if n.closed_iter == self.iteration {
            n.closed
        } else {
            ResolutionSet::EMPTY
        }
    }

    fn close(&mut self, node: NodeId, res: usize) {
        let iteration = self.iteration;
        let n = &mut self.nodes[node as usize];
        if n.closed_iter != iteration {
            n.closed = ResolutionSet::EMPTY;
            n.closed_iter = iteration;
        }
        n.closed.insert(res);
    }

    fn push_incons(&mut self, node: NodeId) {
        let n = &mut self.nodes[node as usize];
        if !n.in_incons {
            n.in_incons = true;
            self.incons.push(node);
        }
    }

    fn count_expansion(&mut self, node: NodeId, queue: usize, res: usize) {
        let iteration = self.iteration;
        let n = &mut self.nodes[node as usize];
        if n.expansions_iter != iteration {
            n.expansions = 0;
            n.expansions_iter = iteration;
        }
        n.expansions += 1;
        let count = n.expansions;
        self.expansions_total += 1;
        self.current.expansions += 1;
        self.current.expansions_per_queue[queue] += 1;
        self.current.expansions_per_resolution[res] += 1;
        self.current.max_expansions_of_any_state = self.current.max_expansions_of_any_state.max(count);
    }

    /// Traces back-pointers from `goal` and publishes the better of the new
    /// path and the incumbent under the current bound.
    fn publish(&mut self, goal: NodeId) -> Result<SolutionRecord<D::State>, PlanError> {
        let mut chain = vec![goal];
        let mut at = goal;
        while let Some((pred, _, _)) = self.nodes[at as usize].bp {
            at = pred;
            chain.push(at);
            if chain.len() > self.nodes.len() {
                return Err(PlanError::InvariantViolated("back-pointer cycle".into()));
            }
        }
        chain.reverse();
        let mut path = Vec::with_capacity(chain.len());
        let mut g = 0.0;
        for &n in &chain {
            let node = &self.nodes[n as usize];
            let action = node.bp.map(|(_, a, c)| {
                g += c;
                a
            });
            path.push(Waypoint { state: node.state, action, g });
        }
        let mut record =
            SolutionRecord { path, cost: g, bound: self.w1 * self.w2, iteration: self.iteration, stats: self.current.clone() };
        if let Some(best) = &self.best {
            if best.cost < record.cost {
                record.path = best.path.clone();
                record.cost = best.cost;
            }
        }
        self.best = Some(record.clone());
        self.published.push(record.clone());
        Ok(record)
    }

    /// Queue membership versus closed flags, INCONS bookkeeping, the
    /// per-iteration expansion cap, heap structure and back-pointer costs.
    pub fn check_invariants(&self) -> Result<(), PlanError> {
        let fail = |msg: String| Err(PlanError::InvariantViolated(msg));
        for (j, q) in self.queues.iter().enumerate() {
            if let Err(e) = q.check_structure() {
                return fail(format!("queue {j}: {e}"));
            }
            let res = self.queue_res[j];
            for e in q.entries() {
                let node = &self.nodes[e.node as usize];
                if self.closed(e.node).contains(res) {
                    return fail(format!("{:?} in queue {j} but closed at resolution {res}", node.state));
                }
                if j > 0 && !node.resolutions.contains(res) {
                    return fail(format!("{:?} in queue {j} but not on resolution {res}", node.state));
                }
                if !e.key.is_finite() {
                    return fail(format!("{:?} in queue {j} with key {}", node.state, e.key));
                }
            }
        }
        for &x in &self.incons {
            let node = &self.nodes[x as usize];
            if !node.in_incons || !self.closed(x).contains(0) {
                return fail(format!("{:?} in INCONS without being anchor-closed", node.state));
            }
        }
        let cap = self.num_res as u32 + 1;
        for node in &self.nodes {
            if node.expansions_iter == self.iteration && node.expansions > cap {
                return fail(format!("{:?} expanded {} times (cap {cap})", node.state, node.expansions));
            }
            if let Some((p, _, c)) = node.bp {
                let gp = self.nodes[p as usize].g;
                if node.g < gp + c - 1e-9 * node.g.abs().max(1.0) {
                    return fail(format!("{:?} has g {} below g(bp) + c = {}", node.state, node.g, gp + c));
                }
            }
        }
        Ok(())
    }

    /// Walks back-pointers from every discovered state; each chain must reach
    /// the start with strictly decreasing `g` (for positive edge costs).
    pub fn check_backpointer_chains(&self) -> Result<(), PlanError> {
        for (i, node) in self.nodes.iter().enumerate() {
            if !node.g.is_finite() {
                continue;
            }
            let mut at = i;
            let mut steps = 0;
            while let Some((p, _, _)) = self.nodes[at].bp {
                if self.nodes[p as usize].g >= self.nodes[at].g {
                    return Err(PlanError::InvariantViolated(format!(
                        "g does not decrease from {:?} to its parent",
                        self.nodes[at].state
                    )));
                }
                at = p as usize;
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(PlanError::InvariantViolated("back-pointer cycle".into()));
                }
            }
            if self.nodes[at].state != self.problem.start {
                return Err(PlanError::InvariantViolated(format!("{:?} does not trace to start", node.state)));
            }
        }
        Ok(())
    }
}

/// `h_0` vanishes on goals and satisfies the triangle inequality on the
/// start's outgoing anchor edges. Wider sampling lives in
/// [`super::anchor_consistency_violations`].
fn check_anchor_locally<D: Domain>(
    problem: &ProblemInstance<'_, D>,
    heuristics: &Heuristics<'_, D::State>,
) -> Result<(), PlanError> {
    for goal in problem.goals() {
        let h = heuristics.eval(0, goal);
        if h != 0.0 {
            return Err(PlanError::InconsistentAnchor(format!("h_0({goal:?}) = {h}, expected 0")));
        }
    }
    let violations = super::anchor_consistency_violations(problem.domain, &*heuristics.anchor, [problem.start]);
    match violations.first() {
        Some(v) => Err(PlanError::InconsistentAnchor(v.to_string())),
        None => Ok(()),
    }
}

/// Convenience wrapper around [`Planner::new`] and [`Planner::plan`].
pub fn plan<D: Domain>(
    problem: &ProblemInstance<'_, D>,
    heuristics: &Heuristics<'_, D::State>,
    config: PlannerConfig,
    on_solution: impl FnMut(&SolutionRecord<D::State>),
) -> Result<PlanOutcome<D::State>, PlanError> {
    Planner::new(problem, heuristics, config)?.plan(on_solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::testgraph::ExplicitGraph;
    use crate::search::HeuristicSpec;

    fn zero_heuristics(m: usize, res: usize) -> Heuristics<'static, u32> {
        let mut h = Heuristics::new(|_: &u32| 0.0);
        for i in 0..m {
            h = h.with_queue(HeuristicSpec::new(format!("h{i}"), res, |_: &u32| 0.0));
        }
        h
    }

    /// Starts iteration 1 without running it.
    fn primed<'p>(
        problem: &'p ProblemInstance<'p, ExplicitGraph>,
        h: &'p Heuristics<'p, u32>,
        config: PlannerConfig,
    ) -> Planner<'p, ExplicitGraph> {
        let mut p = Planner::new(problem, h, config).unwrap();
        p.reset();
        let s = p.discover(problem.start);
        p.nodes[s as usize].g = 0.0;
        p.push_incons(s);
        p.begin_iteration();
        p
    }

    #[test]
    fn key_formula() {
        let g = ExplicitGraph::new(1).edge(0, 1, 5.0, 1).edge(1, 2, 2.0, 1);
        let problem = ProblemInstance::new(&g, 0, [2]);
        let h = Heuristics::new(|s: &u32| [0.0, 3.0, 0.0][*s as usize])
            .with_queue(HeuristicSpec::new("h", 1, |s: &u32| [0.0, 3.0, 0.0][*s as usize]));
        let cfg = PlannerConfig::default().with_weights(2.0, 1.0);
        let mut p = primed(&problem, &h, cfg);
        assert_eq!(p.key(&0, 0), Ok(0.0));
        let x = p.queues[0].pop().unwrap().node;
        p.expand(x, 0);
        // g = 5, w1 = 2, h = 3
        assert_eq!(p.key(&1, 0), Ok(11.0));
        assert_eq!(p.key(&1, 1), Ok(11.0));
        assert!(matches!(p.key(&2, 0), Err(PlanError::Undiscovered(_))));
        assert!(p.key(&0, 5).is_err());

        p.w1 = 1.0;
        let y = p.index[&1];
        p.expand(y, 0);
        // goal: key equals g
        assert_eq!(p.key(&2, 0), Ok(7.0));
    }

    #[test]
    fn round_robin_skips_empty_queues() {
        let g = ExplicitGraph::new(1).edge(0, 1, 1.0, 1);
        let problem = ProblemInstance::new(&g, 0, [1]);
        let h = zero_heuristics(3, 1);
        let mut p = primed(&problem, &h, PlannerConfig::default());
        let seq: Vec<_> = (0..4).map(|_| p.choose_queue().unwrap()).collect();
        assert_eq!(seq, vec![1, 2, 3, 1]);

        let mut p = primed(&problem, &h, PlannerConfig::default());
        p.queues[2].clear();
        let seq: Vec<_> = (0..4).map(|_| p.choose_queue().unwrap()).collect();
        assert_eq!(seq, vec![1, 3, 1, 3]);

        for q in 1..=3 {
            p.queues[q].clear();
        }
        assert_eq!(p.choose_queue(), None);

        let h1 = zero_heuristics(1, 1);
        let mut p = primed(&problem, &h1, PlannerConfig::default());
        assert!((0..5).all(|_| p.choose_queue() == Some(1)));
    }

    #[test]
    fn first_discovery_enters_every_eligible_queue() {
        let g = ExplicitGraph::new(2).edge(0, 1, 4.0, 1).on(1, &[1]);
        let problem = ProblemInstance::new(&g, 0, [1]);
        let h = zero_heuristics(1, 1).with_queue(HeuristicSpec::new("coarse", 2, |_: &u32| 0.0));
        let mut p = primed(&problem, &h, PlannerConfig::default());
        let x = p.queues[0].pop().unwrap().node;
        assert_eq!(p.expand(x, 0), 1);
        let y = p.index[&1];
        assert_eq!(p.g(&1), Some(4.0));
        assert_eq!(p.nodes[y as usize].bp.map(|b| b.0), Some(x));
        assert!(p.queues[0].contains(y));
        assert!(p.queues[1].contains(y));
        // state 1 does not lie on resolution 2
        assert!(!p.queues[2].contains(y));
    }

    #[test]
    fn improved_anchor_closed_successor_goes_to_incons() {
        let g = ExplicitGraph::new(1).edge(0, 1, 10.0, 1).edge(0, 2, 1.0, 1).edge(2, 1, 1.0, 1);
        let problem = ProblemInstance::new(&g, 0, [1]);
        let h = zero_heuristics(1, 1);
        let mut p = primed(&problem, &h, PlannerConfig::default());
        let x = p.queues[0].pop().unwrap().node;
        p.expand(x, 0);
        p.close(x, 0);
        let y = p.index[&1];
        p.queues[0].remove(y);
        p.queues[1].remove(y);
        p.close(y, 0);
        let z = p.index[&2];
        p.expand(z, 0);
        assert_eq!(p.g(&1), Some(2.0));
        assert_eq!(p.incons, vec![y]);
        assert!(!p.queues[0].contains(y));
        assert!(!p.queues[1].contains(y));
    }

    #[test]
    fn w2_filter_rejects_out_of_bound_keys() {
        let g = ExplicitGraph::new(1).edge(0, 1, 2.0, 1);
        let problem = ProblemInstance::new(&g, 0, [5]);
        let h = Heuristics::new(|s: &u32| if *s == 1 { 4.0 } else { 0.0 }).with_queue(HeuristicSpec::new("h1", 1, |s: &u32| {
            if *s == 1 {
                8.0
            } else {
                0.0
            }
        }));
        let mut p = primed(&problem, &h, PlannerConfig::default().with_weights(1.0, 1.5));
        let x = p.queues[0].pop().unwrap().node;
        p.expand(x, 0);
        let y = p.index[&1];
        assert_eq!(p.key(&1, 0), Ok(6.0));
        assert_eq!(p.key(&1, 1), Ok(10.0));
        assert!(p.queues[0].contains(y));
        assert!(!p.queues[1].contains(y));
    }

    #[test]
    fn inadmissible_expansion_leaves_same_resolution_queues() {
        let g = ExplicitGraph::new(1).edge(0, 1, 1.0, 1);
        let problem = ProblemInstance::new(&g, 0, [1]);
        let h = zero_heuristics(2, 1);
        let mut p = primed(&problem, &h, PlannerConfig::default());
        let x = p.queues[1].pop().unwrap().node;
        assert!(p.queues[2].contains(x));
        p.expand(x, 1);
        assert!(!p.queues[2].contains(x));
        // the anchor keeps it
        assert!(p.queues[0].contains(x));
    }

    #[test]
    fn empty_anchor_exhausts() {
        let g = ExplicitGraph::new(1);
        let problem = ProblemInstance::new(&g, 0, [1]);
        let h = zero_heuristics(1, 1);
        let mut p = primed(&problem, &h, PlannerConfig::default());
        p.queues[0].clear();
        assert_eq!(p.improve_path(), Ok(Improve::Exhausted));
    }
}
