//! Exact shortest paths over the explicit union graph, used as the referee
//! for completeness and suboptimality checks.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use amra_core::{Domain, ProblemInstance};

/// Largest number of discovered states the oracle agrees to hold.
pub const DEFAULT_STATE_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("union graph exceeds {limit} states; exact verification skipped")]
    TooLarge { limit: usize },
    #[error("start state is not valid in the domain")]
    InvalidStart,
}

#[derive(PartialEq)]
struct Item<S>(f64, S);

impl<S: Ord> Eq for Item<S> {}

impl<S: Ord> PartialOrd for Item<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Ord> Ord for Item<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

/// Result of one oracle run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Optimal cost to the nearest goal, `None` when no goal is reachable.
    pub optimum: Option<f64>,
    /// States settled before the search stopped.
    pub settled: usize,
}

/// Dijkstra from the start over every resolution's actions, no heuristic.
/// Stops at the first settled goal.
pub fn oracle_search<D: Domain>(problem: &ProblemInstance<'_, D>, limit: usize) -> Result<OracleResult, OracleError> {
    let domain = problem.domain;
    if !domain.is_valid(&problem.start) {
        return Err(OracleError::InvalidStart);
    }
    let mut dist: HashMap<D::State, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(problem.start, 0.0);
    heap.push(Reverse(Item(0.0, problem.start)));
    let mut succs = Vec::new();
    let mut settled = 0;
    while let Some(Reverse(Item(d, s))) = heap.pop() {
        if d > dist[&s] {
            continue;
        }
        settled += 1;
        if problem.is_goal(&s) {
            return Ok(OracleResult { optimum: Some(d), settled });
        }
        succs.clear();
        domain.anchor_successors(&s, &mut succs);
        for y in &succs {
            let nd = d + y.cost;
            match dist.entry(y.state) {
                Entry::Occupied(mut e) => {
                    if nd < *e.get() {
                        e.insert(nd);
                        heap.push(Reverse(Item(nd, y.state)));
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(nd);
                    heap.push(Reverse(Item(nd, y.state)));
                }
            }
        }
        if dist.len() > limit {
            return Err(OracleError::TooLarge { limit });
        }
    }
    Ok(OracleResult { optimum: None, settled })
}

/// Optimal cost on the union graph, `None` if no goal is reachable.
pub fn oracle_opt<D: Domain>(problem: &ProblemInstance<'_, D>) -> Result<Option<f64>, OracleError> {
    oracle_search(problem, DEFAULT_STATE_LIMIT).map(|r| r.optimum)
}

/// Whether any goal is reachable from the start.
pub fn reachable<D: Domain>(problem: &ProblemInstance<'_, D>) -> Result<bool, OracleError> {
    oracle_opt(problem).map(|o| o.is_some())
}

/// Number of states reachable from the start on the union graph.
pub fn reachable_count<D: Domain>(domain: &D, start: D::State, limit: usize) -> Result<usize, OracleError> {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![start];
    seen.insert(start);
    let mut succs = Vec::new();
    while let Some(s) = stack.pop() {
        succs.clear();
        domain.anchor_successors(&s, &mut succs);
        for y in &succs {
            if seen.insert(y.state) {
                if seen.len() > limit {
                    return Err(OracleError::TooLarge { limit });
                }
                stack.push(y.state);
            }
        }
    }
    Ok(seen.len())
}
