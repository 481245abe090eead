//! Property suites for the planner's guarantees, refereed by the exact
//! oracle. Failures carry a serialisable instance for replay.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use amra_core::grid2d::{Connectivity, CostMap, Grid2D, GridState, HeuristicKind};
use amra_core::search::{anchor_consistency_violations, validate_path, PresetKind, SingleResolution};
use amra_core::{Domain, PlanOutcome, PlanStatus, PlannerConfig, ProblemInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fixtures::{random_grid, wall_in};
use crate::oracle::{oracle_search, DEFAULT_STATE_LIMIT};
use crate::scenario::{run_grid, BenchPreset, GridScenario};

/// A grid planning instance.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCase {
    pub map: CostMap,
    pub connectivity: Connectivity,
    pub factors: Vec<u32>,
    pub start: GridState,
    pub goal: GridState,
}

impl GridCase {
    pub fn grid(&self) -> Grid2D {
        Grid2D::new(self.map.clone(), self.connectivity, &self.factors).expect("case factors are valid")
    }

    pub fn counterexample(&self, property: &str, config: &PlannerConfig, detail: String) -> Counterexample {
        Counterexample {
            property: property.to_string(),
            map: self.map.to_cost_text(),
            connectivity: match self.connectivity {
                Connectivity::Four => 4,
                Connectivity::Eight => 8,
            },
            factors: self.factors.clone(),
            start: self.start.to_string(),
            goal: self.goal.to_string(),
            w1: config.w1_init,
            w2: config.w2_init,
            detail,
        }
    }
}

/// A failing instance in replayable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub property: String,
    /// `type cost` map text.
    pub map: String,
    pub connectivity: u8,
    pub factors: Vec<u32>,
    pub start: String,
    pub goal: String,
    pub w1: f64,
    pub w2: f64,
    pub detail: String,
}

impl Counterexample {
    /// Rebuilds the instance.
    pub fn case(&self) -> Result<GridCase, String> {
        Ok(GridCase {
            map: CostMap::parse(self.map.as_bytes()).map_err(|e| e.to_string())?,
            connectivity: if self.connectivity == 4 { Connectivity::Four } else { Connectivity::Eight },
            factors: self.factors.clone(),
            start: self.start.parse()?,
            goal: self.goal.parse()?,
        })
    }
}

/// Random map with a start/goal pair drawn from the free coarsest lattice.
/// `walled` blocks the goal's neighbours. `None` if fewer than two coarse
/// states are free.
pub fn random_case(
    rng: &mut impl Rng,
    size: u32,
    p_obstacle: f64,
    costs: (u32, u32),
    factors: &[u32],
    connectivity: Connectivity,
    walled: bool,
) -> Option<GridCase> {
    let mut map = random_grid(rng, size, size, p_obstacle, costs);
    let grid = Grid2D::new(map.clone(), connectivity, factors).ok()?;
    let coarse = grid.coarse_free_states();
    let pair: Vec<GridState> = coarse.choose_multiple(rng, 2).copied().collect();
    if pair.len() < 2 {
        return None;
    }
    if walled {
        wall_in(&mut map, pair[1]);
        if !map.is_free(pair[0].x as i64, pair[0].y as i64) {
            return None;
        }
    }
    Some(GridCase { map, connectivity, factors: factors.to_vec(), start: pair[0], goal: pair[1] })
}

/// One AMRA* run checked against the oracle.
#[derive(Clone, Debug)]
pub struct Audit {
    pub outcome: PlanOutcome<GridState>,
    pub optimum: Option<f64>,
    /// `(property, detail)` for every check that failed.
    pub violations: Vec<(&'static str, String)>,
}

pub const T1: &str = "bounded-reexpansions";
pub const T2: &str = "completeness";
pub const T3: &str = "bounded-suboptimality";
pub const OPTIMAL: &str = "optimal-at-unit-weights";
pub const MONOTONE: &str = "anytime-monotonicity";
pub const VALID_PATHS: &str = "valid-paths";
pub const CONSISTENT: &str = "anchor-consistency";
pub const DEVOLUTION: &str = "devolution";

/// Runs `preset` on the case with invariant checking on and compares every
/// published solution with the oracle optimum.
pub fn audit(
    case: &GridCase,
    heuristics: &[HeuristicKind],
    preset: &BenchPreset,
    config: &PlannerConfig,
) -> Result<Audit, String> {
    let sc = GridScenario { grid: case.grid(), heuristics: heuristics.to_vec() };
    let cfg = PlannerConfig { check_invariants: true, ..config.clone() };
    let outcome = run_grid(&sc, preset, case.start, case.goal, &cfg).map_err(|e| e.to_string())?;
    let problem = ProblemInstance::new(&sc.grid, case.start, [case.goal]);
    let optimum = oracle_search(&problem, DEFAULT_STATE_LIMIT).map_err(|e| e.to_string())?.optimum;
    let mut violations = Vec::new();

    let n = sc.grid.factors().len() as u32;
    let limit = if matches!(preset, BenchPreset::Amra | BenchPreset::Mra(_)) { n + 1 } else { 2 };
    for it in &outcome.iterations {
        if it.max_expansions_of_any_state > limit {
            violations.push((
                T1,
                format!("iteration {}: a state expanded {} times > {limit}", it.iteration, it.max_expansions_of_any_state),
            ));
        }
    }
    match (outcome.status, optimum) {
        (PlanStatus::NoPath, Some(opt)) => violations.push((T2, format!("reported no path, oracle optimum {opt}"))),
        (s, None) if s != PlanStatus::NoPath => violations.push((T2, format!("status {s:?} but the oracle finds no path"))),
        _ => {}
    }
    if let Some(opt) = optimum {
        for r in &outcome.published {
            if r.cost > r.bound * opt {
                violations.push((T3, format!("iteration {}: cost {} > {} * {opt}", r.iteration, r.cost, r.bound)));
            }
        }
        if outcome.status == PlanStatus::Finished {
            let last = outcome.published.last();
            if last.map(|r| (r.bound, r.cost)) != Some((1.0, opt)) {
                violations.push((OPTIMAL, format!("final (bound, cost) {:?}, optimum {opt}", last.map(|r| (r.bound, r.cost)))));
            }
        }
    }
    for w in outcome.published.windows(2) {
        if w[1].cost > w[0].cost || w[1].bound > w[0].bound {
            violations.push((MONOTONE, format!("({}, {}) -> ({}, {})", w[0].bound, w[0].cost, w[1].bound, w[1].cost)));
        }
    }
    for r in &outcome.published {
        if let Err(e) = validate_path(&problem, r) {
            violations.push((VALID_PATHS, format!("iteration {}: {e}", r.iteration)));
        }
    }
    Ok(Audit { outcome, optimum, violations })
}

/// Pop sequence of a textbook weighted A* with a closed list (no
/// re-expansions), key `g + w h`, ties to smaller `h` then latest insertion.
/// The goal test happens at expansion.
pub fn reference_wastar<D: Domain>(
    domain: &D,
    start: D::State,
    goal: D::State,
    h: &dyn Fn(&D::State) -> f64,
    w: f64,
) -> Vec<D::State> {
    #[derive(PartialEq)]
    struct E<S>(f64, f64, Reverse<u64>, S);
    impl<S: PartialEq> Eq for E<S> {}
    impl<S: PartialEq> PartialOrd for E<S> {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl<S: PartialEq> Ord for E<S> {
        // max-heap: the smallest (key, h, newest) must compare greatest
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            o.0.total_cmp(&self.0).then_with(|| o.1.total_cmp(&self.1)).then_with(|| o.2.cmp(&self.2))
        }
    }
    let mut g: HashMap<D::State, f64> = HashMap::new();
    let mut latest: HashMap<D::State, u64> = HashMap::new();
    let mut closed = HashSet::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut pops = Vec::new();
    g.insert(start, 0.0);
    let h0 = h(&start);
    heap.push(E(w * h0, h0, Reverse(seq), start));
    latest.insert(start, seq);
    let mut succs = Vec::new();
    while let Some(E(_, _, Reverse(s), x)) = heap.pop() {
        if latest[&x] != s || closed.contains(&x) {
            continue;
        }
        pops.push(x);
        if x == goal {
            break;
        }
        closed.insert(x);
        succs.clear();
        domain.anchor_successors(&x, &mut succs);
        let gx = g[&x];
        for y in &succs {
            let ng = gx + y.cost;
            if g.get(&y.state).is_some_and(|&old| ng >= old) {
                continue;
            }
            g.insert(y.state, ng);
            if closed.contains(&y.state) {
                continue;
            }
            let hy = h(&y.state);
            if !hy.is_finite() {
                continue;
            }
            seq += 2;
            latest.insert(y.state, seq);
            heap.push(E(ng + w * hy, hy, Reverse(seq), y.state));
        }
    }
    pops
}

/// Compares the planner's wA* preset with [`reference_wastar`] on one case
/// (single resolution, weights `(1, 1)`): the sequence of first expansions
/// must match exactly and every other pop must be an anchor re-pop that
/// improves nothing.
pub fn devolution_trace(case: &GridCase) -> Result<(), String> {
    let grid = Grid2D::new(case.map.clone(), case.connectivity, &[1]).map_err(|e| e.to_string())?;
    let d = SingleResolution::new(&grid, 1);
    let kind = grid.anchor_kind();
    let goal = case.goal;
    let hg = grid.clone();
    let h = move |s: &GridState| hg.heuristic(kind, *s, goal);
    let heur = amra_core::Heuristics::new(h.clone()).with_queue(amra_core::HeuristicSpec::new("h", 1, h.clone()));
    let problem = ProblemInstance::new(&d, case.start, [goal]);
    let cfg = PlannerConfig { record_trace: true, ..PlannerConfig::default().with_weights(1.0, 1.0).single_iteration() };
    let mut planner =
        amra_core::Planner::new(&problem, &heur, PresetKind::WeightedAStar.config(&cfg)).map_err(|e| e.to_string())?;
    planner.plan(|_| {}).map_err(|e| e.to_string())?;
    let mut seen = HashSet::new();
    let mut firsts = Vec::new();
    for e in planner.trace() {
        if seen.insert(e.state) {
            firsts.push(e.state);
        } else if e.queue != 0 || e.improved != 0 {
            return Err(format!("unexpected re-expansion of {} from queue {} improving {}", e.state, e.queue, e.improved));
        }
    }
    let reference = reference_wastar(&d, case.start, goal, &h, 1.0);
    if firsts != reference {
        let at = firsts.iter().zip(&reference).position(|(a, b)| a != b).unwrap_or(firsts.len().min(reference.len()));
        return Err(format!(
            "pop sequences diverge at position {at} (planner {} pops, reference {})",
            firsts.len(),
            reference.len()
        ));
    }
    Ok(())
}

/// AMRA* restricted to one resolution and one heuristic must publish the
/// same `(cost, bound)` sequence as the ARA* preset.
pub fn devolution_ara(case: &GridCase) -> Result<(), String> {
    let grid = Grid2D::new(case.map.clone(), case.connectivity, &[1]).map_err(|e| e.to_string())?;
    let kinds = [HeuristicKind::Euclidean];
    let problem = ProblemInstance::new(&grid, case.start, [case.goal]);
    let h = grid.heuristics(case.goal, &kinds);
    let cfg = PlannerConfig::default();
    let seq = |k: PresetKind| -> Result<Vec<(f64, f64)>, String> {
        let out = k.run(&problem, &h, &cfg, |_| {}).map_err(|e| e.to_string())?;
        Ok(out.published.iter().map(|r| (r.cost, r.bound)).collect())
    };
    let (a, b) = (seq(PresetKind::Amra)?, seq(PresetKind::Ara)?);
    if a != b {
        return Err(format!("AMRA* published {a:?}, ARA* published {b:?}"));
    }
    Ok(())
}

/// Outcome of one property over many instances.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<Counterexample>,
}

impl PropertyReport {
    fn new(name: &'static str) -> Self {
        PropertyReport { name, checked: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random instances per suite.
    pub instances: usize,
    pub size: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 1, instances: 20, size: 32 }
    }
}

/// Runs every suite.
pub fn run_all(opts: &VerifyOptions) -> Vec<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut reports: Vec<PropertyReport> =
        [T1, T2, T3, OPTIMAL, MONOTONE, VALID_PATHS, CONSISTENT, DEVOLUTION].into_iter().map(PropertyReport::new).collect();
    let idx = |name: &str| {
        [T1, T2, T3, OPTIMAL, MONOTONE, VALID_PATHS, CONSISTENT, DEVOLUTION].iter().position(|n| *n == name).unwrap()
    };
    let audited = [T1, T2, T3, OPTIMAL, MONOTONE, VALID_PATHS];

    let audit_one = |case: &GridCase,
                     kinds: &[HeuristicKind],
                     preset: &BenchPreset,
                     cfg: &PlannerConfig,
                     reports: &mut Vec<PropertyReport>| {
        match audit(case, kinds, preset, cfg) {
            Ok(a) => {
                for name in audited {
                    reports[idx(name)].checked += 1;
                }
                for (name, detail) in a.violations {
                    reports[idx(name)].failures.push(case.counterexample(name, cfg, detail));
                }
            }
            Err(e) => reports[idx(T2)].failures.push(case.counterexample("error", cfg, e)),
        }
    };

    let cfg = PlannerConfig::default();
    let kinds = [HeuristicKind::Euclidean, HeuristicKind::Manhattan];
    for i in 0..opts.instances {
        let conn = if i % 2 == 0 { Connectivity::Eight } else { Connectivity::Four };
        let walled = i % 4 == 3;
        if let Some(case) = random_case(&mut rng, opts.size, 0.2, (1, 20), &[1, 3, 9], conn, walled) {
            audit_one(&case, &kinds, &BenchPreset::Amra, &cfg, &mut reports);
            audit_one(&case, &kinds[..1], &BenchPreset::Ara(crate::scenario::Level::High), &cfg, &mut reports);

            let grid = case.grid();
            let kind = grid.anchor_kind();
            let goal = case.goal;
            let h0 = |s: &GridState| grid.heuristic(kind, *s, goal);
            let states: Vec<GridState> = case.map.free_cells().map(|(x, y)| GridState::new(x, y)).collect();
            let r = &mut reports[idx(CONSISTENT)];
            r.checked += 1;
            if let Some(v) = anchor_consistency_violations(&grid, &h0, states).first() {
                r.failures.push(case.counterexample(CONSISTENT, &cfg, v.to_string()));
            }
        }
        if let Some(case) = random_case(&mut rng, 16, 0.2, (1, 9), &[1], conn, false) {
            let r = &mut reports[idx(DEVOLUTION)];
            r.checked += 1;
            for check in [devolution_trace(&case), devolution_ara(&case)] {
                if let Err(e) = check {
                    r.failures.push(case.counterexample(DEVOLUTION, &cfg, e));
                }
            }
        }
    }
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let case = random_case(&mut rng, 12, 0.1, (1, 5), &[1, 3], Connectivity::Eight, false).unwrap();
        let cx = case.counterexample("x", &PlannerConfig::default(), "d".into());
        let json = serde_json::to_string(&cx).unwrap();
        let back: Counterexample = serde_json::from_str(&json).unwrap();
        assert_eq!(back.case().unwrap(), case);
    }

    #[test]
    fn reference_astar_on_a_corridor() {
        let grid = Grid2D::new(CostMap::open(4, 1), Connectivity::Four, &[1]).unwrap();
        let goal = GridState::new(3, 0);
        let pops = reference_wastar(&grid, GridState::new(0, 0), goal, &|s: &GridState| (3 - s.x) as f64, 1.0);
        assert_eq!(pops, (0..4).map(|x| GridState::new(x, 0)).collect::<Vec<_>>());
    }

    #[test]
    fn wastar_row_equals_single_iteration_amra() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let case = random_case(&mut rng, 24, 0.2, (1, 9), &[1], Connectivity::Eight, false).unwrap();
            let grid = case.grid();
            let problem = ProblemInstance::new(&grid, case.start, [case.goal]);
            let h = grid.heuristics(case.goal, &[HeuristicKind::Euclidean]);
            let cfg = PlannerConfig::default().single_iteration();
            let a = PresetKind::WeightedAStar.run(&problem, &h, &cfg, |_| {}).unwrap();
            let b = PresetKind::Amra.run(&problem, &h, &cfg, |_| {}).unwrap();
            let row = |o: &PlanOutcome<GridState>| crate::scenario::RunSummary::from_outcome(o);
            let (mut ra, mut rb) = (row(&a), row(&b));
            for r in [&mut ra, &mut rb] {
                r.published.iter_mut().for_each(|p| p.2 = 0.0);
            }
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn small_verify_run_passes() {
        let reports = run_all(&VerifyOptions { seed: 3, instances: 4, size: 20 });
        for r in &reports {
            assert!(r.passed(), "{}: {:?}", r.name, r.failures);
            assert!(r.checked > 0, "{}", r.name);
        }
    }
}
