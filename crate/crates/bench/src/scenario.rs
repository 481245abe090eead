//! Benchmark presets and the code that instantiates them on a domain.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use amra_core::grid2d::{Grid2D, GridState, HeuristicKind};
use amra_core::search::{plan_succession, PresetKind, SingleResolution};
use amra_core::uav4d::heuristics::{dubins, euclidean, BackwardDijkstra};
use amra_core::uav4d::{Uav4D, UavHeuristic, UavState};
use amra_core::{Domain, HeuristicSpec, Heuristics, PlanError, PlanOutcome, PlannerConfig, ProblemInstance, SolutionRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("preset {preset} does not apply: {why}")]
    PresetMismatch { preset: String, why: String },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Sample(#[from] crate::sampling::SampleError),
    #[error("{0}")]
    Io(String),
}

/// One of the three named resolution levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    High,
    Mid,
    Low,
}

impl Level {
    /// Resolution index on a domain with `n` resolutions.
    pub fn resolution(self, n: usize) -> Option<usize> {
        match self {
            Level::High => Some(1),
            Level::Low => Some(n),
            Level::Mid if n >= 3 => Some(n.div_ceil(2)),
            Level::Mid => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Level::High => "high",
            Level::Mid => "mid",
            Level::Low => "low",
        }
    }
}

/// Planner configurations compared by the harness.
///
/// Grid scenarios use their heuristic list in order: the first entry drives
/// the single-heuristic presets. UAV scenarios name the heuristic explicitly
/// for `mra-*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchPreset {
    /// All resolutions, all heuristics, anytime.
    Amra,
    /// A fresh multi-resolution search for every weight pair of the schedule,
    /// one heuristic per resolution. `None` uses the scenario's first.
    Mra(Option<String>),
    /// Anytime, one resolution, one heuristic.
    Ara(Level),
    /// Finest resolution, one heuristic, one iteration.
    WAStar,
    /// Anytime, one resolution, all heuristics.
    AMha(Level),
}

impl BenchPreset {
    /// The presets of the grid table.
    pub fn grid_defaults() -> Vec<BenchPreset> {
        vec![
            BenchPreset::Amra,
            BenchPreset::Mra(None),
            BenchPreset::Ara(Level::High),
            BenchPreset::Ara(Level::Mid),
            BenchPreset::Ara(Level::Low),
        ]
    }

    /// The presets of the UAV table.
    pub fn uav_defaults() -> Vec<BenchPreset> {
        vec![
            BenchPreset::Amra,
            BenchPreset::Mra(Some("e".into())),
            BenchPreset::Mra(Some("dubins".into())),
            BenchPreset::Mra(Some("dijkstra".into())),
            BenchPreset::AMha(Level::High),
        ]
    }

    pub fn parse_list(s: &str) -> Result<Vec<BenchPreset>, BenchError> {
        s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for BenchPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchPreset::Amra => f.write_str("amra"),
            BenchPreset::Mra(None) => f.write_str("mra"),
            BenchPreset::Mra(Some(h)) => write!(f, "mra-{h}"),
            BenchPreset::Ara(l) => write!(f, "ara-{}", l.name()),
            BenchPreset::WAStar => f.write_str("wastar"),
            BenchPreset::AMha(l) => write!(f, "amha-{}", l.name()),
        }
    }
}

impl FromStr for BenchPreset {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let level = |l: &str| match l {
            "high" => Some(Level::High),
            "mid" => Some(Level::Mid),
            "low" => Some(Level::Low),
            _ => None,
        };
        let parsed = match lower.as_str() {
            "amra" => Some(BenchPreset::Amra),
            "mra" => Some(BenchPreset::Mra(None)),
            "wastar" | "wa" => Some(BenchPreset::WAStar),
            other => match other.split_once('-') {
                Some(("mra", h)) if matches!(h, "e" | "euclidean" | "manhattan" | "chebyshev" | "dubins" | "dijkstra") => {
                    Some(BenchPreset::Mra(Some(h.to_string())))
                }
                Some(("ara", l)) => level(l).map(BenchPreset::Ara),
                Some(("amha", l)) => level(l).map(BenchPreset::AMha),
                _ => None,
            },
        };
        parsed.ok_or_else(|| BenchError::UnknownPreset(s.to_string()))
    }
}

/// A grid map with the heuristics its inadmissible queues use.
#[derive(Clone, Debug)]
pub struct GridScenario {
    pub grid: Grid2D,
    pub heuristics: Vec<HeuristicKind>,
}

/// A UAV map with its heuristics and Dubins radius.
#[derive(Clone, Debug)]
pub struct UavScenario {
    pub uav: Uav4D,
    pub heuristics: Vec<UavHeuristic>,
    pub rho: f64,
}

#[derive(Clone, Debug)]
pub enum Scenario {
    Grid(GridScenario),
    Uav(UavScenario),
}

/// A start/goal pair for either domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Grid(GridState, GridState),
    Uav(UavState, UavState),
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Grid(s, g) => write!(f, "{s} -> {g}"),
            Task::Uav(s, g) => write!(f, "{s} -> {g}"),
        }
    }
}

/// Published solution summary shared by both domains.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub status: amra_core::PlanStatus,
    /// `(bound, cost, seconds since start, expansions so far)` per
    /// publication.
    pub published: Vec<(f64, f64, f64, u64)>,
    pub expansions: u64,
    pub iterations: u32,
    pub max_expansions_of_any_state: u32,
}

impl RunSummary {
    pub fn from_outcome<S>(out: &PlanOutcome<S>) -> RunSummary {
        RunSummary {
            status: out.status,
            published: out
                .published
                .iter()
                .map(|r| (r.bound, r.cost, r.stats.elapsed.as_secs_f64(), r.stats.expansions_total))
                .collect(),
            expansions: out.expansions_total,
            iterations: out.iterations.len() as u32,
            max_expansions_of_any_state: out.iterations.iter().map(|i| i.max_expansions_of_any_state).max().unwrap_or(0),
        }
    }
}

fn mismatch(preset: &BenchPreset, why: impl Into<String>) -> BenchError {
    BenchError::PresetMismatch { preset: preset.to_string(), why: why.into() }
}

fn level_res(preset: &BenchPreset, level: Level, n: usize) -> Result<usize, BenchError> {
    level.resolution(n).ok_or_else(|| mismatch(preset, format!("the domain has {n} resolutions")))
}

fn grid_kind(name: &str) -> Option<HeuristicKind> {
    match name {
        "e" => Some(HeuristicKind::Euclidean),
        other => other.parse().ok(),
    }
}

fn grid_h(grid: &Grid2D, kind: HeuristicKind, goal: GridState) -> impl Fn(&GridState) -> f64 + Send + Sync + 'static {
    let g = grid.clone();
    move |s: &GridState| g.heuristic(kind, *s, goal)
}

fn grid_heuristics(grid: &Grid2D, goal: GridState, layout: &[(HeuristicKind, usize)]) -> Heuristics<'static, GridState> {
    let mut h = Heuristics::new(grid_h(grid, grid.anchor_kind(), goal));
    for &(kind, res) in layout {
        h = h.with_queue(HeuristicSpec::new(format!("{kind}@{res}"), res, grid_h(grid, kind, goal)));
    }
    h
}

#[allow(clippy::too_many_arguments)]
fn run_kind<D: Domain>(
    kind: PresetKind,
    succession: bool,
    domain: &D,
    start: D::State,
    goal: D::State,
    h: &Heuristics<'_, D::State>,
    config: &PlannerConfig,
    on_solution: &mut dyn FnMut(&SolutionRecord<D::State>),
) -> Result<PlanOutcome<D::State>, BenchError> {
    let problem = ProblemInstance::new(domain, start, [goal]);
    if succession {
        kind.check_shape(domain.num_resolutions(), h)?;
        Ok(plan_succession(&problem, h, config, on_solution)?)
    } else {
        Ok(kind.run(&problem, h, config, on_solution)?)
    }
}

/// Runs `preset` on a grid scenario.
pub fn run_grid(
    sc: &GridScenario,
    preset: &BenchPreset,
    start: GridState,
    goal: GridState,
    config: &PlannerConfig,
) -> Result<PlanOutcome<GridState>, BenchError> {
    run_grid_with(sc, preset, start, goal, config, &mut |_| {})
}

/// [`run_grid`] reporting each published solution as it is found.
pub fn run_grid_with(
    sc: &GridScenario,
    preset: &BenchPreset,
    start: GridState,
    goal: GridState,
    config: &PlannerConfig,
    on_solution: &mut dyn FnMut(&SolutionRecord<GridState>),
) -> Result<PlanOutcome<GridState>, BenchError> {
    let grid = &sc.grid;
    let n = grid.factors().len();
    let first = *sc.heuristics.first().ok_or_else(|| mismatch(preset, "no heuristics configured"))?;
    match preset {
        BenchPreset::Amra => {
            let layout: Vec<_> = (1..=n).flat_map(|r| sc.heuristics.iter().map(move |&k| (k, r))).collect();
            run_kind(PresetKind::Amra, false, grid, start, goal, &grid_heuristics(grid, goal, &layout), config, on_solution)
        }
        BenchPreset::Mra(choice) => {
            let kind = match choice {
                None => first,
                Some(name) => grid_kind(name).ok_or_else(|| mismatch(preset, "not a grid heuristic"))?,
            };
            let layout: Vec<_> = (1..=n).map(|r| (kind, r)).collect();
            run_kind(PresetKind::Mra, true, grid, start, goal, &grid_heuristics(grid, goal, &layout), config, on_solution)
        }
        BenchPreset::Ara(level) => {
            let d = SingleResolution::new(grid, level_res(preset, *level, n)?);
            run_kind(PresetKind::Ara, false, &d, start, goal, &grid_heuristics(grid, goal, &[(first, 1)]), config, on_solution)
        }
        BenchPreset::WAStar => {
            let d = SingleResolution::new(grid, 1);
            run_kind(
                PresetKind::WeightedAStar,
                false,
                &d,
                start,
                goal,
                &grid_heuristics(grid, goal, &[(first, 1)]),
                config,
                on_solution,
            )
        }
        BenchPreset::AMha(level) => {
            let d = SingleResolution::new(grid, level_res(preset, *level, n)?);
            let layout: Vec<_> = sc.heuristics.iter().map(|&k| (k, 1)).collect();
            run_kind(PresetKind::AMha, false, &d, start, goal, &grid_heuristics(grid, goal, &layout), config, on_solution)
        }
    }
}

fn uav_kind(name: &str) -> Option<UavHeuristic> {
    match name {
        "e" => Some(UavHeuristic::Euclidean),
        other => other.parse().ok(),
    }
}

type UavFn = Arc<dyn Fn(&UavState) -> f64 + Send + Sync>;

fn uav_fns(sc: &UavScenario, goal: UavState, kinds: &[UavHeuristic]) -> Vec<(UavHeuristic, UavFn)> {
    let rho = sc.rho;
    kinds
        .iter()
        .map(|&k| {
            let f: UavFn = match k {
                UavHeuristic::Euclidean => Arc::new(move |s: &UavState| euclidean(s, &goal)),
                UavHeuristic::Dubins => Arc::new(move |s: &UavState| dubins(s, &goal, rho)),
                UavHeuristic::Dijkstra => {
                    let t = BackwardDijkstra::build(sc.uav.map(), (goal.x as u32, goal.y as u32));
                    Arc::new(move |s: &UavState| t.heuristic(s))
                }
            };
            (k, f)
        })
        .collect()
}

fn uav_heuristics(goal: UavState, fns: &[(UavHeuristic, UavFn)], resolutions: &[usize]) -> Heuristics<'static, UavState> {
    let mut h = Heuristics::new(move |s: &UavState| euclidean(s, &goal));
    for &r in resolutions {
        for (k, f) in fns {
            let f = f.clone();
            h = h.with_queue(HeuristicSpec::new(format!("{k}@{r}"), r, move |s: &UavState| f(s)));
        }
    }
    h
}

/// Runs `preset` on a UAV scenario.
pub fn run_uav(
    sc: &UavScenario,
    preset: &BenchPreset,
    start: UavState,
    goal: UavState,
    config: &PlannerConfig,
) -> Result<PlanOutcome<UavState>, BenchError> {
    run_uav_with(sc, preset, start, goal, config, &mut |_| {})
}

/// [`run_uav`] reporting each published solution as it is found.
pub fn run_uav_with(
    sc: &UavScenario,
    preset: &BenchPreset,
    start: UavState,
    goal: UavState,
    config: &PlannerConfig,
    on_solution: &mut dyn FnMut(&SolutionRecord<UavState>),
) -> Result<PlanOutcome<UavState>, BenchError> {
    let uav = &sc.uav;
    let first = *sc.heuristics.first().ok_or_else(|| mismatch(preset, "no heuristics configured"))?;
    match preset {
        BenchPreset::Amra => {
            let h = uav_heuristics(goal, &uav_fns(sc, goal, &sc.heuristics), &[1, 2]);
            run_kind(PresetKind::Amra, false, uav, start, goal, &h, config, on_solution)
        }
        BenchPreset::Mra(choice) => {
            let kind = match choice {
                None => first,
                Some(name) => uav_kind(name).ok_or_else(|| mismatch(preset, "not a UAV heuristic"))?,
            };
            let h = uav_heuristics(goal, &uav_fns(sc, goal, &[kind]), &[1, 2]);
            run_kind(PresetKind::Mra, true, uav, start, goal, &h, config, on_solution)
        }
        BenchPreset::Ara(level) => {
            let d = SingleResolution::new(uav, level_res(preset, *level, 2)?);
            let h = uav_heuristics(goal, &uav_fns(sc, goal, &[first]), &[1]);
            run_kind(PresetKind::Ara, false, &d, start, goal, &h, config, on_solution)
        }
        BenchPreset::WAStar => {
            let d = SingleResolution::new(uav, 1);
            let h = uav_heuristics(goal, &uav_fns(sc, goal, &[first]), &[1]);
            run_kind(PresetKind::WeightedAStar, false, &d, start, goal, &h, config, on_solution)
        }
        BenchPreset::AMha(level) => {
            let d = SingleResolution::new(uav, level_res(preset, *level, 2)?);
            let h = uav_heuristics(goal, &uav_fns(sc, goal, &sc.heuristics), &[1]);
            run_kind(PresetKind::AMha, false, &d, start, goal, &h, config, on_solution)
        }
    }
}

/// Runs `preset` on `task`, which must match the scenario's domain.
pub fn run_task(sc: &Scenario, preset: &BenchPreset, task: Task, config: &PlannerConfig) -> Result<RunSummary, BenchError> {
    match (sc, task) {
        (Scenario::Grid(g), Task::Grid(s, t)) => Ok(RunSummary::from_outcome(&run_grid(g, preset, s, t, config)?)),
        (Scenario::Uav(u), Task::Uav(s, t)) => Ok(RunSummary::from_outcome(&run_uav(u, preset, s, t, config)?)),
        _ => Err(mismatch(preset, "task and scenario belong to different domains")),
    }
}

/// Samples `n` tasks on the scenario's coarsest lattice.
pub fn sample_tasks(sc: &Scenario, n: usize, seed: u64) -> Result<Vec<Task>, BenchError> {
    Ok(match sc {
        Scenario::Grid(g) => {
            crate::sampling::sample_problems(&g.grid, n, seed)?.into_iter().map(|(s, t)| Task::Grid(s, t)).collect()
        }
        Scenario::Uav(u) => {
            crate::sampling::sample_uav_problems(&u.uav, n, seed)?.into_iter().map(|(s, t)| Task::Uav(s, t)).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for name in [
            "amra",
            "mra",
            "mra-e",
            "mra-dubins",
            "mra-dijkstra",
            "ara-high",
            "ara-mid",
            "ara-low",
            "wastar",
            "amha-high",
            "amha-low",
        ] {
            let p: BenchPreset = name.parse().unwrap();
            assert_eq!(p.to_string(), name);
        }
        assert!("ara-top".parse::<BenchPreset>().is_err());
        assert_eq!(BenchPreset::parse_list("amra, ara-low").unwrap().len(), 2);
    }

    #[test]
    fn levels_map_to_resolutions() {
        assert_eq!(Level::Mid.resolution(3), Some(2));
        assert_eq!(Level::Mid.resolution(2), None);
        assert_eq!(Level::Low.resolution(2), Some(2));
    }
}
