//! Flag and config-file handling. Flags override the TOML file, which
//! overrides built-in defaults.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use amra_bench::fixtures::{
    cul_de_sac, cul_de_sac_trial, fixture_61, narrow_passage, CUL_DE_SAC_FACTORS, FIXTURE_61_FACTORS, FIXTURE_61_GOAL,
    FIXTURE_61_SEED, FIXTURE_61_START, NARROW_FACTORS, NARROW_GOAL, NARROW_START,
};
use amra_bench::{GridScenario, MapEntry, Scenario, Task, UavScenario};
use amra_core::grid2d::{Connectivity, CostMap, Grid2D, GridState, HeuristicKind};
use amra_core::search::WeightSchedule;
use amra_core::uav4d::heuristics::DEFAULT_TURN_RADIUS_M;
use amra_core::uav4d::{PrimitiveSet, Uav4D, UavHeuristic, UavState};
use amra_core::{Domain, PlannerConfig};
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Grid2d,
    Uav4d,
}

/// Flags shared by every command that builds a planning problem.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// TOML file supplying defaults for any flag (keys use underscores).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Map file (MovingAI or `type cost`) or `builtin:fixture-61`,
    /// `builtin:narrow-passage`, `builtin:cul-de-sac`. Repeatable for bench.
    #[arg(long)]
    pub map: Vec<String>,
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    /// Grid connectivity, 4 or 8.
    #[arg(long)]
    pub connectivity: Option<u8>,
    /// Grid resolution factors, finest first, e.g. `1,3,9`.
    #[arg(long, value_delimiter = ',')]
    pub factors: Option<Vec<u32>>,
    /// Inadmissible heuristics: euclidean, manhattan, chebyshev on grids;
    /// euclidean, dubins, dijkstra on uav4d.
    #[arg(long, value_delimiter = ',')]
    pub heuristics: Option<Vec<String>>,
    /// Heuristic inflation weight, at least 1 (default 3).
    #[arg(long)]
    pub w1: Option<f64>,
    /// Anchor suboptimality factor, at least 1 (default 2).
    #[arg(long)]
    pub w2: Option<f64>,
    /// Factor applied to both weights between iterations.
    #[arg(long)]
    pub decay: Option<f64>,
    /// Wall-clock budget in milliseconds.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Deterministic cap on total expansions.
    #[arg(long)]
    pub max_expansions: Option<u64>,
    /// Seed for sampled tasks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// UAV primitive file; the shipped set by default.
    #[arg(long)]
    pub primitives: Option<PathBuf>,
    /// Dubins turning radius in metres.
    #[arg(long)]
    pub rho: Option<f64>,
    /// UAV footprint radius in metres.
    #[arg(long)]
    pub radius_m: Option<f64>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect(),
            OneOrMany::Many(v) => v,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub map: Option<OneOrMany>,
    pub domain: Option<DomainKind>,
    pub connectivity: Option<u8>,
    pub factors: Option<Vec<u32>>,
    pub heuristics: Option<OneOrMany>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub decay: Option<f64>,
    pub timeout_ms: Option<u64>,
    pub max_expansions: Option<u64>,
    pub seed: Option<u64>,
    pub primitives: Option<PathBuf>,
    pub rho: Option<f64>,
    pub radius_m: Option<f64>,
    pub preset: Option<String>,
    pub presets: Option<OneOrMany>,
    pub start: Option<String>,
    pub goal: Option<String>,
    pub single_iteration: Option<bool>,
    pub trials: Option<usize>,
    pub jobs: Option<usize>,
    pub timing: Option<bool>,
    pub out: Option<PathBuf>,
    pub instances: Option<usize>,
    pub size: Option<u32>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Resolved problem settings. Fields left `None` fall back to per-map
/// defaults.
#[derive(Serialize, Debug, Clone)]
pub struct Settings {
    pub maps: Vec<String>,
    pub domain: DomainKind,
    pub connectivity: Option<u8>,
    pub factors: Option<Vec<u32>>,
    pub heuristics: Vec<String>,
    pub w1: f64,
    pub w2: f64,
    pub decay: f64,
    pub timeout_ms: Option<u64>,
    pub max_expansions: Option<u64>,
    pub seed: u64,
    pub primitives: Option<PathBuf>,
    pub rho: f64,
    pub radius_m: f64,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_RADIUS_M: f64 = 1.0;

impl Settings {
    /// Merges flags over the file over defaults. `default_timeout` applies
    /// when neither source sets one.
    pub fn resolve(args: &CommonArgs, file: &FileConfig, default_timeout: Option<u64>) -> Result<Settings> {
        let domain = args.domain.or(file.domain).unwrap_or(DomainKind::Grid2d);
        let maps =
            if !args.map.is_empty() { args.map.clone() } else { file.map.clone().map(OneOrMany::into_vec).unwrap_or_default() };
        let heuristics = args.heuristics.clone().or_else(|| file.heuristics.clone().map(OneOrMany::into_vec)).unwrap_or_else(
            || match domain {
                DomainKind::Grid2d => vec!["euclidean".into(), "manhattan".into()],
                DomainKind::Uav4d => vec!["euclidean".into(), "dubins".into(), "dijkstra".into()],
            },
        );
        let s = Settings {
            maps,
            domain,
            connectivity: args.connectivity.or(file.connectivity),
            factors: args.factors.clone().or_else(|| file.factors.clone()),
            heuristics,
            w1: args.w1.or(file.w1).unwrap_or(3.0),
            w2: args.w2.or(file.w2).unwrap_or(2.0),
            decay: args.decay.or(file.decay).unwrap_or(0.5),
            timeout_ms: args.timeout_ms.or(file.timeout_ms).or(default_timeout),
            max_expansions: args.max_expansions.or(file.max_expansions),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            primitives: args.primitives.clone().or_else(|| file.primitives.clone()),
            rho: args.rho.or(file.rho).unwrap_or(DEFAULT_TURN_RADIUS_M),
            radius_m: args.radius_m.or(file.radius_m).unwrap_or(DEFAULT_RADIUS_M),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if let Some(c) = self.connectivity {
            if c != 4 && c != 8 {
                bail!("--connectivity must be 4 or 8, got {c}");
            }
        }
        match self.domain {
            DomainKind::Grid2d => {
                self.grid_heuristics()?;
            }
            DomainKind::Uav4d => {
                if self.factors.is_some() {
                    bail!("uav4d has fixed resolutions (3 m and 9 m lattices); drop --factors");
                }
                if self.connectivity.is_some() {
                    bail!("--connectivity applies to grid2d only");
                }
                self.uav_heuristics()?;
                if self.rho.is_nan() || self.rho <= 0.0 || self.radius_m.is_nan() || self.radius_m < 0.0 {
                    bail!("--rho must be positive and --radius-m non-negative");
                }
            }
        }
        if self.heuristics.is_empty() {
            bail!("at least one heuristic is required");
        }
        self.planner_config(true)?;
        Ok(())
    }

    pub fn grid_heuristics(&self) -> Result<Vec<HeuristicKind>> {
        self.heuristics
            .iter()
            .map(|name| match name.as_str() {
                "dubins" | "dijkstra" => {
                    bail!("heuristic `{name}` needs headings and is only available with --domain uav4d")
                }
                other => other.parse::<HeuristicKind>().map_err(|e| anyhow::anyhow!("{e}")),
            })
            .collect()
    }

    pub fn uav_heuristics(&self) -> Result<Vec<UavHeuristic>> {
        self.heuristics
            .iter()
            .map(|name| match name.as_str() {
                "manhattan" | "chebyshev" => bail!("heuristic `{name}` is only available with --domain grid2d"),
                other => other.parse::<UavHeuristic>().map_err(|e| anyhow::anyhow!("{e}")),
            })
            .collect()
    }

    pub fn planner_config(&self, anytime: bool) -> Result<PlannerConfig> {
        let cfg = PlannerConfig {
            schedule: WeightSchedule::Geometric { decay: self.decay },
            anytime,
            time_budget: self.timeout_ms.map(Duration::from_millis),
            expansion_budget: self.max_expansions,
            ..PlannerConfig::default().with_weights(self.w1, self.w2)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds the scenario for one `--map` value, along with the builtin's
    /// default task if it has one.
    pub fn scenario(&self, spec: &str) -> Result<(MapEntry, Option<Task>)> {
        let (id, map, builtin) = load_map(spec)?;
        let scenario = match self.domain {
            DomainKind::Grid2d => {
                let conn = match self.connectivity.or(builtin.as_ref().map(|b| b.connectivity)) {
                    Some(4) => Connectivity::Four,
                    _ => Connectivity::Eight,
                };
                let factors = self
                    .factors
                    .clone()
                    .or_else(|| builtin.as_ref().map(|b| b.factors.to_vec()))
                    .unwrap_or_else(|| default_factors(&map));
                let grid = Grid2D::new(map, conn, &factors).with_context(|| format!("map {id}"))?;
                Scenario::Grid(GridScenario { grid, heuristics: self.grid_heuristics()? })
            }
            DomainKind::Uav4d => {
                let prims = match &self.primitives {
                    None => PrimitiveSet::shipped(),
                    Some(p) => {
                        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                        PrimitiveSet::parse(&text).with_context(|| format!("primitive file {}", p.display()))?
                    }
                };
                let uav = Uav4D::new(map, Arc::new(prims), self.radius_m);
                Scenario::Uav(UavScenario { uav, heuristics: self.uav_heuristics()?, rho: self.rho })
            }
        };
        let task = builtin.and_then(|b| b.task).and_then(|(s, g)| match scenario {
            Scenario::Grid(_) => Some(Task::Grid(s, g)),
            // builtin endpoints are grid cells; on uav4d they need a
            // 3-aligned lattice, which only the sampled tasks guarantee
            Scenario::Uav(_) => None,
        });
        Ok((MapEntry { id, scenario }, task))
    }
}

/// Factor ladder for user maps: the wide one for maps of at least 256
/// cells a side, the narrow one otherwise.
pub fn default_factors(map: &CostMap) -> Vec<u32> {
    if map.width().min(map.height()) >= 256 {
        vec![1, 7, 21]
    } else {
        vec![1, 4, 16]
    }
}

struct Builtin {
    connectivity: u8,
    factors: &'static [u32],
    task: Option<(GridState, GridState)>,
}

pub const BUILTINS: [&str; 3] = ["fixture-61", "narrow-passage", "cul-de-sac"];

fn load_map(spec: &str) -> Result<(String, CostMap, Option<Builtin>)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let (map, b) = match name {
            "fixture-61" => (
                fixture_61(FIXTURE_61_SEED),
                Builtin { connectivity: 8, factors: &FIXTURE_61_FACTORS, task: Some((FIXTURE_61_START, FIXTURE_61_GOAL)) },
            ),
            "narrow-passage" => {
                (narrow_passage(), Builtin { connectivity: 4, factors: &NARROW_FACTORS, task: Some((NARROW_START, NARROW_GOAL)) })
            }
            "cul-de-sac" => {
                (cul_de_sac(), Builtin { connectivity: 4, factors: &CUL_DE_SAC_FACTORS, task: Some(cul_de_sac_trial(0)) })
            }
            _ => bail!("unknown builtin map `{name}`; known: {}", BUILTINS.join(", ")),
        };
        return Ok((name.to_string(), map, Some(b)));
    }
    let path = Path::new(spec);
    let bytes = std::fs::read(path).with_context(|| format!("reading map {spec}"))?;
    let map = CostMap::parse(&bytes).map_err(|e| anyhow::anyhow!("{spec}:{}:{}: {}", e.line, e.column, e.kind))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.to_string());
    Ok((id, map, None))
}

/// Parses a `--start`/`--goal` value for the scenario's domain and checks
/// that it is a free state.
pub fn parse_task(sc: &Scenario, start: &str, goal: &str) -> Result<Task> {
    match sc {
        Scenario::Grid(g) => {
            let (s, t): (GridState, GridState) =
                (start.parse().map_err(anyhow::Error::msg)?, goal.parse().map_err(anyhow::Error::msg)?);
            for (what, x) in [("start", s), ("goal", t)] {
                if !g.grid.is_valid(&x) {
                    bail!("{what} ({x}) is blocked or outside the map");
                }
            }
            Ok(Task::Grid(s, t))
        }
        Scenario::Uav(u) => {
            let (s, t): (UavState, UavState) =
                (start.parse().map_err(anyhow::Error::msg)?, goal.parse().map_err(anyhow::Error::msg)?);
            for (what, x) in [("start", s), ("goal", t)] {
                if !u.uav.is_valid(&x) {
                    bail!("{what} ({x}) is blocked or outside the map");
                }
            }
            Ok(Task::Uav(s, t))
        }
    }
}
