//! Costed occupancy grids searched at several resolution factors.
//!
//! A coarse lattice with factor `f` contains the cells whose coordinates are
//! both multiples of `f`; its actions step `f` fine cells along an axis (or an
//! exact diagonal). The cost of an action is the sum of the costs of the fine
//! cells it sweeps, source excluded, target included. Diagonal moves sweep
//! one cell per step and may not cut a corner next to an obstacle at any step.

mod map;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use map::{CostMap, MapErrorKind, MapParseError};

use crate::search::{ActionId, Domain, HeuristicSpec, Heuristics, ResolutionSet, Successor};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridState {
    pub x: u32,
    pub y: u32,
}

impl GridState {
    pub const fn new(x: u32, y: u32) -> Self {
        GridState { x, y }
    }
}

impl fmt::Display for GridState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

impl FromStr for GridState {
    type Err = String;

    /// Accepts `x,y` or `x y`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty());
        let mut coord = || -> Result<u32, String> {
            let p = parts.next().ok_or_else(|| format!("expected `x,y`, got {s:?}"))?;
            p.parse().map_err(|_| format!("bad coordinate {p:?} in {s:?}"))
        };
        let state = GridState::new(coord()?, coord()?);
        if parts.next().is_some() {
            return Err(format!("expected `x,y`, got {s:?}"));
        }
        Ok(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn directions(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &DIRECTIONS[..4],
            Connectivity::Eight => &DIRECTIONS,
        }
    }
}

impl FromStr for Connectivity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "4" | "four" => Ok(Connectivity::Four),
            "8" | "eight" => Ok(Connectivity::Eight),
            _ => Err(format!("connectivity must be 4 or 8, got {s:?}")),
        }
    }
}

/// E, N, W, S, NE, NW, SW, SE with `y` growing downwards (map rows).
pub const DIRECTIONS: [(i64, i64); 8] = [(1, 0), (0, -1), (-1, 0), (0, 1), (1, -1), (-1, -1), (-1, 1), (1, 1)];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("resolution factors must be strictly ascending, start at 1 and number at most 31; got {0:?}")]
    BadFactors(Vec<u32>),
    #[error("map has no passable cell")]
    NoFreeCell,
}

/// Multi-resolution grid domain. Cheap to clone: the map is shared.
#[derive(Clone, Debug)]
pub struct Grid2D {
    map: Arc<CostMap>,
    connectivity: Connectivity,
    factors: Vec<u32>,
    min_cost: u32,
}

impl Grid2D {
    pub fn new(map: impl Into<Arc<CostMap>>, connectivity: Connectivity, factors: &[u32]) -> Result<Self, GridError> {
        let ok = factors.first() == Some(&1)
            && factors.windows(2).all(|w| w[0] < w[1])
            && factors.len() <= crate::search::MAX_RESOLUTIONS;
        if !ok {
            return Err(GridError::BadFactors(factors.to_vec()));
        }
        let map = map.into();
        let min_cost = map.min_cost().ok_or(GridError::NoFreeCell)?;
        Ok(Grid2D { map, connectivity, factors: factors.to_vec(), min_cost })
    }

    pub fn map(&self) -> &CostMap {
        &self.map
    }

    pub fn shared_map(&self) -> Arc<CostMap> {
        Arc::clone(&self.map)
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn coarsest_factor(&self) -> u32 {
        *self.factors.last().unwrap()
    }

    /// Scale applied to distance heuristics.
    pub fn min_cost(&self) -> u32 {
        self.min_cost
    }

    /// Decodes an action id into `(resolution, direction index)`.
    pub fn decode_action(action: ActionId) -> (usize, usize) {
        ((action / 8) as usize, (action % 8) as usize)
    }

    /// Cost of moving `steps` fine cells from `from` along `dir`, or `None`
    /// if the move leaves the map, sweeps an obstacle or cuts a blocked
    /// corner.
    fn sweep(&self, from: GridState, dir: (i64, i64), steps: u32) -> Option<u64> {
        let (dx, dy) = dir;
        let (mut x, mut y) = (from.x as i64, from.y as i64);
        let mut cost = 0u64;
        for _ in 0..steps {
            if dx != 0 && dy != 0 && !(self.map.is_free(x + dx, y) && self.map.is_free(x, y + dy)) {
                return None;
            }
            x += dx;
            y += dy;
            cost += self.map.cost(x, y)? as u64;
        }
        Some(cost)
    }

    /// Swept cost of the single action joining `from` and `to`. `None` if the
    /// two are not joined by a straight or exact-diagonal segment, or the
    /// segment is blocked.
    pub fn action_cost(&self, from: GridState, to: GridState) -> Option<u64> {
        let dx = to.x as i64 - from.x as i64;
        let dy = to.y as i64 - from.y as i64;
        if dx == 0 && dy == 0 {
            return None;
        }
        if dx != 0 && dy != 0 && (dx.abs() != dy.abs() || self.connectivity == Connectivity::Four) {
            return None;
        }
        let steps = dx.abs().max(dy.abs()) as u32;
        self.sweep(from, (dx.signum(), dy.signum()), steps)
    }

    pub fn manhattan(&self, a: GridState, b: GridState) -> f64 {
        manhattan(a, b) * self.min_cost as f64
    }

    pub fn euclidean(&self, a: GridState, b: GridState) -> f64 {
        euclidean(a, b) * self.min_cost as f64
    }

    pub fn chebyshev(&self, a: GridState, b: GridState) -> f64 {
        chebyshev(a, b) * self.min_cost as f64
    }

    /// The consistent heuristic for this connectivity: Manhattan on 4-connected
    /// grids, Chebyshev on 8-connected ones (a diagonal step sweeps a single
    /// cell, so Euclidean and Manhattan both overestimate there).
    pub fn anchor_kind(&self) -> HeuristicKind {
        match self.connectivity {
            Connectivity::Four => HeuristicKind::Manhattan,
            Connectivity::Eight => HeuristicKind::Chebyshev,
        }
    }

    pub fn heuristic(&self, kind: HeuristicKind, a: GridState, b: GridState) -> f64 {
        match kind {
            HeuristicKind::Manhattan => self.manhattan(a, b),
            HeuristicKind::Euclidean => self.euclidean(a, b),
            HeuristicKind::Chebyshev => self.chebyshev(a, b),
        }
    }

    /// Anchor plus one queue per `(kind, resolution)` for every resolution.
    pub fn heuristics(&self, goal: GridState, kinds: &[HeuristicKind]) -> Heuristics<'static, GridState> {
        let g = self.clone();
        let anchor_kind = self.anchor_kind();
        let mut h = Heuristics::new(move |s: &GridState| g.heuristic(anchor_kind, *s, goal));
        for r in 1..=self.factors.len() {
            for &kind in kinds {
                let g = self.clone();
                h = h.with_queue(HeuristicSpec::new(format!("{kind}@{}", self.factors[r - 1]), r, move |s: &GridState| {
                    g.heuristic(kind, *s, goal)
                }));
            }
        }
        h
    }

    /// Every cell on the coarsest lattice that is passable.
    pub fn coarse_free_states(&self) -> Vec<GridState> {
        let f = self.coarsest_factor();
        self.map.free_cells().filter(|&(x, y)| x % f == 0 && y % f == 0).map(|(x, y)| GridState::new(x, y)).collect()
    }
}

impl Domain for Grid2D {
    type State = GridState;

    fn num_resolutions(&self) -> usize {
        self.factors.len()
    }

    fn is_valid(&self, s: &GridState) -> bool {
        self.map.is_free(s.x as i64, s.y as i64)
    }

    fn resolutions_of(&self, s: &GridState) -> ResolutionSet {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, &f)| s.x.is_multiple_of(f) && s.y.is_multiple_of(f))
            .map(|(i, _)| i + 1)
            .collect()
    }

    fn successors(&self, s: &GridState, res: usize, out: &mut Vec<Successor<GridState>>) {
        let f = self.factors[res - 1];
        debug_assert!(s.x.is_multiple_of(f) && s.y.is_multiple_of(f), "{s:?} is not on resolution {res}");
        for (d, &(dx, dy)) in self.connectivity.directions().iter().enumerate() {
            if let Some(cost) = self.sweep(*s, (dx, dy), f) {
                let step = f as i64;
                out.push(Successor {
                    state: GridState::new((s.x as i64 + dx * step) as u32, (s.y as i64 + dy * step) as u32),
                    cost: cost as f64,
                    action: (res * 8 + d) as ActionId,
                });
            }
        }
    }
}

/// Distance heuristics, all scaled by the map's minimum cell cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeuristicKind {
    Manhattan,
    Euclidean,
    Chebyshev,
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicKind::Manhattan => "manhattan",
            HeuristicKind::Euclidean => "euclidean",
            HeuristicKind::Chebyshev => "chebyshev",
        })
    }
}

impl FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "manhattan" => Ok(HeuristicKind::Manhattan),
            "euclidean" => Ok(HeuristicKind::Euclidean),
            "chebyshev" | "octile" => Ok(HeuristicKind::Chebyshev),
            _ => Err(format!("unknown grid heuristic {s:?} (manhattan, euclidean, chebyshev)")),
        }
    }
}

fn deltas(a: GridState, b: GridState) -> (f64, f64) {
    ((a.x as f64 - b.x as f64).abs(), (a.y as f64 - b.y as f64).abs())
}

/// Unscaled `|dx| + |dy|`.
pub fn manhattan(a: GridState, b: GridState) -> f64 {
    let (dx, dy) = deltas(a, b);
    dx + dy
}

/// Unscaled straight-line distance.
pub fn euclidean(a: GridState, b: GridState) -> f64 {
    let (dx, dy) = deltas(a, b);
    dx.hypot(dy)
}

/// Unscaled `max(|dx|, |dy|)`.
pub fn chebyshev(a: GridState, b: GridState) -> f64 {
    let (dx, dy) = deltas(a, b);
    dx.max(dy)
}
