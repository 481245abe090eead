//! A `(x, y, θ, v)` state lattice for a fixed-altitude UAV.
//!
//! Positions are in lattice units of [`CELL_M`] metres, one per map cell.
//! Headings take [`NUM_HEADINGS`] values 30 degrees apart; speeds are the
//! indices of [`SPEEDS`]. High-resolution primitives step in 3 m units from
//! any state; low-resolution ones step in 9 m units and only fire from states
//! whose `x` and `y` are multiples of 3. Edge cost is the primitive duration.

pub mod dubins;
pub mod generate;
pub mod heuristics;
mod primitives;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use generate::{generate_primitive_file, generate_primitives};
pub use primitives::{validate as validate_primitive, MotionPrimitive, Pose, PrimitiveError, PrimitiveSet};

use crate::grid2d::CostMap;
use crate::search::{Domain, HeuristicSpec, Heuristics, ResolutionSet, Successor};

pub const CELL_M: f64 = 3.0;
pub const NUM_HEADINGS: usize = 12;
pub const SPEEDS: [f64; 3] = [0.0, 3.0, 8.0];
pub const NUM_SPEEDS: usize = SPEEDS.len();
pub const V_MAX: f64 = 8.0;

/// Heading index to radians.
pub fn heading_angle(theta: u8) -> f64 {
    theta as f64 * std::f64::consts::TAU / NUM_HEADINGS as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resolution {
    /// 3 m position steps.
    High,
    /// 9 m position steps.
    Low,
}

impl Resolution {
    pub const ALL: [Resolution; 2] = [Resolution::High, Resolution::Low];

    /// Index in the planner's numbering (1 = finest).
    pub fn index(self) -> usize {
        match self {
            Resolution::High => 1,
            Resolution::Low => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Resolution::High),
            2 => Some(Resolution::Low),
            _ => None,
        }
    }

    /// Position step in lattice units.
    pub fn step(self) -> i32 {
        match self {
            Resolution::High => 1,
            Resolution::Low => 3,
        }
    }

    pub fn metres(self) -> u32 {
        self.step() as u32 * CELL_M as u32
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UavState {
    pub x: i32,
    pub y: i32,
    pub theta: u8,
    pub v: u8,
}

impl UavState {
    pub const fn new(x: i32, y: i32, theta: u8, v: u8) -> Self {
        UavState { x, y, theta, v }
    }
}

impl fmt::Display for UavState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.x, self.y, self.theta, self.v)
    }
}

impl FromStr for UavState {
    type Err = String;

    /// `x,y[,θ[,v]]`; heading and speed default to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
        if !(2..=4).contains(&parts.len()) {
            return Err(format!("expected `x,y[,heading[,speed]]`, got {s:?}"));
        }
        let bad = |p: &str| format!("bad field {p:?} in {s:?}");
        let x = parts[0].parse().map_err(|_| bad(parts[0]))?;
        let y = parts[1].parse().map_err(|_| bad(parts[1]))?;
        let theta: u8 = parts.get(2).map_or(Ok(0), |p| p.parse().map_err(|_| bad(p)))?;
        let v: u8 = parts.get(3).map_or(Ok(0), |p| p.parse().map_err(|_| bad(p)))?;
        if theta as usize >= NUM_HEADINGS || v as usize >= NUM_SPEEDS {
            return Err(format!("heading must be < {NUM_HEADINGS} and speed index < {NUM_SPEEDS} in {s:?}"));
        }
        Ok(UavState { x, y, theta, v })
    }
}

/// UAV heuristics available for queues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UavHeuristic {
    Euclidean,
    Dubins,
    Dijkstra,
}

impl fmt::Display for UavHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UavHeuristic::Euclidean => "euclidean",
            UavHeuristic::Dubins => "dubins",
            UavHeuristic::Dijkstra => "dijkstra",
        })
    }
}

impl FromStr for UavHeuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(UavHeuristic::Euclidean),
            "dubins" => Ok(UavHeuristic::Dubins),
            "dijkstra" | "backward-dijkstra" => Ok(UavHeuristic::Dijkstra),
            _ => Err(format!("unknown UAV heuristic {s:?} (euclidean, dubins, dijkstra)")),
        }
    }
}

/// The UAV lattice over an occupancy map. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Uav4D {
    map: Arc<CostMap>,
    prims: Arc<PrimitiveSet>,
    /// Cells blocked after inflating obstacles by the footprint radius.
    blocked: Arc<Vec<bool>>,
    radius_m: f64,
}

impl Uav4D {
    /// `radius_m` inflates obstacles: a cell is blocked if its centre lies
    /// within `radius_m` of an obstacle cell's square.
    pub fn new(map: impl Into<Arc<CostMap>>, prims: impl Into<Arc<PrimitiveSet>>, radius_m: f64) -> Self {
        let map: Arc<CostMap> = map.into();
        let (w, h) = (map.width() as i64, map.height() as i64);
        let reach = (radius_m / CELL_M).ceil() as i64;
        let mut blocked = vec![false; (w * h) as usize];
        for y in 0..h {
            for x in 0..w {
                if map.is_free(x, y) {
                    continue;
                }
                for oy in -reach..=reach {
                    for ox in -reach..=reach {
                        let (cx, cy) = (x + ox, y + oy);
                        if cx < 0 || cy < 0 || cx >= w || cy >= h {
                            continue;
                        }
                        // distance from the neighbour's centre to this square
                        let gx = ((ox.abs() as f64) - 0.5).max(0.0) * CELL_M;
                        let gy = ((oy.abs() as f64) - 0.5).max(0.0) * CELL_M;
                        if (ox == 0 && oy == 0) || gx.hypot(gy) <= radius_m {
                            blocked[(cy * w + cx) as usize] = true;
                        }
                    }
                }
            }
        }
        Uav4D { map, prims: prims.into(), blocked: Arc::new(blocked), radius_m }
    }

    pub fn map(&self) -> &CostMap {
        &self.map
    }

    pub fn primitives(&self) -> &PrimitiveSet {
        &self.prims
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    fn cell_blocked(&self, x: i64, y: i64) -> bool {
        !self.map.in_bounds(x, y) || self.blocked[(y * self.map.width() as i64 + x) as usize]
    }

    /// Whether a pose in metres (lattice point `(i, j)` sits at `(3i, 3j)`)
    /// lands on a free inflated cell.
    pub fn pose_free(&self, x_m: f64, y_m: f64) -> bool {
        let cx = (x_m / CELL_M).round() as i64;
        let cy = (y_m / CELL_M).round() as i64;
        !self.cell_blocked(cx, cy)
    }

    /// Every state on the coarse (9 m) lattice whose cell is free, at the
    /// given heading and speed.
    pub fn coarse_free_states(&self, theta: u8, v: u8) -> Vec<UavState> {
        let step = Resolution::Low.step();
        let mut out = Vec::new();
        for y in (0..self.map.height() as i32).step_by(step as usize) {
            for x in (0..self.map.width() as i32).step_by(step as usize) {
                if !self.cell_blocked(x as i64, y as i64) {
                    out.push(UavState::new(x, y, theta, v));
                }
            }
        }
        out
    }

    fn heuristic_fn(&self, kind: UavHeuristic, goal: UavState, rho: f64) -> Box<dyn Fn(&UavState) -> f64 + Send + Sync> {
        match kind {
            UavHeuristic::Euclidean => Box::new(move |s| heuristics::euclidean(s, &goal)),
            UavHeuristic::Dubins => Box::new(move |s| heuristics::dubins(s, &goal, rho)),
            UavHeuristic::Dijkstra => {
                let table = heuristics::BackwardDijkstra::build(&self.map, (goal.x as u32, goal.y as u32));
                Box::new(move |s| table.heuristic(s))
            }
        }
    }

    /// Euclidean anchor plus one queue per `(kind, resolution)`.
    pub fn heuristics(&self, goal: UavState, kinds: &[UavHeuristic], rho: f64) -> Heuristics<'static, UavState> {
        let mut h = Heuristics::new(move |s: &UavState| heuristics::euclidean(s, &goal));
        for res in Resolution::ALL {
            for &kind in kinds {
                let f = self.heuristic_fn(kind, goal, rho);
                h = h.with_queue(HeuristicSpec::new(format!("{kind}@{}m", res.metres()), res.index(), move |s: &UavState| f(s)));
            }
        }
        h
    }

    /// Anchor plus queues for explicit `(kind, resolution)` pairs.
    pub fn heuristics_for(
        &self,
        goal: UavState,
        layout: &[(UavHeuristic, Resolution)],
        rho: f64,
    ) -> Heuristics<'static, UavState> {
        let mut h = Heuristics::new(move |s: &UavState| heuristics::euclidean(s, &goal));
        for &(kind, res) in layout {
            let f = self.heuristic_fn(kind, goal, rho);
            h = h.with_queue(HeuristicSpec::new(format!("{kind}@{}m", res.metres()), res.index(), move |s: &UavState| f(s)));
        }
        h
    }
}

impl Domain for Uav4D {
    type State = UavState;

    fn num_resolutions(&self) -> usize {
        2
    }

    fn is_valid(&self, s: &UavState) -> bool {
        (s.theta as usize) < NUM_HEADINGS && (s.v as usize) < NUM_SPEEDS && !self.cell_blocked(s.x as i64, s.y as i64)
    }

    fn resolutions_of(&self, s: &UavState) -> ResolutionSet {
        let step = Resolution::Low.step();
        if s.x % step == 0 && s.y % step == 0 {
            ResolutionSet::all_up_to(2)
        } else {
            ResolutionSet::single(1)
        }
    }

    fn successors(&self, s: &UavState, res: usize, out: &mut Vec<Successor<UavState>>) {
        let res = Resolution::from_index(res).expect("resolution is 1 or 2");
        let (ox, oy) = (s.x as f64 * CELL_M, s.y as f64 * CELL_M);
        for &id in self.prims.group(res, s.theta, s.v) {
            let p = self.prims.get(id);
            if p.poses.iter().all(|q| self.pose_free(ox + q.x, oy + q.y)) {
                out.push(Successor {
                    state: UavState::new(s.x + p.dx, s.y + p.dy, p.end_theta, p.end_v),
                    cost: p.duration,
                    action: id,
                });
            }
        }
    }
}
