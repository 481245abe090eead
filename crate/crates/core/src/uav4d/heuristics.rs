//! Duration estimates for the UAV lattice. Every distance is divided by the
//! top speed so the estimate is in seconds.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::grid2d::CostMap;

use super::dubins::dubins_length;
use super::{heading_angle, UavState, CELL_M, V_MAX};

/// Default Dubins turning radius `v_max² / a_lat`.
pub const DEFAULT_TURN_RADIUS_M: f64 = V_MAX * V_MAX / 8.0;

/// Straight-line distance over top speed. Consistent: no primitive covers
/// ground faster than `V_MAX`.
pub fn euclidean(s: &UavState, goal: &UavState) -> f64 {
    let dx = (s.x - goal.x) as f64 * CELL_M;
    let dy = (s.y - goal.y) as f64 * CELL_M;
    dx.hypot(dy) / V_MAX
}

/// Dubins path length between the two poses over top speed.
pub fn dubins(s: &UavState, goal: &UavState, rho: f64) -> f64 {
    let pose = |u: &UavState| (u.x as f64 * CELL_M, u.y as f64 * CELL_M, heading_angle(u.theta));
    dubins_length(pose(s), pose(goal), rho) / V_MAX
}

/// Exact 2D shortest-path distances (metres) to the goal cell over the
/// 8-connected free cells of a map. Every free neighbour pair is an edge, so
/// neighbouring values differ by at most the edge length.
#[derive(Clone, Debug)]
pub struct BackwardDijkstra {
    width: u32,
    dist: Vec<f64>,
}

impl BackwardDijkstra {
    pub fn build(map: &CostMap, goal: (u32, u32)) -> Self {
        let (w, h) = (map.width(), map.height());
        let mut dist = vec![f64::INFINITY; (w * h) as usize];
        if !map.is_free(goal.0 as i64, goal.1 as i64) {
            return BackwardDijkstra { width: w, dist };
        }
        let idx = |x: i64, y: i64| (y * w as i64 + x) as usize;
        // integer keys in micrometres keep the heap ordering total
        let mut heap = BinaryHeap::new();
        dist[idx(goal.0 as i64, goal.1 as i64)] = 0.0;
        heap.push(Reverse((0u64, goal.0, goal.1)));
        while let Some(Reverse((_, x, y))) = heap.pop() {
            let d = dist[idx(x as i64, y as i64)];
            for (dx, dy) in crate::grid2d::DIRECTIONS {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if !map.is_free(nx, ny) {
                    continue;
                }
                let step = if dx != 0 && dy != 0 { SQRT_2 * CELL_M } else { CELL_M };
                let nd = d + step;
                let slot = &mut dist[idx(nx, ny)];
                if nd < *slot - 1e-12 {
                    *slot = nd;
                    heap.push(Reverse(((nd * 1e6).round() as u64, nx as u32, ny as u32)));
                }
            }
        }
        BackwardDijkstra { width: w, dist }
    }

    /// Metres from cell `(x, y)` to the goal; infinite if unreachable or out
    /// of bounds.
    pub fn distance(&self, x: i64, y: i64) -> f64 {
        let h = (self.dist.len() / self.width as usize) as i64;
        if x < 0 || y < 0 || x >= self.width as i64 || y >= h {
            return f64::INFINITY;
        }
        self.dist[(y * self.width as i64 + x) as usize]
    }

    /// Seconds at top speed.
    pub fn heuristic(&self, s: &UavState) -> f64 {
        self.distance(s.x as i64, s.y as i64) / V_MAX
    }
}
