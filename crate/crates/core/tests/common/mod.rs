#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::hash::Hash;

use amra_core::grid2d::{CostMap, GridState};
use amra_core::Domain;
use rand::Rng;

#[derive(PartialEq)]
struct Item<S>(f64, S);

impl<S: PartialEq> Eq for Item<S> {}

impl<S: PartialEq> PartialOrd for Item<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: PartialEq> Ord for Item<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

fn dijkstra<S: Copy + Eq + Hash>(source: S, mut edges: impl FnMut(S, &mut Vec<(S, f64)>)) -> HashMap<S, f64> {
    let mut dist = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(source, 0.0);
    heap.push(Item(0.0, source));
    let mut buf = Vec::new();
    while let Some(Item(d, s)) = heap.pop() {
        if d > dist[&s] {
            continue;
        }
        buf.clear();
        edges(s, &mut buf);
        for &(t, c) in &buf {
            let nd = d + c;
            if dist.get(&t).is_none_or(|&old| nd < old) {
                dist.insert(t, nd);
                heap.push(Item(nd, t));
            }
        }
    }
    dist
}

/// Exact cost-to-come from `start` over the union graph.
pub fn forward<D: Domain>(domain: &D, start: D::State) -> HashMap<D::State, f64> {
    let mut succs = Vec::new();
    dijkstra(start, |s, out| {
        succs.clear();
        domain.anchor_successors(&s, &mut succs);
        out.extend(succs.iter().map(|x| (x.state, x.cost)));
    })
}

/// Exact cost-to-go to `goal` over the union graph restricted to `states`.
pub fn backward<D: Domain>(domain: &D, states: &[D::State], goal: D::State) -> HashMap<D::State, f64> {
    let mut rev: HashMap<D::State, Vec<(D::State, f64)>> = HashMap::new();
    let mut succs = Vec::new();
    for &s in states {
        succs.clear();
        domain.anchor_successors(&s, &mut succs);
        for x in &succs {
            rev.entry(x.state).or_default().push((s, x.cost));
        }
    }
    dijkstra(goal, |s, out| out.extend(rev.get(&s).into_iter().flatten().copied()))
}

/// Costs uniform in `costs`, obstacles with probability `p_obstacle`.
pub fn random_map(rng: &mut impl Rng, w: u32, h: u32, p_obstacle: f64, costs: std::ops::RangeInclusive<u32>) -> CostMap {
    let cells: Vec<Option<u32>> =
        (0..w * h).map(|_| if rng.gen_bool(p_obstacle) { None } else { Some(rng.gen_range(costs.clone())) }).collect();
    CostMap::from_costs(w, h, cells)
}

pub fn free_states(map: &CostMap) -> Vec<GridState> {
    map.free_cells().map(|(x, y)| GridState::new(x, y)).collect()
}
