//! Hand-built graphs for unit tests.

use super::domain::{Domain, ResolutionSet, Successor};

/// States are `u32`; every edge belongs to one resolution.
#[derive(Clone, Debug, Default)]
pub struct ExplicitGraph {
    pub num_res: usize,
    /// `(from, to, cost, res)`
    pub edges: Vec<(u32, u32, f64, usize)>,
    /// Defaults to every resolution.
    pub res_of: Vec<(u32, ResolutionSet)>,
}

impl ExplicitGraph {
    pub fn new(num_res: usize) -> Self {
        ExplicitGraph { num_res, ..Default::default() }
    }

    pub fn edge(mut self, from: u32, to: u32, cost: f64, res: usize) -> Self {
        self.edges.push((from, to, cost, res));
        self
    }

    pub fn on(mut self, state: u32, res: &[usize]) -> Self {
        self.res_of.push((state, res.iter().copied().collect()));
        self
    }
}

impl Domain for ExplicitGraph {
    type State = u32;

    fn num_resolutions(&self) -> usize {
        self.num_res
    }

    fn is_valid(&self, _: &u32) -> bool {
        true
    }

    fn resolutions_of(&self, s: &u32) -> ResolutionSet {
        self.res_of.iter().find(|(x, _)| x == s).map(|&(_, r)| r).unwrap_or_else(|| ResolutionSet::all_up_to(self.num_res))
    }

    fn successors(&self, s: &u32, res: usize, out: &mut Vec<Successor<u32>>) {
        for (k, &(from, to, cost, r)) in self.edges.iter().enumerate() {
            if from == *s && r == res {
                out.push(Successor { state: to, cost, action: k as u32 });
            }
        }
    }
}
